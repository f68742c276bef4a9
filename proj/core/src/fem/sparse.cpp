#include "ddfem/fem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "ddfem/error.hpp"

namespace ddfem::fem {

CsrMatrix::CsrMatrix(int rows, std::vector<int> row_ptr, std::vector<int> cols)
    : rows_(rows), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), values_(cols_.size(), 0.0) {
  if (rows_ < 0 || row_ptr_.size() != static_cast<std::size_t>(rows_) + 1 ||
      static_cast<std::size_t>(row_ptr_.back()) != cols_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "inconsistent CSR pattern");
  }
}

CsrMatrix CsrMatrix::from_triplets(int rows,
                                   const std::vector<std::tuple<int, int, double>>& entries) {
  std::vector<std::map<int, double>> by_row(static_cast<std::size_t>(rows));
  for (const auto& [r, c, v] : entries) {
    if (r < 0 || r >= rows || c < 0 || c >= rows) {
      throw Error(ErrorCode::kInvalidArgument, "triplet outside the matrix");
    }
    by_row[static_cast<std::size_t>(r)][c] += v;
  }
  std::vector<int> ptr{0};
  std::vector<int> cols;
  std::vector<double> vals;
  for (const auto& row : by_row) {
    for (const auto& [c, v] : row) {
      cols.push_back(c);
      vals.push_back(v);
    }
    ptr.push_back(static_cast<int>(cols.size()));
  }
  CsrMatrix out(rows, std::move(ptr), std::move(cols));
  out.values_ = std::move(vals);
  return out;
}

std::ptrdiff_t CsrMatrix::find(int row, int col) const {
  const auto begin = cols_.begin() + row_ptr_[static_cast<std::size_t>(row)];
  const auto end = cols_.begin() + row_ptr_[static_cast<std::size_t>(row) + 1];
  const auto it = std::lower_bound(begin, end, col);
  if (it == end || *it != col) return -1;
  return it - cols_.begin();
}

double CsrMatrix::coeff(int row, int col) const {
  const auto k = find(row, col);
  return k < 0 ? 0.0 : values_[static_cast<std::size_t>(k)];
}

void CsrMatrix::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

void CsrMatrix::multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  y.resize(rows_);
  for (int r = 0; r < rows_; ++r) {
    double sum = 0.0;
    for (int k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
      sum += values_[static_cast<std::size_t>(k)] * x[cols_[static_cast<std::size_t>(k)]];
    }
    y[r] = sum;
  }
}

Eigen::VectorXd CsrMatrix::operator*(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y;
  multiply(x, y);
  return y;
}

Eigen::VectorXd CsrMatrix::diagonal() const {
  Eigen::VectorXd d(rows_);
  for (int r = 0; r < rows_; ++r) d[r] = coeff(r, r);
  return d;
}

Eigen::MatrixXd CsrMatrix::to_dense() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows_, rows_);
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
      out(r, cols_[static_cast<std::size_t>(k)]) = values_[static_cast<std::size_t>(k)];
    }
  }
  return out;
}

bool CsrMatrix::structurally_symmetric() const {
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
      if (find(cols_[static_cast<std::size_t>(k)], r) < 0) return false;
    }
  }
  return true;
}

double CsrMatrix::scaled_asymmetry() const {
  if (!structurally_symmetric()) return std::numeric_limits<double>::infinity();
  const Eigen::VectorXd d = diagonal().cwiseAbs();
  double worst = 0.0;
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
      const int c = cols_[static_cast<std::size_t>(k)];
      if (c <= r) continue;
      const double diff = std::abs(values_[static_cast<std::size_t>(k)] - coeff(c, r));
      if (diff == 0.0) continue;
      const double scale = std::sqrt(d[r] * d[c]);
      worst = std::max(worst, scale > 0.0 ? diff / scale : std::numeric_limits<double>::infinity());
    }
  }
  return worst;
}

double CsrMatrix::relative_asymmetry() const {
  if (!structurally_symmetric()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  double largest = 0.0;
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
      const int c = cols_[static_cast<std::size_t>(k)];
      largest = std::max(largest, std::abs(values_[static_cast<std::size_t>(k)]));
      worst = std::max(worst, std::abs(values_[static_cast<std::size_t>(k)] - coeff(c, r)));
    }
  }
  return largest > 0.0 ? worst / largest : 0.0;
}

namespace {

Eigen::VectorXd jacobi_inverse(const CsrMatrix& A) {
  Eigen::VectorXd inv = A.diagonal();
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    inv[i] = (inv[i] != 0.0 && std::isfinite(inv[i])) ? 1.0 / inv[i] : 1.0;
  }
  return inv;
}

int iteration_cap(const CsrMatrix& A, const LinearSolverOptions& options) {
  return options.max_iterations > 0 ? options.max_iterations : std::max(10 * A.rows(), 10);
}

void check_sizes(const CsrMatrix& A, const Eigen::VectorXd& b) {
  if (b.size() != A.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "right-hand side has " + std::to_string(b.size()) +
                                                   " entries for a matrix of size " +
                                                   std::to_string(A.rows()));
  }
}

}  // namespace

LinearSolveResult conjugate_gradient(const CsrMatrix& A, const Eigen::VectorXd& b,
                                     const LinearSolverOptions& options) {
  check_sizes(A, b);
  LinearSolveResult out;
  out.method = "cg";
  out.x = Eigen::VectorXd::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    out.converged = true;
    return out;
  }
  const Eigen::VectorXd minv = jacobi_inverse(A);
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = minv.cwiseProduct(r);
  Eigen::VectorXd p = z;
  Eigen::VectorXd q(b.size());
  double rz = r.dot(z);
  const int cap = iteration_cap(A, options);
  for (int it = 1; it <= cap; ++it) {
    A.multiply(p, q);
    const double pq = p.dot(q);
    if (!(pq > 0.0)) break;  // not positive definite along p
    const double alpha = rz / pq;
    out.x += alpha * p;
    r -= alpha * q;
    out.iterations = it;
    out.relative_residual = r.norm() / bnorm;
    if (out.relative_residual <= options.relative_tolerance) {
      out.converged = true;
      return out;
    }
    z = minv.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  return out;
}

LinearSolveResult bicgstab(const CsrMatrix& A, const Eigen::VectorXd& b,
                           const LinearSolverOptions& options) {
  check_sizes(A, b);
  LinearSolveResult out;
  out.method = "bicgstab";
  out.x = Eigen::VectorXd::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    out.converged = true;
    return out;
  }
  const Eigen::VectorXd minv = jacobi_inverse(A);
  Eigen::VectorXd r = b;
  const Eigen::VectorXd r_hat = r;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd y(b.size()), s(b.size()), z(b.size()), t(b.size());
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  const int cap = iteration_cap(A, options);
  for (int it = 1; it <= cap; ++it) {
    const double rho_next = r_hat.dot(r);
    if (rho_next == 0.0) break;
    const double beta = (rho_next / rho) * (alpha / omega);
    rho = rho_next;
    p = r + beta * (p - omega * v);
    y = minv.cwiseProduct(p);
    A.multiply(y, v);
    const double denom = r_hat.dot(v);
    if (denom == 0.0) break;
    alpha = rho / denom;
    s = r - alpha * v;
    out.iterations = it;
    if (s.norm() / bnorm <= options.relative_tolerance) {
      out.x += alpha * y;
      out.relative_residual = s.norm() / bnorm;
      out.converged = true;
      return out;
    }
    z = minv.cwiseProduct(s);
    A.multiply(z, t);
    const double tt = t.dot(t);
    if (tt == 0.0) break;
    omega = t.dot(s) / tt;
    out.x += alpha * y + omega * z;
    r = s - omega * t;
    out.relative_residual = r.norm() / bnorm;
    if (out.relative_residual <= options.relative_tolerance) {
      out.converged = true;
      return out;
    }
    if (omega == 0.0) break;
  }
  return out;
}

LinearSolveResult solve_linear(const CsrMatrix& A, const Eigen::VectorXd& b,
                               const LinearSolverOptions& options) {
  if (A.scaled_asymmetry() <= options.symmetry_tolerance) {
    auto result = conjugate_gradient(A, b, options);
    if (result.converged) return result;
  }
  return bicgstab(A, b, options);
}

}  // namespace ddfem::fem
