#pragma once

#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Core>

namespace ddfem::fem {

/// Square matrix in compressed sparse row format with sorted column indices
/// and a fixed sparsity pattern.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  /// Pattern from sorted, duplicate-free column lists per row; values zero.
  CsrMatrix(int rows, std::vector<int> row_ptr, std::vector<int> cols);
  /// Sums duplicate (row, col, value) entries.
  static CsrMatrix from_triplets(int rows, const std::vector<std::tuple<int, int, double>>& entries);

  int rows() const noexcept { return rows_; }
  std::size_t nnz() const noexcept { return cols_.size(); }
  const std::vector<int>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<int>& cols() const noexcept { return cols_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  /// Position of (row, col) in values(), or -1 if outside the pattern.
  std::ptrdiff_t find(int row, int col) const;
  double coeff(int row, int col) const;
  void set_zero();

  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;
  void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  Eigen::VectorXd diagonal() const;
  Eigen::MatrixXd to_dense() const;

  bool structurally_symmetric() const;
  /// max |a_ij - a_ji| / sqrt(|a_ii a_jj|) over the pattern; infinite if
  /// the pattern is not symmetric.
  double scaled_asymmetry() const;
  /// max |a_ij - a_ji| / max |a_ij|.
  double relative_asymmetry() const;

 private:
  int rows_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> cols_;
  std::vector<double> values_;
};

struct LinearSolverOptions {
  double relative_tolerance = 1e-10;
  /// 0 means 10 * N.
  int max_iterations = 0;
  /// Scaled asymmetry below which the matrix is treated as symmetric.
  double symmetry_tolerance = 1e-6;
};

struct LinearSolveResult {
  Eigen::VectorXd x;
  std::string method;  // "cg" or "bicgstab"
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients for symmetric matrices,
/// BiCGStab otherwise (or if CG breaks down). Zero right-hand side returns
/// the zero vector.
LinearSolveResult solve_linear(const CsrMatrix& A, const Eigen::VectorXd& b,
                               const LinearSolverOptions& options = {});

LinearSolveResult conjugate_gradient(const CsrMatrix& A, const Eigen::VectorXd& b,
                                     const LinearSolverOptions& options = {});
LinearSolveResult bicgstab(const CsrMatrix& A, const Eigen::VectorXd& b,
                           const LinearSolverOptions& options = {});

}  // namespace ddfem::fem
