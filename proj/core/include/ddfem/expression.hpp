#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "ddfem/types.hpp"

namespace ddfem {

/// Small arithmetic language used for coefficients and boundary data in
/// scene files.
///
///   expr    := cmp
///   cmp     := sum [("<" | "<=" | ">" | ">=" | "==" | "!=") sum]
///   sum     := product {("+" | "-") product}
///   product := unary {("*" | "/") unary}
///   unary   := ("-" | "+") unary | power
///   power   := postfix ["^" unary]
///   postfix := primary {"[" integer "]"}
///   primary := number | name | name "(" expr {"," expr} ")"
///            | "(" expr ")" | "[" expr {"," expr} "]"
///
/// Values are vectors; a scalar is a vector of length one and broadcasts.
/// Variables: t, x, U, n (boundary normal) and DU (written DU[i][j]).
/// Functions: sin cos tan tanh sqrt exp log abs min max pow atan2 dot norm.
/// Constant: pi. Comparisons yield 1 or 0 elementwise.
class Expression {
 public:
  using Value = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 16, 1>;

  struct Env {
    double t = 0.0;
    const Point* x = nullptr;
    const State* U = nullptr;
    const Flux* DU = nullptr;
    const Point* n = nullptr;
  };

  /// Throws Error(kParse) with the offending column.
  static Expression parse(std::string_view source);

  Value evaluate(const Env& env) const;
  /// Evaluates and shapes the result as an m-vector (scalars broadcast).
  State evaluate_state(const Env& env, int components) const;
  double evaluate_scalar(const Env& env) const;

  const std::string& source() const noexcept { return source_; }
  /// True if the expression reads the named variable (t, x, U, DU, n).
  bool uses(std::string_view variable) const;

  class Node;

 private:
  Expression(std::string source, std::shared_ptr<const Node> root);

  std::string source_;
  std::shared_ptr<const Node> root_;
};

}  // namespace ddfem
