#include "ddfem/expression.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include "ddfem/error.hpp"

namespace ddfem {

using Value = Expression::Value;

class Expression::Node {
 public:
  virtual ~Node() = default;
  virtual Value eval(const Env& env) const = 0;
  virtual void collect(std::set<std::string>& vars) const = 0;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

[[noreturn]] void eval_error(const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, "expression: " + what);
}

Value scalar(double v) {
  Value out(1);
  out[0] = v;
  return out;
}

Value broadcast(const Value& a, const Value& b, const std::function<double(double, double)>& op) {
  if (a.size() == b.size()) {
    Value out(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out[i] = op(a[i], b[i]);
    return out;
  }
  if (a.size() == 1) {
    Value out(b.size());
    for (Eigen::Index i = 0; i < b.size(); ++i) out[i] = op(a[0], b[i]);
    return out;
  }
  if (b.size() == 1) {
    Value out(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out[i] = op(a[i], b[0]);
    return out;
  }
  std::ostringstream msg;
  msg << "size mismatch " << a.size() << " vs " << b.size();
  eval_error(msg.str());
}

class Constant final : public Expression::Node {
 public:
  explicit Constant(double v) : value_(scalar(v)) {}
  Value eval(const Expression::Env&) const override { return value_; }
  void collect(std::set<std::string>&) const override {}

 private:
  Value value_;
};

class Variable final : public Expression::Node {
 public:
  explicit Variable(std::string name) : name_(std::move(name)) {}

  Value eval(const Expression::Env& env) const override {
    if (name_ == "t") return scalar(env.t);
    const auto copy = [&](const auto* v) -> Value {
      if (v == nullptr) eval_error("variable '" + name_ + "' is not available here");
      return Value(*v);
    };
    if (name_ == "x") return copy(env.x);
    if (name_ == "U") return copy(env.U);
    if (name_ == "n") return copy(env.n);
    eval_error("variable '" + name_ + "' needs two indices");
  }
  void collect(std::set<std::string>& vars) const override { vars.insert(name_); }

 private:
  std::string name_;
};

class GradientEntry final : public Expression::Node {
 public:
  GradientEntry(int row, int col) : row_(row), col_(col) {}
  Value eval(const Expression::Env& env) const override {
    if (env.DU == nullptr) eval_error("variable 'DU' is not available here");
    if (row_ >= env.DU->rows() || col_ >= env.DU->cols()) eval_error("DU index out of range");
    return scalar((*env.DU)(row_, col_));
  }
  void collect(std::set<std::string>& vars) const override { vars.insert("DU"); }

 private:
  int row_, col_;
};

class Index final : public Expression::Node {
 public:
  Index(NodePtr base, int index) : base_(std::move(base)), index_(index) {}
  Value eval(const Expression::Env& env) const override {
    const Value v = base_->eval(env);
    if (index_ >= v.size()) {
      std::ostringstream msg;
      msg << "index " << index_ << " out of range for length " << v.size();
      eval_error(msg.str());
    }
    return scalar(v[index_]);
  }
  void collect(std::set<std::string>& vars) const override { base_->collect(vars); }

 private:
  NodePtr base_;
  int index_;
};

class Binary final : public Expression::Node {
 public:
  Binary(NodePtr a, NodePtr b, std::function<double(double, double)> op)
      : a_(std::move(a)), b_(std::move(b)), op_(std::move(op)) {}
  Value eval(const Expression::Env& env) const override {
    return broadcast(a_->eval(env), b_->eval(env), op_);
  }
  void collect(std::set<std::string>& vars) const override {
    a_->collect(vars);
    b_->collect(vars);
  }

 private:
  NodePtr a_, b_;
  std::function<double(double, double)> op_;
};

class Unary final : public Expression::Node {
 public:
  Unary(NodePtr a, double (*op)(double)) : a_(std::move(a)), op_(op) {}
  Value eval(const Expression::Env& env) const override {
    Value v = a_->eval(env);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = op_(v[i]);
    return v;
  }
  void collect(std::set<std::string>& vars) const override { a_->collect(vars); }

 private:
  NodePtr a_;
  double (*op_)(double);
};

class Reduce final : public Expression::Node {
 public:
  enum class Kind { kDot, kNorm };
  Reduce(Kind kind, std::vector<NodePtr> args) : kind_(kind), args_(std::move(args)) {}
  Value eval(const Expression::Env& env) const override {
    const Value a = args_[0]->eval(env);
    if (kind_ == Kind::kNorm) return scalar(a.norm());
    const Value b = args_[1]->eval(env);
    if (a.size() != b.size()) eval_error("dot of vectors with different lengths");
    return scalar(a.dot(b));
  }
  void collect(std::set<std::string>& vars) const override {
    for (const auto& a : args_) a->collect(vars);
  }

 private:
  Kind kind_;
  std::vector<NodePtr> args_;
};

class VectorLiteral final : public Expression::Node {
 public:
  explicit VectorLiteral(std::vector<NodePtr> items) : items_(std::move(items)) {}
  Value eval(const Expression::Env& env) const override {
    Value out(static_cast<Eigen::Index>(items_.size()));
    for (std::size_t i = 0; i < items_.size(); ++i) {
      const Value v = items_[i]->eval(env);
      if (v.size() != 1) eval_error("vector literal entries must be scalars");
      out[static_cast<Eigen::Index>(i)] = v[0];
    }
    return out;
  }
  void collect(std::set<std::string>& vars) const override {
    for (const auto& a : items_) a->collect(vars);
  }

 private:
  std::vector<NodePtr> items_;
};

double neg(double v) { return -v; }
double abs_value(double v) { return std::abs(v); }

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    NodePtr root = comparison();
    skip_space();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream msg;
    msg << "expression '" << src_ << "' at column " << pos_ + 1 << ": " << what;
    throw Error(ErrorCode::kParse, msg.str());
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(std::string_view token) {
    skip_space();
    if (src_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view token) {
    if (!accept(token)) fail("expected '" + std::string(token) + "'");
  }

  NodePtr comparison() {
    NodePtr lhs = sum();
    // Two-character operators first.
    if (accept("<=")) return binary(lhs, sum(), [](double a, double b) { return a <= b ? 1.0 : 0.0; });
    if (accept(">=")) return binary(lhs, sum(), [](double a, double b) { return a >= b ? 1.0 : 0.0; });
    if (accept("==")) return binary(lhs, sum(), [](double a, double b) { return a == b ? 1.0 : 0.0; });
    if (accept("!=")) return binary(lhs, sum(), [](double a, double b) { return a != b ? 1.0 : 0.0; });
    if (accept("<")) return binary(lhs, sum(), [](double a, double b) { return a < b ? 1.0 : 0.0; });
    if (accept(">")) return binary(lhs, sum(), [](double a, double b) { return a > b ? 1.0 : 0.0; });
    return lhs;
  }

  static NodePtr binary(NodePtr a, NodePtr b, std::function<double(double, double)> op) {
    return std::make_shared<Binary>(std::move(a), std::move(b), std::move(op));
  }

  NodePtr sum() {
    NodePtr acc = product();
    for (;;) {
      if (accept("+")) {
        acc = binary(acc, product(), std::plus<>());
      } else if (accept("-")) {
        acc = binary(acc, product(), std::minus<>());
      } else {
        return acc;
      }
    }
  }

  NodePtr product() {
    NodePtr acc = unary();
    for (;;) {
      if (accept("*")) {
        acc = binary(acc, unary(), std::multiplies<>());
      } else if (accept("/")) {
        acc = binary(acc, unary(), std::divides<>());
      } else {
        return acc;
      }
    }
  }

  NodePtr unary() {
    if (accept("-")) return std::make_shared<Unary>(unary(), &neg);
    if (accept("+")) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = postfix();
    if (accept("^")) {
      return binary(base, unary(), [](double a, double b) { return std::pow(a, b); });
    }
    return base;
  }

  int integer_index() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (start == pos_) fail("index must be a non-negative integer literal");
    const int value = std::stoi(std::string(src_.substr(start, pos_ - start)));
    expect("]");
    return value;
  }

  NodePtr postfix() {
    NodePtr node = primary();
    while (accept("[")) node = std::make_shared<Index>(node, integer_index());
    return node;
  }

  std::vector<NodePtr> arguments(std::string_view close) {
    std::vector<NodePtr> args;
    args.push_back(comparison());
    while (accept(",")) args.push_back(comparison());
    expect(close);
    return args;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (accept("(")) {
      NodePtr inner = comparison();
      expect(")");
      return inner;
    }
    if (accept("[")) return std::make_shared<VectorLiteral>(arguments("]"));
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    const std::string rest(src_.substr(pos_));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    pos_ += used;
    return std::make_shared<Constant>(v);
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string id(src_.substr(start, pos_ - start));
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      ++pos_;
      return call(id, arguments(")"));
    }
    if (id == "pi") return std::make_shared<Constant>(std::numbers::pi);
    if (id == "DU") {
      expect("[");
      const int row = integer_index();
      expect("[");
      const int col = integer_index();
      return std::make_shared<GradientEntry>(row, col);
    }
    if (id == "t" || id == "x" || id == "U" || id == "n") {
      return std::make_shared<Variable>(id);
    }
    pos_ = start;
    fail("unknown name '" + id + "'");
  }

  NodePtr call(const std::string& fn, std::vector<NodePtr> args) {
    const auto arity = [&](std::size_t n) {
      if (args.size() != n) {
        fail("function '" + fn + "' takes " + std::to_string(n) + " argument(s)");
      }
    };
    using F = double (*)(double);
    static const std::pair<const char*, F> kUnary[] = {
        {"sin", static_cast<F>(std::sin)},   {"cos", static_cast<F>(std::cos)},
        {"tan", static_cast<F>(std::tan)},   {"tanh", static_cast<F>(std::tanh)},
        {"sqrt", static_cast<F>(std::sqrt)}, {"exp", static_cast<F>(std::exp)},
        {"log", static_cast<F>(std::log)},   {"abs", &abs_value},
    };
    for (const auto& [id, f] : kUnary) {
      if (fn == id) {
        arity(1);
        return std::make_shared<Unary>(args[0], f);
      }
    }
    if (fn == "min" || fn == "max" || fn == "pow" || fn == "atan2") {
      arity(2);
      if (fn == "min") return binary(args[0], args[1], [](double a, double b) { return std::min(a, b); });
      if (fn == "max") return binary(args[0], args[1], [](double a, double b) { return std::max(a, b); });
      if (fn == "pow") return binary(args[0], args[1], [](double a, double b) { return std::pow(a, b); });
      return binary(args[0], args[1], [](double a, double b) { return std::atan2(a, b); });
    }
    if (fn == "dot") {
      arity(2);
      return std::make_shared<Reduce>(Reduce::Kind::kDot, std::move(args));
    }
    if (fn == "norm") {
      arity(1);
      return std::make_shared<Reduce>(Reduce::Kind::kNorm, std::move(args));
    }
    fail("unknown function '" + fn + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(std::string source, std::shared_ptr<const Node> root)
    : source_(std::move(source)), root_(std::move(root)) {}

Expression Expression::parse(std::string_view source) {
  Parser parser(source);
  return Expression(std::string(source), parser.parse());
}

Value Expression::evaluate(const Env& env) const { return root_->eval(env); }

State Expression::evaluate_state(const Env& env, int components) const {
  const Value v = evaluate(env);
  if (v.size() == 1) return State::Constant(components, v[0]);
  if (v.size() != components) {
    std::ostringstream msg;
    msg << "expression '" << source_ << "' yields " << v.size() << " values, expected "
        << components;
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
  return State(v);
}

double Expression::evaluate_scalar(const Env& env) const {
  const Value v = evaluate(env);
  if (v.size() != 1) {
    throw Error(ErrorCode::kInvalidArgument, "expression '" + source_ + "' is not a scalar");
  }
  return v[0];
}

bool Expression::uses(std::string_view variable) const {
  std::set<std::string> vars;
  root_->collect(vars);
  return vars.count(std::string(variable)) > 0;
}

}  // namespace ddfem
