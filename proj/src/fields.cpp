#include "anisotrope/fields.hpp"

#include <array>
#include <cctype>
#include <cmath>

namespace anisotrope {

namespace {

// Forward-mode dual number with up to three partials.
struct Dual {
  double v = 0.0;
  std::array<double, 3> d{0.0, 0.0, 0.0};

  static Dual constant(double c) { return {c, {0.0, 0.0, 0.0}}; }
  Dual chain(double value, double slope) const {
    Dual r{value, {}};
    for (int i = 0; i < 3; ++i) r.d[i] = slope * d[i];
    return r;
  }
};

Dual operator+(const Dual& a, const Dual& b) {
  Dual r{a.v + b.v, {}};
  for (int i = 0; i < 3; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}
Dual operator-(const Dual& a, const Dual& b) {
  Dual r{a.v - b.v, {}};
  for (int i = 0; i < 3; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}
Dual operator*(const Dual& a, const Dual& b) {
  Dual r{a.v * b.v, {}};
  for (int i = 0; i < 3; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}
Dual operator/(const Dual& a, const Dual& b) {
  Dual r{a.v / b.v, {}};
  for (int i = 0; i < 3; ++i) r.d[i] = (a.d[i] * b.v - a.v * b.d[i]) / (b.v * b.v);
  return r;
}

bool is_constant(const Dual& a) { return a.d[0] == 0.0 && a.d[1] == 0.0 && a.d[2] == 0.0; }

enum class Op { Number, Variable, Add, Sub, Mul, Div, Pow, Neg, Sqrt, Sin, Cos, Exp, Abs };

}  // namespace

struct Expression::Node {
  Op op = Op::Number;
  double value = 0.0;
  int index = 0;
  std::shared_ptr<const Node> a, b;
  bool exponent_constant = false;  // Pow with a variable-free exponent
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

bool has_variable(const NodePtr& n) {
  if (!n) return false;
  return n->op == Op::Variable || has_variable(n->a) || has_variable(n->b);
}

class Parser {
 public:
  Parser(const std::string& text, const std::map<std::string, double>& params) : s_(text), params_(params) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + s_.substr(pos_, 1) + "'");
    return e;
  }
  int arity() const { return arity_; }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("expression \"" + s_ + "\": " + what + " at position " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr left = term();
    while (true) {
      if (accept('+')) {
        left = make(Op::Add, left, term());
      } else if (accept('-')) {
        left = make(Op::Sub, left, term());
      } else {
        return left;
      }
    }
  }
  NodePtr term() {
    NodePtr left = unary();
    while (true) {
      if (accept('*')) {
        left = make(Op::Mul, left, unary());
      } else if (accept('/')) {
        left = make(Op::Div, left, unary());
      } else {
        return left;
      }
    }
  }
  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) {
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::Pow;
      n->a = base;
      n->b = unary();
      n->exponent_constant = !has_variable(n->b);
      return n;
    }
    return base;
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      auto n = std::make_shared<Expression::Node>();
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      static const std::map<std::string, Op> functions{
          {"sqrt", Op::Sqrt}, {"sin", Op::Sin}, {"cos", Op::Cos}, {"exp", Op::Exp}, {"abs", Op::Abs}};
      if (auto f = functions.find(name); f != functions.end()) {
        if (!accept('(')) fail("expected '(' after " + name);
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return make(f->second, arg);
      }
      auto n = std::make_shared<Expression::Node>();
      if (name == "x" || name == "y" || name == "z") {
        n->op = Op::Variable;
        n->index = name[0] - 'x';
        arity_ = std::max(arity_, n->index + 1);
      } else if (name == "pi") {
        n->value = kPi;
      } else if (auto p = params_.find(name); p != params_.end()) {
        n->value = p->second;
      } else {
        pos_ = start;
        fail("unknown identifier '" + name + "'");
      }
      return n;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  const std::map<std::string, double>& params_;
  std::size_t pos_ = 0;
  int arity_ = 0;
};

double eval(const Expression::Node& n, const Vec& x) {
  switch (n.op) {
    case Op::Number: return n.value;
    case Op::Variable: return n.index < x.size() ? x[n.index] : 0.0;
    case Op::Add: return eval(*n.a, x) + eval(*n.b, x);
    case Op::Sub: return eval(*n.a, x) - eval(*n.b, x);
    case Op::Mul: return eval(*n.a, x) * eval(*n.b, x);
    case Op::Div: return eval(*n.a, x) / eval(*n.b, x);
    case Op::Pow: return std::pow(eval(*n.a, x), eval(*n.b, x));
    case Op::Neg: return -eval(*n.a, x);
    case Op::Sqrt: return std::sqrt(eval(*n.a, x));
    case Op::Sin: return std::sin(eval(*n.a, x));
    case Op::Cos: return std::cos(eval(*n.a, x));
    case Op::Exp: return std::exp(eval(*n.a, x));
    case Op::Abs: return std::abs(eval(*n.a, x));
  }
  return 0.0;
}

Dual eval_dual(const Expression::Node& n, const Vec& x) {
  switch (n.op) {
    case Op::Number: return Dual::constant(n.value);
    case Op::Variable: {
      Dual r = Dual::constant(n.index < x.size() ? x[n.index] : 0.0);
      r.d[n.index] = 1.0;
      return r;
    }
    case Op::Add: return eval_dual(*n.a, x) + eval_dual(*n.b, x);
    case Op::Sub: return eval_dual(*n.a, x) - eval_dual(*n.b, x);
    case Op::Mul: return eval_dual(*n.a, x) * eval_dual(*n.b, x);
    case Op::Div: return eval_dual(*n.a, x) / eval_dual(*n.b, x);
    case Op::Pow: {
      const Dual a = eval_dual(*n.a, x);
      const Dual b = eval_dual(*n.b, x);
      if (n.exponent_constant || is_constant(b)) {
        const double v = std::pow(a.v, b.v);
        // d(a^c) = c a^(c-1) da, written to stay finite at a = 0 for c >= 1.
        const double slope = b.v == 0.0 ? 0.0 : b.v * std::pow(a.v, b.v - 1.0);
        return a.chain(v, slope);
      }
      const double v = std::pow(a.v, b.v);
      Dual r{v, {}};
      for (int i = 0; i < 3; ++i) r.d[i] = v * (b.d[i] * std::log(a.v) + b.v * a.d[i] / a.v);
      return r;
    }
    case Op::Neg: {
      const Dual a = eval_dual(*n.a, x);
      return a.chain(-a.v, -1.0);
    }
    case Op::Sqrt: {
      const Dual a = eval_dual(*n.a, x);
      const double s = std::sqrt(a.v);
      return a.chain(s, 0.5 / s);
    }
    case Op::Sin: {
      const Dual a = eval_dual(*n.a, x);
      return a.chain(std::sin(a.v), std::cos(a.v));
    }
    case Op::Cos: {
      const Dual a = eval_dual(*n.a, x);
      return a.chain(std::cos(a.v), -std::sin(a.v));
    }
    case Op::Exp: {
      const Dual a = eval_dual(*n.a, x);
      const double e = std::exp(a.v);
      return a.chain(e, e);
    }
    case Op::Abs: {
      const Dual a = eval_dual(*n.a, x);
      return a.chain(std::abs(a.v), a.v < 0 ? -1.0 : 1.0);
    }
  }
  return {};
}

}  // namespace

Expression::Expression(const std::string& text, const std::map<std::string, double>& params) : text_(text) {
  Parser p(text_, params);
  root_ = p.parse();
  arity_ = p.arity();
}

double Expression::operator()(const Vec& x) const { return eval(*root_, x); }

double Expression::evaluate(const Vec& x, Vec* gradient) const {
  if (x.size() > 3) throw DimensionError("expressions take at most three coordinates");
  const Dual r = eval_dual(*root_, x);
  if (gradient) {
    gradient->resize(x.size());
    for (int i = 0; i < x.size(); ++i) (*gradient)[i] = r.d[i];
  }
  return r.v;
}

Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double rel_step) {
  const Vec f0 = f(x);
  Mat j(f0.size(), x.size());
  for (int i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x[i]));
    auto diff = [&](double step) {
      Vec xp = x, xm = x;
      xp[i] += step;
      xm[i] -= step;
      return Vec((f(xp) - f(xm)) / (2.0 * step));
    };
    j.col(i) = (4.0 * diff(0.5 * h) - diff(h)) / 3.0;
  }
  return j;
}

Vec ScalarField::grad(const Vec& x) const {
  if (gradient) return (*gradient)(x);
  const Functional f = value;
  return fd_jacobian([&f](const Vec& p) { return Vec::Constant(1, f(p)); }, x).row(0).transpose();
}

ScalarField ScalarField::constant(int dim, double c) {
  ScalarField f;
  f.dim = dim;
  f.value = [c](const Vec&) { return c; };
  f.gradient = [dim](const Vec&) -> Vec { return Vec::Zero(dim); };
  f.name = std::to_string(c);
  return f;
}

ScalarField ScalarField::from_expression(int dim, const std::string& text, const std::map<std::string, double>& params) {
  auto e = std::make_shared<Expression>(text, params);
  if (e->arity() > dim) throw ParseError("expression \"" + text + "\" uses more than " + std::to_string(dim) + " coordinates");
  ScalarField f;
  f.dim = dim;
  f.value = [e](const Vec& x) { return (*e)(x); };
  f.gradient = [e](const Vec& x) -> Vec {
    Vec g;
    e->evaluate(x, &g);
    return g;
  };
  f.name = text;
  return f;
}

Mat Map::differential(const Vec& x) const {
  if (jacobian) return (*jacobian)(x);
  return fd_jacobian(value, x);
}

Map Map::identity(int dim) {
  Map m;
  m.in = m.out = dim;
  m.value = [](const Vec& x) { return x; };
  m.jacobian = [dim](const Vec&) -> Mat { return Mat::Identity(dim, dim); };
  m.name = "identity";
  return m;
}

Map Map::linear(const Mat& a) {
  Map m;
  m.in = static_cast<int>(a.cols());
  m.out = static_cast<int>(a.rows());
  m.value = [a](const Vec& x) -> Vec { return a * x; };
  m.jacobian = [a](const Vec&) -> Mat { return a; };
  m.name = "linear";
  return m;
}

Map Map::from_expressions(int in, const std::vector<std::string>& components,
                          const std::map<std::string, double>& params) {
  std::vector<std::shared_ptr<Expression>> parts;
  for (const auto& c : components) {
    parts.push_back(std::make_shared<Expression>(c, params));
    if (parts.back()->arity() > in) {
      throw ParseError("expression \"" + c + "\" uses more than " + std::to_string(in) + " coordinates");
    }
  }
  Map m;
  m.in = in;
  m.out = static_cast<int>(parts.size());
  m.value = [parts](const Vec& x) -> Vec {
    Vec y(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) y[static_cast<Eigen::Index>(i)] = (*parts[i])(x);
    return y;
  };
  m.jacobian = [parts, in](const Vec& x) -> Mat {
    Mat j(static_cast<Eigen::Index>(parts.size()), in);
    Vec g;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      parts[i]->evaluate(x, &g);
      j.row(static_cast<Eigen::Index>(i)) = g.transpose();
    }
    return j;
  };
  for (const auto& c : components) m.name += (m.name.empty() ? "(" : ", ") + c;
  m.name += ")";
  return m;
}

void check_differential(const Map& m, const std::vector<Vec>& probes, double rel_tol) {
  for (const Vec& p : probes) {
    const Mat analytic = m.differential(p);
    const Mat numeric = fd_jacobian(m.value, p);
    const double scale = std::max(1.0, numeric.norm());
    if ((analytic - numeric).norm() > rel_tol * scale) {
      throw DomainError("differential of " + m.name + " disagrees with finite differences");
    }
  }
}

void check_gradient(const ScalarField& f, const std::vector<Vec>& probes, double rel_tol) {
  Map m;
  m.in = f.dim;
  m.out = 1;
  const Functional v = f.value;
  m.value = [v](const Vec& x) { return Vec::Constant(1, v(x)); };
  if (f.gradient) {
    const auto g = *f.gradient;
    m.jacobian = [g](const Vec& x) -> Mat { return g(x).transpose(); };
  }
  m.name = f.name;
  check_differential(m, probes, rel_tol);
}

}  // namespace anisotrope
