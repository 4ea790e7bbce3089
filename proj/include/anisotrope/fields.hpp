#pragma once

// Scalar fields, vector fields and smooth maps, given either as callables
// or as arithmetic expressions in the coordinates x, y, z.

#include "anisotrope/common.hpp"

#include <map>
#include <memory>
#include <optional>

namespace anisotrope {

/// Parsed arithmetic expression: + - * / ^, unary minus, parentheses,
/// sqrt sin cos exp abs, the constant pi, and named parameters.  Variables
/// are x, y, z (coordinates 0, 1, 2).  Gradients use forward-mode dual
/// numbers, so they are exact up to rounding.
class Expression {
 public:
  struct Node;

  /// Throws ParseError naming the offending token.
  explicit Expression(const std::string& text, const std::map<std::string, double>& params = {});

  const std::string& text() const { return text_; }
  /// Highest coordinate index used, plus one.
  int arity() const { return arity_; }

  double operator()(const Vec& x) const;
  /// Value and gradient at x (x.size() <= 3).
  double evaluate(const Vec& x, Vec* gradient) const;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
  int arity_ = 0;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Central differences with steps h and h/2 combined by Richardson
/// extrapolation; h = 1e-6 * max(1, |x_i|).
Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double rel_step = 1e-6);

struct ScalarField {
  int dim = 0;
  Functional value;
  std::optional<std::function<Vec(const Vec&)>> gradient;
  std::string name;

  double operator()(const Vec& x) const { return value(x); }
  Vec grad(const Vec& x) const;

  static ScalarField constant(int dim, double c);
  static ScalarField from_expression(int dim, const std::string& text,
                                     const std::map<std::string, double>& params = {});
};

/// Smooth map R^in -> R^out with an analytic or finite-difference jacobian.
struct Map {
  int in = 0;
  int out = 0;
  std::function<Vec(const Vec&)> value;
  std::optional<std::function<Mat(const Vec&)>> jacobian;
  std::string name;

  Vec operator()(const Vec& x) const { return value(x); }
  Mat differential(const Vec& x) const;

  static Map identity(int dim);
  static Map linear(const Mat& a);
  /// One expression per output component.
  static Map from_expressions(int in, const std::vector<std::string>& components,
                              const std::map<std::string, double>& params = {});
};

/// Vector fields on R^n are maps R^n -> R^n.
using VectorField = Map;

/// Compares the field's differential with finite differences at `probes`;
/// throws DomainError beyond `rel_tol`.
void check_differential(const Map& m, const std::vector<Vec>& probes, double rel_tol = 1e-5);
void check_gradient(const ScalarField& f, const std::vector<Vec>& probes, double rel_tol = 1e-5);

}  // namespace anisotrope
