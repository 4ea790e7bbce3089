#include "spec.hpp"

#include <random>

namespace anisotrope::cli {

Node::Node(const json& j, std::string path)
    : j_(&j), path_(std::move(path)), used_(std::make_shared<std::set<std::string>>()) {}

namespace {

std::string child(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

}  // namespace

void Node::fail(const std::string& message) const {
  throw ConfigError(path_.empty() ? message : path_ + ": " + message);
}

bool Node::has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

Node Node::at(const std::string& key) const {
  if (!j_->is_object()) fail("expected an object");
  auto it = j_->find(key);
  if (it == j_->end()) throw ConfigError(child(path_, key) + ": missing required key");
  used_->insert(key);
  return Node(*it, child(path_, key));
}

std::optional<Node> Node::find(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return at(key);
}

Node Node::element(std::size_t i) const {
  if (!j_->is_array() || i >= j_->size()) fail("expected an array with an element " + std::to_string(i));
  return Node((*j_)[i], path_ + "[" + std::to_string(i) + "]");
}

std::size_t Node::size() const {
  if (!j_->is_array()) fail("expected an array");
  return j_->size();
}

double Node::number() const {
  if (j_->is_number()) return j_->get<double>();
  if (j_->is_string()) {
    // Constant expressions such as "2*pi".
    const std::string text = j_->get<std::string>();
    const Expression e = guarded(*this, [&] { return Expression(text); });
    if (e.arity() > 0) fail("constant expression \"" + text + "\" uses coordinates");
    return e(Vec::Zero(3));
  }
  fail("expected a number");
}

double Node::number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

std::int64_t Node::integer() const {
  if (!j_->is_number_integer()) fail("expected an integer");
  return j_->get<std::int64_t>();
}

std::int64_t Node::integer(const std::string& key, std::int64_t fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::string Node::string() const {
  if (!j_->is_string()) fail("expected a string");
  return j_->get<std::string>();
}

std::string Node::string(const std::string& key, const std::string& fallback) const {
  return has(key) ? string(key) : fallback;
}

bool Node::boolean(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const Node n = at(key);
  if (!n.raw().is_boolean()) n.fail("expected true or false");
  return n.raw().get<bool>();
}

std::vector<double> Node::numbers() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < size(); ++i) out.push_back(element(i).number());
  return out;
}

std::vector<std::string> Node::strings() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < size(); ++i) out.push_back(element(i).string());
  return out;
}

void Node::done() const {
  if (!j_->is_object()) return;
  for (auto it = j_->begin(); it != j_->end(); ++it) {
    if (!used_->count(it.key())) throw ConfigError(child(path_, it.key()) + ": unknown key");
  }
}

Mat parse_matrix(const Node& n) {
  const std::size_t rows = n.size();
  if (rows == 0) n.fail("empty matrix");
  const std::size_t cols = n.element(0).size();
  Mat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto row = n.element(i).numbers();
    if (row.size() != cols) n.element(i).fail("rows differ in length");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = row[j];
  }
  return m;
}

Box parse_box(const Node& n) {
  Box b;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const auto ends = n.element(i).numbers();
    if (ends.size() != 2 || !(ends[1] > ends[0])) n.element(i).fail("expected [lo, hi] with lo < hi");
    b.axes.push_back({ends[0], ends[1]});
  }
  if (b.axes.empty()) n.fail("empty box");
  return b;
}

std::map<std::string, double> parse_params(const Node& parent) {
  std::map<std::string, double> out;
  if (auto p = parent.find("params")) {
    if (!p->is_object()) p->fail("expected an object of numbers");
    for (auto it = p->raw().begin(); it != p->raw().end(); ++it) out[it.key()] = p->number(it.key());
  }
  return out;
}

SupportFunction parse_support(const Node& n) {
  if (n.is_string()) {
    const std::string f = n.string();
    if (f == "euclidean") return euclidean_support(2);
    if (f == "square") return square_support(2);
    n.fail("unknown shape family '" + f + "'");
  }
  const std::string family = n.string("family");
  SupportFunction s;
  guarded(n, [&] {
    if (family == "euclidean") {
      s = euclidean_support(static_cast<int>(n.integer("dim", 2)));
    } else if (family == "ellipse") {
      s = ellipse_support(n.numbers("axes"));
    } else if (family == "pnorm") {
      s = pnorm_support(static_cast<int>(n.integer("dim", 2)), n.number("p"));
    } else if (family == "smoothed-square") {
      // The l^p unit ball for large p: a square with rounded corners.
      s = pnorm_support(static_cast<int>(n.integer("dim", 2)), n.number("p", 8.0));
      s.name = "smoothed-square";
    } else if (family == "square") {
      s = square_support(static_cast<int>(n.integer("dim", 2)));
    } else if (family == "trig") {
      s = planar_support(trig_profile(n.number("c0", 1.0), n.numbers("a"), n.numbers("b")), "trig-body");
    } else if (family == "random") {
      std::mt19937_64 rng(static_cast<std::uint64_t>(n.integer("seed")));
      s = random_planar_body(rng, n.number("c0", 1.0));
    } else if (family == "custom") {
      s = custom_support(n.numbers("values"));
    } else {
      throw ConfigError(n.path() + ".family: unknown shape family '" + family + "'");
    }
    if (auto c = n.find("center")) {
      const auto v = c->numbers();
      s = translated_support(s, Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
  });
  if (auto name = n.find("name")) s.name = name->string();
  n.done();
  return s;
}

Norm parse_norm(const Node& n, int dim) {
  if (n.is_string()) {
    const std::string f = n.string();
    if (f == "euclidean") return euclidean_norm(dim);
    if (f == "l1") return l1_norm(dim);
    if (f == "linf") return linf_norm(dim);
    n.fail("unknown norm '" + f + "'");
  }
  const std::string family = n.string("family");
  Norm out;
  if (family == "lp") {
    out = guarded(n, [&] { return lp_norm(dim, n.number("p")); });
  } else if (family == "linear") {
    const Mat m = parse_matrix(n.at("matrix"));
    if (m.rows() != dim || m.cols() != dim) n.fail("matrix must be " + std::to_string(dim) + " x " + std::to_string(dim));
    out = guarded(n, [&] { return linear_norm(m, parse_norm(n.at("base"), dim)); });
  } else {
    throw ConfigError(n.path() + ".family: unknown norm family '" + family + "'");
  }
  n.done();
  return out;
}

DensitySpec parse_density(const Node& n) {
  const std::string kind = n.string("kind");
  DensitySpec d;
  std::function<Density(const MCConfig&)> base;
  if (kind == "euclidean") {
    d.degree = static_cast<int>(n.integer("k"));
    d.ambient = static_cast<int>(n.integer("n"));
    if (d.degree < 0 || d.degree > d.ambient) n.fail("needs 0 <= k <= n");
    base = [k = d.degree, m = d.ambient](const MCConfig&) { return euclidean_density(k, m); };
  } else if (kind == "lebesgue") {
    d.degree = d.ambient = static_cast<int>(n.integer("n"));
    const double c = n.number("scale", 1.0);
    if (!(c > 0.0)) n.fail("scale must be positive");
    base = [m = d.ambient, c](const MCConfig&) { return scaled_lebesgue(m, c); };
  } else if (kind == "busemann" || kind == "holmes-thompson") {
    d.degree = d.ambient = static_cast<int>(n.integer("n"));
    const Norm norm = parse_norm(n.at("norm"), d.ambient);
    const bool bus = kind == "busemann";
    base = [norm, bus](const MCConfig& mc) { return bus ? busemann_density(norm, mc) : holmes_thompson_density(norm, mc); };
  } else if (kind == "wulff") {
    const SupportFunction s = parse_support(n.at("shape"));
    d.ambient = s.dim;
    d.degree = s.dim - 1;
    base = [s](const MCConfig& mc) { return wulff_integrand(WulffShape(s, mc), VolumeForm{s.dim, 1.0}); };
  } else if (kind == "grassmann-lp") {
    d.degree = static_cast<int>(n.integer("k"));
    d.ambient = static_cast<int>(n.integer("n"));
    const double p = n.has("p") && n.at("p").raw() == "inf" ? std::numeric_limits<double>::infinity() : n.number("p");
    base = [k = d.degree, m = d.ambient, p](const MCConfig&) { return grassmann_lp_density(k, m, p); };
  } else if (kind == "linear-image") {
    d.degree = static_cast<int>(n.integer("k"));
    const Mat m = parse_matrix(n.at("matrix"));
    d.ambient = static_cast<int>(m.rows());
    if (m.cols() != m.rows() || std::abs(m.determinant()) < 1e-12) n.fail("matrix must be square and invertible");
    base = [k = d.degree, m](const MCConfig&) { return linear_image_density(k, m); };
  } else {
    throw ConfigError(n.path() + ".kind: unknown density kind '" + kind + "'");
  }
  if (auto w = n.find("weight")) {
    const ScalarField weight = guarded(*w, [&] {
      return ScalarField::from_expression(d.ambient, w->string(), parse_params(n));
    });
    d.make = [base, weight](const MCConfig& mc) { return DensityField::weighted(base(mc), weight); };
  } else {
    d.make = [base](const MCConfig& mc) { return DensityField(base(mc)); };
  }
  n.done();
  return d;
}

Map parse_map(const Node& n, int in) {
  if (n.is_array()) {
    const auto comps = n.strings();
    return guarded(n, [&] { return Map::from_expressions(in, comps); });
  }
  const int dim = static_cast<int>(n.integer("in", in));
  const auto comps = n.at("components").strings();
  const auto params = parse_params(n);
  n.done();
  return guarded(n, [&] { return Map::from_expressions(dim, comps, params); });
}

PatchSpec parse_patch(const Node& n, const std::vector<std::string>& free_params) {
  const std::string type = n.string("type");
  PatchSpec spec;
  const auto fixed = parse_params(n);
  std::function<Patch(const std::map<std::string, double>&)> make;
  if (type == "circle") {
    const double r = n.number("radius", 1.0);
    Vec c = Vec::Zero(2);
    if (auto cn = n.find("center")) {
      const auto v = cn->numbers();
      if (v.size() != 2) cn->fail("expected two coordinates");
      c << v[0], v[1];
    }
    if (!(r > 0.0)) n.fail("radius must be positive");
    make = [r, c](const auto&) { return circle_patch(r, c); };
    spec.closed = true;
  } else if (type == "ellipse") {
    const double a = n.number("a"), b = n.number("b");
    if (!(a > 0.0 && b > 0.0)) n.fail("semi-axes must be positive");
    make = [a, b](const auto&) { return ellipse_patch(a, b); };
    spec.closed = true;
  } else if (type == "sphere") {
    const double r = n.number("radius", 1.0);
    make = [r](const auto&) { return sphere_patch(r); };
    spec.closed = true;
  } else if (type == "polar") {
    const double r0 = n.number("r0"), r1 = n.number("r1");
    const double t0 = n.number("t0", 0.0), t1 = n.number("t1", 2.0 * kPi);
    guarded(n, [&] { polar_patch(r0, r1, t0, t1); });
    make = [=](const auto&) { return polar_patch(r0, r1, t0, t1); };
  } else if (type == "box") {
    const Box b = parse_box(n.at("domain"));
    make = [b](const auto&) { return box_patch(b); };
  } else if (type == "boundary") {
    const SupportFunction s = parse_support(n.at("shape"));
    const double scale = n.number("scale", 1.0);
    guarded(n, [&] { convex_boundary_patch(s, scale); });
    make = [s, scale](const auto&) { return convex_boundary_patch(s, scale); };
    spec.closed = true;
  } else if (type == "graph" || type == "chart") {
    const Box domain = type == "graph" ? parse_box(n.at("range")) : parse_box(n.at("domain"));
    const std::vector<std::string> comps =
        type == "graph" ? std::vector<std::string>{"x", n.string("f")} : n.at("chart").strings();
    const int in = domain.dim();
    auto build = [domain, comps, fixed, in, type](const std::map<std::string, double>& extra) {
      auto params = fixed;
      params.insert(extra.begin(), extra.end());
      Patch p;
      p.domain = domain;
      p.chart = Map::from_expressions(in, comps, params);
      p.name = type;
      return p;
    };
    std::map<std::string, double> probe;
    for (const auto& name : free_params) probe[name] = 0.0;
    guarded(n, [&] { build(probe); });
    make = build;
  } else {
    throw ConfigError(n.path() + ".type: unknown patch type '" + type + "'");
  }
  std::vector<int> panels;
  if (auto p = n.find("panels")) {
    for (double v : p->numbers()) panels.push_back(static_cast<int>(v));
  }
  const int orientation = static_cast<int>(n.integer("orientation", 1));
  if (orientation != 1 && orientation != -1) n.at("orientation").fail("expected 1 or -1");
  spec.closed = n.boolean("closed", spec.closed);
  n.done();
  spec.make = [make, panels, orientation](const std::map<std::string, double>& extra) {
    Patch p = make(extra);
    if (!panels.empty()) p.panels = panels;
    p.orientation = orientation;
    return p;
  };
  const Patch probe = guarded(n, [&] {
    std::map<std::string, double> zero;
    for (const auto& name : free_params) zero[name] = 0.0;
    return spec.make(zero);
  });
  if (!panels.empty() && static_cast<int>(panels.size()) != probe.dim()) n.fail("one panel count per axis");
  return spec;
}

Hypersurface parse_surface(const Node& n) {
  const PatchSpec spec = parse_patch(n);
  Hypersurface s = single_patch_surface(spec.make({}), spec.closed);
  if (s.patches.front().dim() != s.ambient() - 1) n.fail("not a hypersurface");
  return s;
}

}  // namespace anisotrope::cli
