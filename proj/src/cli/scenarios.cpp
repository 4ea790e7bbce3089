#include "scenarios.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace anisotrope::cli {

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

MCConfig sub(const MCConfig& mc, std::uint64_t stream) { return mc.with_seed(derive_seed(mc.seed, stream)); }

Check summary_check(const IdentitySummary& s, const std::string& name, double tol) {
  Check c = make_check(name, s.worst.tag, s.worst.lhs, s.worst.rhs, s.max_residual, tol);
  c.pass = c.pass && s.failures == 0;
  std::ostringstream note;
  note << s.instances << " random instances, " << s.failures << " failures";
  if (!s.worst.note.empty()) note << "; worst: " << s.worst.note;
  c.note = note.str();
  return c;
}

std::vector<SupportFunction> parse_shapes(const Node& n, const std::string& one, const std::string& many) {
  std::vector<SupportFunction> out;
  if (!one.empty()) {
    if (auto s = n.find(one)) out.push_back(parse_support(*s));
  }
  if (auto list = n.find(many)) {
    for (std::size_t i = 0; i < list->size(); ++i) out.push_back(parse_support(list->element(i)));
  }
  return out;
}

SupportFunction planar_shape(const Node& n, const std::string& key) {
  const SupportFunction s = parse_support(n.at(key));
  if (s.dim != 2) n.at(key).fail("this scenario kind is planar");
  return s;
}

std::vector<double> radii(const Node& n, const std::string& key) {
  const Node list = n.at(key);
  if (list.size() == 0) list.fail("empty grid");
  const auto v = list.numbers();
  for (double e : v) {
    if (!(e > 0.0)) list.fail("radii must be positive");
  }
  return v;
}

struct Oracle {
  std::optional<Expression> outer, full;
};

// ----------------------------------------------------------------------------

Runner identities(const Node& n) {
  const int count = static_cast<int>(n.integer("count", 1000));
  const int codensity = static_cast<int>(n.integer("codensity_count", 500));
  const int max_dim = static_cast<int>(n.integer("max_dim", 5));
  const std::string which = n.string("identities", "abcde");
  const double tol = n.number("tolerance", 1e-9);
  for (char c : which) {
    if (c < 'a' || c > 'e') n.at("identities").fail(std::string("unknown identity '") + c + "'");
  }
  if (count < 1 || max_dim < 2 || max_dim > 6) n.fail("needs count >= 1 and 2 <= max_dim <= 6");
  return [=](const MCConfig& mc, ScenarioReport& r) {
    for (char c : which) {
      const auto s = verify_identities(c, count, mc.seed, max_dim, tol);
      r.checks.push_back(summary_check(s, std::string("identity (") + c + ")", tol));
    }
    if (codensity > 0) {
      r.checks.push_back(summary_check(verify_codensities('w', codensity, mc.seed, max_dim, tol),
                                       "codensity completion independence", tol));
      r.checks.push_back(
          summary_check(verify_codensities('h', codensity, mc.seed, max_dim, tol), "codensity Hodge route", tol));
    }
  };
}

Runner jacobian_constants(const Node& n) {
  const int dim = static_cast<int>(n.integer("n", 2));
  const Norm norm = parse_norm(n.at("norm"), dim);
  const double sigmas = n.number("sigmas", 3.0);
  std::optional<double> bus, ht;
  if (auto e = n.find("expect")) {
    bus = e->has("busemann") ? std::optional(e->number("busemann")) : std::nullopt;
    ht = e->has("holmes-thompson") ? std::optional(e->number("holmes-thompson")) : std::nullopt;
    e->done();
  }
  if (!bus && !ht) n.fail("expect needs a busemann or holmes-thompson value");
  std::vector<Mat> maps;
  if (auto m = n.find("maps")) {
    for (std::size_t i = 0; i < m->size(); ++i) {
      maps.push_back(parse_matrix(m->element(i)));
      if (maps.back().rows() != dim || maps.back().cols() != dim) m->element(i).fail("expected a square map of size n");
    }
  }
  return [=](const MCConfig& mc, ScenarioReport& r) {
    auto add = [&](const Density& d, double expected, const std::string& name, const std::string& tag) {
      const Estimate c = *d.constant();
      r.checks.push_back(sigma_check(name, tag, c.value, expected, c.std_error, sigmas));
      r.checks.back().note = "norm " + norm.name + " on R^" + std::to_string(dim);
      for (std::size_t i = 0; i < maps.size(); ++i) {
        const double j = jacobian(maps[i], d, d);
        r.checks.push_back(relative_check(name + " jacobian of map " + std::to_string(i), "J(A; mu, mu) = |det A|", j,
                                          std::abs(maps[i].determinant()), 1e-12));
      }
    };
    if (bus) add(busemann_density(norm, sub(mc, 1)), *bus, "Busemann constant", "mu_B = eps_n / vol(B)");
    if (ht) add(holmes_thompson_density(norm, sub(mc, 2)), *ht, "Holmes-Thompson constant", "mu_HT = vol(B*) / eps_n");
  };
}

Runner kjacobian(const Node& n) {
  std::vector<Mat> maps;
  if (auto m = n.find("maps")) {
    for (std::size_t i = 0; i < m->size(); ++i) {
      maps.push_back(parse_matrix(m->element(i)));
      if (maps.back().rows() != maps.back().cols()) m->element(i).fail("expected a square map");
    }
  }
  int random_count = 0;
  std::vector<int> random_dims;
  std::uint64_t map_seed = 1;
  if (auto rnd = n.find("random")) {
    random_count = static_cast<int>(rnd->integer("count"));
    for (double d : rnd->numbers("dims")) random_dims.push_back(static_cast<int>(d));
    map_seed = static_cast<std::uint64_t>(rnd->integer("seed", 1));
    rnd->done();
    if (random_dims.empty()) rnd->at("dims").fail("empty list");
  }
  const Node norms_node = n.at("norms");
  if (norms_node.size() == 0) norms_node.fail("empty list");
  // Norms are parsed per dimension when maps of several sizes share them.
  std::map<int, std::vector<Norm>> norms;
  auto norms_for = [&](int dim) {
    if (!norms.count(dim)) {
      for (std::size_t i = 0; i < norms_node.size(); ++i) norms[dim].push_back(parse_norm(norms_node.element(i), dim));
    }
  };
  std::mt19937_64 rng(map_seed);
  for (int i = 0; i < random_count; ++i) {
    const int dim = random_dims[static_cast<std::size_t>(i) % random_dims.size()];
    maps.push_back(random_matrix(dim, dim, rng));
  }
  if (maps.empty()) n.fail("needs maps or random");
  for (const Mat& m : maps) norms_for(static_cast<int>(m.rows()));
  const double sigmas = n.number("sigmas", 3.0);
  return [=](const MCConfig& mc, ScenarioReport& r) {
    for (std::size_t i = 0; i < maps.size(); ++i) {
      const Mat& a = maps[i];
      const auto& list = norms.at(static_cast<int>(a.rows()));
      const Norm& dom = list[i % list.size()];
      const Norm& ran = list[(i + 1) % list.size()];
      const Estimate k = k_jacobian(a, dom, ran, sub(mc, 3 * i));
      const Estimate b =
          busemann_jacobian(a, busemann_density(dom, sub(mc, 3 * i + 1)), busemann_density(ran, sub(mc, 3 * i + 2)));
      std::ostringstream name;
      name << "K-jacobian map " << i << " (" << a.rows() << "x" << a.cols() << ", " << dom.name << " -> " << ran.name
           << ")";
      r.checks.push_back(sigma_check(name.str(), "J_K(A) = J(A; mu_B, mu_B)", k.value, b.value,
                                     std::hypot(k.std_error, b.std_error), sigmas));
    }
  };
}

Runner change_of_variables(const Node& n) {
  const std::string mode = n.string("mode", "change-of-variables");
  const double tol = n.number("tolerance", 1e-6);
  if (mode == "change-of-variables") {
    const Box domain = parse_box(n.at("domain"));
    const Map phi = parse_map(n.at("map"), domain.dim());
    const DensitySpec f = parse_density(n.at("source"));
    const DensitySpec g = parse_density(n.at("target"));
    if (f.degree != domain.dim() || f.ambient != domain.dim()) n.at("source").fail("needs a top density on the domain");
    if (g.degree != domain.dim() || g.ambient != phi.out) n.at("target").fail("degree or ambient dimension mismatch");
    const ScalarField weight = guarded(n, [&] { return ScalarField::from_expression(phi.out, n.string("weight", "1")); });
    const PatchSpec image = parse_patch(n.at("image"));
    return [=](const MCConfig& mc, ScenarioReport& r) {
      r.checks.push_back(
          change_of_variables_check(phi, domain, f.make(sub(mc, 1)), g.make(sub(mc, 2)), weight, image.make({}), tol));
    };
  }
  if (mode != "fubini") n.at("mode").fail("expected change-of-variables or fubini");
  const PatchSpec total = parse_patch(n.at("total"));
  const PatchSpec base = parse_patch(n.at("base"));
  const int ambient = total.make({}).ambient();
  const Map pi = parse_map(n.at("map"), ambient);
  const DensitySpec mu = parse_density(n.at("density"));
  if (mu.degree != ambient || mu.ambient != ambient) n.at("density").fail("needs a top density");
  const PatchSpec fibers = parse_patch(n.at("fibers"), {"b0", "b1", "b2"});
  return [=](const MCConfig& mc, ScenarioReport& r) {
    FiberFamily family = [fibers](const Vec& y) {
      std::map<std::string, double> params;
      for (int i = 0; i < y.size(); ++i) params["b" + std::to_string(i)] = y[i];
      return fibers.make(params);
    };
    r.checks.push_back(fubini_check(pi, mu.make(sub(mc, 1)), total.make({}), base.make({}), family, tol));
  };
}

Runner coarea(const Node& n) {
  const PatchSpec region = parse_patch(n.at("region"));
  const int ambient = region.make({}).ambient();
  const Map pi = parse_map(n.at("map"), ambient);
  const DensitySpec mu = parse_density(n.at("mu"));
  const DensitySpec f = parse_density(n.at("f"));
  const DensitySpec lambda = parse_density(n.at("lambda"));
  if (mu.degree != ambient || mu.ambient != ambient) n.at("mu").fail("needs a top density on the region");
  if (f.degree != ambient - pi.out || f.ambient != ambient) n.at("f").fail("needs degree ambient - codomain");
  if (lambda.degree != pi.out || lambda.ambient != pi.out) n.at("lambda").fail("needs a top density on the codomain");
  const PatchSpec base = parse_patch(n.at("base"));
  const PatchSpec level = parse_patch(n.at("level_set"), {"b0", "b1", "b2"});
  const ScalarField g = guarded(n, [&] { return ScalarField::from_expression(ambient, n.string("weight", "1")); });
  const double tol = n.number("tolerance", 1e-6);
  return [=](const MCConfig& mc, ScenarioReport& r) {
    CoareaProblem p;
    p.pi = pi;
    p.region = region.make({});
    p.mu = mu.make(sub(mc, 1));
    p.f = f.make(sub(mc, 2));
    p.lambda = lambda.make(sub(mc, 3)).at(Vec::Zero(pi.out));
    p.base = base.make({});
    p.level_set = [level](const Vec& y) {
      std::map<std::string, double> params;
      for (int i = 0; i < y.size(); ++i) params["b" + std::to_string(i)] = y[i];
      return level.make(params);
    };
    p.g = g;
    r.checks.push_back(coarea_check(p, tol));
  };
}

Runner area(const Node& n) {
  const Box domain = parse_box(n.at("domain"));
  const Map f = parse_map(n.at("map"), domain.dim());
  const DensitySpec src = parse_density(n.at("source"));
  const DensitySpec dst = parse_density(n.at("target"));
  if (src.degree != domain.dim() || src.ambient != domain.dim()) n.at("source").fail("needs a top density on the domain");
  if (dst.degree != domain.dim() || dst.ambient != f.out) n.at("target").fail("degree or ambient dimension mismatch");
  std::vector<std::pair<PatchSpec, int>> image;
  const Node list = n.at("image");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Node piece = list.element(i);
    image.emplace_back(parse_patch(piece.at("patch")), static_cast<int>(piece.integer("multiplicity", 1)));
    piece.done();
  }
  QuadratureOptions opts;
  if (auto p = n.find("panels")) {
    for (double v : p->numbers()) opts.panels.push_back(static_cast<int>(v));
  }
  const double tol = n.number("tolerance", 1e-6);
  return [=](const MCConfig& mc, ScenarioReport& r) {
    std::vector<ImagePiece> pieces;
    for (const auto& [spec, mult] : image) pieces.push_back({spec.make({}), mult});
    r.checks.push_back(area_check(f, domain, src.make(sub(mc, 1)), dst.make(sub(mc, 2)), pieces, tol, opts));
  };
}

Runner minkowski(const Node& n) {
  const auto bodies = parse_shapes(n, "body", "bodies");
  std::vector<Hypersurface> curves;
  if (auto b = n.find("boundaries")) {
    for (std::size_t i = 0; i < b->size(); ++i) curves.push_back(parse_surface(b->element(i)));
  }
  const auto wulffs = parse_shapes(n, "wulff", "wulffs");
  if (bodies.empty() && curves.empty()) n.fail("needs body, bodies or boundaries");
  if (wulffs.empty()) n.fail("needs wulff or wulffs");
  const double t0 = n.number("t0", 0.2);
  const double tol = n.number("tolerance", 1e-2);
  if (!(t0 > 0.0)) n.at("t0").fail("must be positive");
  return [=](const MCConfig& mc, ScenarioReport& r) {
    r.curve_header = {"pair", "t", "gain", "gain_stderr", "slope", "slope_stderr"};
    std::uint64_t stream = 1000;
    for (std::size_t j = 0; j < wulffs.size(); ++j) {
      const WulffShape w(wulffs[j], sub(mc, j));
      auto record = [&](MinkowskiResult m, const std::string& body) {
        const std::string pair = body + " / " + w.name();
        m.check.name = "Minkowski content " + pair;
        r.checks.push_back(m.check);
        for (std::size_t k = 0; k < m.t.size(); ++k) {
          r.curve.push_back({pair, fmt(m.t[k]), fmt(m.gain[k].value), fmt(m.gain[k].std_error), fmt(m.slope[k]),
                             fmt(m.slope_error[k])});
        }
        r.curve.push_back({pair, "0", "", "", fmt(m.extrapolated), fmt(m.extrapolated_error)});
        r.diagnostics.emplace_back("area " + pair, m.area);
      };
      for (std::size_t i = 0; i < bodies.size(); ++i) {
        record(minkowski_content(bodies[i], w, t0, sub(mc, stream++), tol), bodies[i].name + "#" + std::to_string(i));
      }
      for (std::size_t i = 0; i < curves.size(); ++i) {
        record(minkowski_content(curves[i], w, t0, sub(mc, stream++), tol),
               curves[i].patches.front().name + "#" + std::to_string(i));
      }
    }
  };
}

Runner tube(const Node& n) {
  const Hypersurface surface = parse_surface(n.at("surface"));
  if (surface.ambient() != 2) n.at("surface").fail("tube volumes are planar");
  const SupportFunction wulff = planar_shape(n, "wulff");
  const std::vector<double> eps = radii(n, "eps");
  const std::string side_name = n.string("side", "both");
  TubeSide side = TubeSide::Both;
  if (side_name == "outer") {
    side = TubeSide::Outer;
  } else if (side_name == "full") {
    side = TubeSide::Full;
  } else if (side_name != "both") {
    n.at("side").fail("expected outer, full or both");
  }
  // Closed forms in the variable x = eps, checked against the formula side.
  Oracle oracle;
  double oracle_tol = 1e-8;
  if (auto o = n.find("oracle")) {
    guarded(*o, [&] {
      if (o->has("outer")) oracle.outer.emplace(o->string("outer"));
      if (o->has("full")) oracle.full.emplace(o->string("full"));
    });
    oracle_tol = o->number("tolerance", 1e-8);
    o->done();
  }
  const double sigmas = n.number("sigmas", 3.0);
  return [=](const MCConfig& mc, ScenarioReport& r) {
    const WulffShape w(wulff, sub(mc, 1));
    const auto results = tube_volume(surface, w, eps, sub(mc, 2), side);
    r.curve_header = {"side", "eps", "formula", "mc", "mc_stderr"};
    for (const auto& t : results) {
      Check c = t.check;
      if (sigmas != 3.0) c = sigma_check(c.name, c.tag, c.lhs, c.rhs, t.mc.std_error, sigmas);
      c.note = t.check.note;
      r.checks.push_back(c);
      r.curve.push_back({t.full ? "full" : "outer", fmt(t.epsilon), fmt(t.formula), fmt(t.mc.value), fmt(t.mc.std_error)});
      const auto& closed = t.full ? oracle.full : oracle.outer;
      if (closed) {
        const double expect = (*closed)(Vec::Constant(1, t.epsilon));
        r.checks.push_back(relative_check(std::string(t.full ? "full" : "outer") + " tube closed form eps=" + fmt(t.epsilon),
                                          "curvature-integral polynomial = classical tube volume", t.formula, expect,
                                          oracle_tol));
      }
    }
    if (!results.empty()) r.diagnostics.emplace_back("injectivity bound", results.front().epsilon_max);
  };
}

Runner isoperimetric(const Node& n) {
  const SupportFunction wulff = planar_shape(n, "wulff");
  std::vector<SupportFunction> bodies = parse_shapes(n, "body", "bodies");
  if (auto rnd = n.find("random_bodies")) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(rnd->integer("seed", 1)));
    const int count = static_cast<int>(rnd->integer("count"));
    for (int i = 0; i < count; ++i) bodies.push_back(random_planar_body(rng, rnd->number("c0", 1.0)));
    rnd->done();
  }
  const bool equality = n.boolean("equality", true);
  const auto families = parse_shapes(n, "", "wulff_area");
  return [=](const MCConfig& mc, ScenarioReport& r) {
    const WulffShape w(wulff, sub(mc, 1));
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      const WulffShape b(bodies[i], sub(mc, 10 + i));
      auto res = isoperimetric_check(b, w);
      res.check.name = "isoperimetric " + b.name() + "#" + std::to_string(i) + " / " + w.name();
      r.checks.push_back(res.check);
      r.diagnostics.emplace_back("ratio " + std::to_string(i), res.ratio);
    }
    if (equality) {
      const auto eq = isoperimetric_check(w, w);
      Check c = sigma_check("isoperimetric equality W / W", "Area_F(dW) = (n+1) vol(W)^{1/(n+1)} vol(W)^{n/(n+1)}",
                            eq.ratio, 1.0, eq.ratio_std_error);
      c.note = eq.check.note;
      r.checks.push_back(eq.check);
      r.checks.push_back(c);
    }
    for (std::size_t i = 0; i < families.size(); ++i) {
      r.checks.push_back(wulff_area_check(WulffShape(families[i], sub(mc, 5000 + i))));
      r.checks.back().name = "Wulff area " + families[i].name;
    }
  };
}

Runner sobolev(const Node& n) {
  const Box box = parse_box(n.at("box"));
  std::vector<ScalarField> functions;
  const Node list = n.at("functions");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Node f = list.element(i);
    functions.push_back(guarded(f, [&] { return ScalarField::from_expression(box.dim(), f.string()); }));
  }
  const auto wulffs = parse_shapes(n, "wulff", "wulffs");
  if (functions.empty() || wulffs.empty()) n.fail("needs functions and Wulff shapes");
  for (const auto& w : wulffs) {
    if (w.dim != box.dim()) n.fail("Wulff shape " + w.name + " does not live in the box dimension");
  }
  std::vector<double> exponents{1.0};
  if (auto p = n.find("p")) exponents = p->numbers();
  std::optional<double> lambda;
  double scale_tol = 1e-6;
  if (auto s = n.find("scaling")) {
    lambda = s->number("lambda");
    scale_tol = s->number("tolerance", 1e-6);
    s->done();
  }
  return [=](const MCConfig& mc, ScenarioReport& r) {
    for (std::size_t j = 0; j < wulffs.size(); ++j) {
      const WulffShape w(wulffs[j], sub(mc, j));
      for (const auto& f : functions) {
        for (double p : exponents) {
          auto res = sobolev_check(f, box, w, p);
          res.check.name += " " + f.name + " / " + w.name() + " p=" + fmt(p);
          r.checks.push_back(res.check);
        }
        if (lambda) {
          Check c = sobolev_scaling_probe(f, box, w, *lambda, 1.0, scale_tol);
          c.name += " " + f.name + " / " + w.name();
          r.checks.push_back(c);
        }
      }
    }
  };
}

Runner first_variation(const Node& n) {
  const Hypersurface surface = parse_surface(n.at("surface"));
  const SupportFunction wulff = parse_support(n.at("wulff"));
  if (wulff.dim != surface.ambient()) n.at("wulff").fail("dimension differs from the surface");
  std::vector<Map> fields;
  const Node list = n.at("fields");
  for (std::size_t i = 0; i < list.size(); ++i) fields.push_back(parse_map(list.element(i), surface.ambient()));
  if (fields.empty()) list.fail("empty list");
  const double dt = n.number("dt", 1e-3);
  const double tol = n.number("tolerance", 1e-4);
  return [=](const MCConfig& mc, ScenarioReport& r) {
    const WulffShape w(wulff, sub(mc, 1));
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto res = first_variation_check(surface, w, fields[i], dt, tol);
      for (Check c : res.checks) {
        c.name += " X" + std::to_string(i);
        r.checks.push_back(c);
      }
      r.diagnostics.emplace_back("variation X" + std::to_string(i), res.finite_difference);
    }
  };
}

Runner palmer(const Node& n) {
  const Hypersurface surface = parse_surface(n.at("surface"));
  const SupportFunction wulff = parse_support(n.at("wulff"));
  if (wulff.dim != surface.ambient()) n.at("wulff").fail("dimension differs from the surface");
  const int points = static_cast<int>(n.integer("points", 100));
  const double tol = n.number("tolerance", 1e-4);
  return [=](const MCConfig& mc, ScenarioReport& r) {
    const WulffShape w(wulff, sub(mc, 1));
    r.checks.push_back(palmer_check(surface, w, points, derive_seed(mc.seed, 2), tol));
  };
}

}  // namespace

const std::vector<std::string>& scenario_kinds() {
  static const std::vector<std::string> kinds{"identities", "jacobian",      "kjacobian",       "cov",
                                              "coarea",     "area",          "minkowski",       "tube",
                                              "isoperimetric", "sobolev", "first-variation", "palmer"};
  return kinds;
}

Runner prepare_scenario(const std::string& kind, const Node& n) {
  if (kind == "identities") return identities(n);
  if (kind == "jacobian") return jacobian_constants(n);
  if (kind == "kjacobian") return kjacobian(n);
  if (kind == "cov") return change_of_variables(n);
  if (kind == "coarea") return coarea(n);
  if (kind == "area") return area(n);
  if (kind == "minkowski") return minkowski(n);
  if (kind == "tube") return tube(n);
  if (kind == "isoperimetric") return isoperimetric(n);
  if (kind == "sobolev") return sobolev(n);
  if (kind == "first-variation") return first_variation(n);
  if (kind == "palmer") return palmer(n);
  throw ConfigError(n.path() + ".kind: unknown scenario kind '" + kind + "'");
}

}  // namespace anisotrope::cli
