// Runs the bundled suite and judges each acceptance criterion from the raw
// report values, with the tolerances pinned here rather than in the config.

#include "anisotrope/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#ifndef ANISOTROPE_SUITE
#define ANISOTROPE_SUITE "suite/default.json"
#endif

namespace {

using namespace anisotrope;
constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

struct Run {
  std::map<std::string, ScenarioReport> reports;
  std::map<std::string, double> seconds;
};

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// "1000 random instances, 0 failures" at the start of identity notes.
int instances(const Check& c) {
  int n = 0, failures = -1;
  std::sscanf(c.note.c_str(), "%d random instances, %d failures", &n, &failures);
  return failures == 0 ? n : -1;
}

const ScenarioReport* get(const Run& run, const std::string& name, Verdict& v) {
  auto it = run.reports.find(name);
  if (it == run.reports.end()) {
    v.fail("scenario " + name + " missing");
    return nullptr;
  }
  if (it->second.error) {
    v.fail(name + ": " + *it->second.error);
    return nullptr;
  }
  return &it->second;
}

std::vector<const Check*> matching(const ScenarioReport& r, const std::string& prefix) {
  std::vector<const Check*> out;
  for (const auto& c : r.checks) {
    if (starts_with(c.name, prefix)) out.push_back(&c);
  }
  return out;
}

bool within_sigma(const Check& c, double expected, double sigmas = 3.0, double slack = 0.0) {
  return c.std_error && std::abs(c.lhs - expected) <= sigmas * *c.std_error + slack;
}

Verdict identities(const Run& run, bool codensity) {
  Verdict v;
  const auto* r = get(run, "identities", v);
  if (!r) return v;
  const std::vector<std::string> names =
      codensity ? std::vector<std::string>{"codensity completion independence", "codensity Hodge route"}
                : std::vector<std::string>{"identity (a)", "identity (b)", "identity (c)", "identity (d)", "identity (e)"};
  const int need = codensity ? 500 : 1000;
  double worst = 0.0;
  for (const auto& n : names) {
    const auto found = matching(*r, n);
    if (found.size() != 1) {
      v.fail(n + " missing");
      continue;
    }
    const Check& c = *found.front();
    worst = std::max(worst, c.residual);
    if (c.residual > 1e-9) v.fail(n + " residual " + num(c.residual));
    if (instances(c) < need) v.fail(n + ": " + c.note);
  }
  if (!codensity && run.seconds.at("identities") > 30.0) v.fail("runtime " + num(run.seconds.at("identities")) + " s");
  if (v.pass) {
    v.detail = "worst residual " + num(worst) + " over " + std::to_string(names.size()) + " checks";
    if (!codensity) v.detail += ", " + num(run.seconds.at("identities")) + " s";
  }
  return v;
}

Verdict kjacobian(const Run& run) {
  Verdict v;
  const auto* r = get(run, "kjacobian", v);
  if (!r) return v;
  const auto checks = matching(*r, "K-jacobian map");
  if (checks.size() != 10) v.fail(std::to_string(checks.size()) + " maps instead of 10");
  if (r->samples < 1'000'000) v.fail("fewer than 1e6 samples");
  int square2 = 0, square3 = 0;
  double worst = 0.0;
  for (const Check* c : checks) {
    square2 += c->name.find("(2x2") != std::string::npos;
    square3 += c->name.find("(3x3") != std::string::npos;
    if (!within_sigma(*c, c->rhs)) v.fail(c->name + " outside 3 sigma");
    if (c->std_error) worst = std::max(worst, std::abs(c->lhs - c->rhs) / *c->std_error);
  }
  if (!square2 || !square3) v.fail("needs both 2x2 and 3x3 maps");
  if (v.pass) v.detail = "10 maps, worst " + num(worst) + " combined sigma";
  return v;
}

Verdict constants(const Run& run) {
  Verdict v;
  const auto* r = get(run, "jacobian-l1", v);
  if (!r) return v;
  if (r->samples < 1'000'000) v.fail("fewer than 1e6 samples");
  const auto bus = matching(*r, "Busemann constant");
  const auto ht = matching(*r, "Holmes-Thompson constant");
  if (bus.empty() || ht.empty()) {
    v.fail("constants missing");
    return v;
  }
  // Busemann: pi / vol(l1 ball) = pi / 2.  Holmes-Thompson: vol(square) / pi = 4 / pi.
  if (!within_sigma(*bus.front(), kPi / 2)) v.fail("Busemann " + num(bus.front()->lhs) + " vs pi/2");
  if (!within_sigma(*ht.front(), 4 / kPi)) v.fail("Holmes-Thompson " + num(ht.front()->lhs) + " vs 4/pi");
  if (v.pass) {
    v.detail = "mu_B " + num(bus.front()->lhs) + " +- " + num(*bus.front()->std_error) + ", mu_HT " +
               num(ht.front()->lhs) + " +- " + num(*ht.front()->std_error);
  }
  return v;
}

Verdict residuals(const Run& run, const std::vector<std::string>& names, double tol) {
  Verdict v;
  double worst = 0.0;
  for (const auto& n : names) {
    const auto* r = get(run, n, v);
    if (!r) continue;
    if (r->checks.empty()) v.fail(n + " has no checks");
    for (const auto& c : r->checks) {
      const double res = rel(c.lhs, c.rhs);
      worst = std::max(worst, res);
      if (!(res <= tol)) v.fail(n + ": " + c.name + " residual " + num(res));
    }
  }
  if (v.pass) v.detail = std::to_string(names.size()) + " scenarios, worst residual " + num(worst);
  return v;
}

Verdict minkowski(const Run& run) {
  Verdict v;
  const auto* r = get(run, "minkowski", v);
  if (!r) return v;
  const auto checks = matching(*r, "Minkowski content");
  if (checks.size() != 9) v.fail(std::to_string(checks.size()) + " pairs instead of 9");
  double worst = 0.0;
  for (const Check* c : checks) {
    const double res = std::abs(c->lhs - c->rhs) / std::abs(c->rhs);
    worst = std::max(worst, res);
    if (!(res <= 1e-2)) v.fail(c->name + " off by " + num(res));
  }
  if (v.pass) v.detail = "9 pairs, worst relative error " + num(worst);
  return v;
}

Verdict isoperimetric(const Run& run) {
  Verdict v;
  const auto* r = get(run, "isoperimetric", v);
  if (!r) return v;
  std::vector<const Check*> bodies;
  for (const Check* c : matching(*r, "isoperimetric ")) {
    if (c->name.find('#') != std::string::npos) bodies.push_back(c);
  }
  if (bodies.size() != 20) v.fail(std::to_string(bodies.size()) + " bodies instead of 20");
  double lowest = 1e300;
  for (const Check* c : bodies) {
    lowest = std::min(lowest, c->lhs);
    if (!c->std_error || c->lhs < 1.0 - 3.0 * *c->std_error) v.fail(c->name + " ratio " + num(c->lhs));
  }
  const auto eq = matching(*r, "isoperimetric equality");
  if (eq.size() != 1 || !within_sigma(*eq.front(), 1.0)) v.fail("equality case outside 3 sigma of 1");
  if (v.pass) v.detail = "lowest ratio " + num(lowest) + ", equality ratio " + num(eq.front()->lhs);
  return v;
}

Verdict wulff_area(const Run& run) {
  Verdict v;
  const auto* r = get(run, "isoperimetric", v);
  if (!r) return v;
  const auto checks = matching(*r, "Wulff area");
  if (checks.size() != 3) v.fail(std::to_string(checks.size()) + " families instead of 3");
  double worst = 0.0;
  for (const Check* c : checks) {
    // lhs is the area of the boundary, rhs (n+1) vol(W) with n + 1 = 2.
    if (!within_sigma(*c, c->rhs, 3.0, 1e-6)) v.fail(c->name + " outside 3 sigma + 1e-6");
    if (c->std_error) worst = std::max(worst, std::abs(c->lhs - c->rhs) / *c->std_error);
  }
  if (v.pass) v.detail = "3 families, worst " + num(worst) + " sigma";
  return v;
}

Verdict tube(const Run& run) {
  Verdict v;
  double worst = 0.0;
  for (const std::string name : {"tube-circle", "tube-ellipse"}) {
    const auto* r = get(run, name, v);
    if (!r) continue;
    if (r->samples < 10'000'000) v.fail(name + " uses fewer than 1e7 samples");
    int found = 0;
    for (const std::string side : {"outer", "full"}) {
      for (double eps : {0.02, 0.05}) {
        for (const Check* c : matching(*r, side + " tube eps=")) {
          if (std::abs(std::stod(c->name.substr(c->name.find('=') + 1)) - eps) > 1e-12) continue;
          ++found;
          if (!within_sigma(*c, c->rhs)) v.fail(name + " " + c->name + " outside 3 sigma");
          if (c->std_error) worst = std::max(worst, std::abs(c->lhs - c->rhs) / *c->std_error);
          if (name == "tube-circle") {
            // Round tube around the unit circle.
            const double closed = side == "outer" ? 2 * kPi * eps + kPi * eps * eps : 4 * kPi * eps;
            if (!(rel(c->lhs, closed) <= 1e-8)) v.fail(side + " formula " + num(c->lhs) + " vs " + num(closed));
          }
        }
      }
    }
    if (found != 4) v.fail(name + ": expected outer and full tubes at eps 0.02 and 0.05");
  }
  if (v.pass) v.detail = "8 tubes, worst " + num(worst) + " sigma; round closed form to 1e-8";
  return v;
}

Verdict sobolev(const Run& run) {
  Verdict v;
  const auto* r = get(run, "sobolev", v);
  if (!r) return v;
  const auto sob = matching(*r, "Sobolev ratio");
  const auto gn = matching(*r, "Gagliardo-Nirenberg ratio");
  const auto scale = matching(*r, "Sobolev scale invariance");
  if (sob.size() < 6) v.fail("fewer than 3 functions x 2 Wulff shapes");
  double lowest = 1e300, scale_worst = 0.0;
  for (const auto* list : {&sob, &gn}) {
    for (const Check* c : *list) {
      lowest = std::min(lowest, c->lhs);
      if (c->lhs < 1.0 - 1e-3) v.fail(c->name + " ratio " + num(c->lhs));
    }
  }
  if (scale.size() != sob.size()) v.fail("scale probe missing");
  for (const Check* c : scale) {
    scale_worst = std::max(scale_worst, rel(c->lhs, c->rhs));
    if (rel(c->lhs, c->rhs) > 1e-6) v.fail(c->name + " drift " + num(rel(c->lhs, c->rhs)));
  }
  if (v.pass) {
    v.detail = std::to_string(sob.size() + gn.size()) + " ratios, lowest " + num(lowest) + "; scale drift " +
               num(scale_worst);
  }
  return v;
}

Verdict variation(const Run& run) {
  Verdict v;
  const auto* r = get(run, "first-variation", v);
  const auto* p = get(run, "palmer", v);
  if (!r || !p) return v;
  double worst = 0.0;
  auto fv = matching(*r, "first variation");
  const auto normal = matching(*r, "normal form");
  fv.insert(fv.end(), normal.begin(), normal.end());
  for (const Check* c : fv) {
    const double scale = std::max({std::abs(c->lhs), std::abs(c->rhs), 1.0});
    worst = std::max(worst, std::abs(c->lhs - c->rhs) / scale);
    if (std::abs(c->lhs - c->rhs) > 1e-4 * scale) v.fail(c->name + " residual " + num(c->residual));
  }
  const auto tangential = matching(*r, "tangential variation");
  if (tangential.empty()) v.fail("no tangential field");
  for (const Check* c : tangential) {
    if (c->residual > 1e-6) v.fail(c->name + " " + num(c->residual));
  }
  const auto palmer = matching(*p, "Palmer trace identity");
  if (palmer.size() != 1 || palmer.front()->residual > 1e-4) v.fail("Palmer identity");
  if (v.pass) {
    v.detail = "variation residual " + num(worst) + ", Palmer " + num(palmer.front()->residual);
  }
  return v;
}

Run execute(const Suite& suite, const std::vector<std::string>& names) {
  Run run;
  for (const auto& n : names) {
    const auto start = std::chrono::steady_clock::now();
    run.reports[n] = suite.run_one(n);
    run.seconds[n] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "  ran " << n << " in " << num(run.seconds[n]) << " s\n";
  }
  return run;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : ANISOTROPE_SUITE;
  Suite suite;
  try {
    suite = Suite::load(path);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  const auto names = suite.names();
  const Run first = execute(suite, names);
  // Determinism: everything but the two heaviest Monte Carlo scenarios runs
  // again; tube-circle keeps a tube sampler in the comparison.
  std::vector<std::string> again;
  for (const auto& n : names) {
    if (n != "minkowski" && n != "tube-ellipse") again.push_back(n);
  }
  const Run second = execute(suite, again);

  std::vector<std::pair<std::string, Verdict>> rows;
  rows.emplace_back("identity suite (a)-(e), 1000 instances each, residual <= 1e-9, <= 30 s", identities(first, false));
  rows.emplace_back("codensity completion and Hodge route, 500 inputs each, <= 1e-9", identities(first, true));
  rows.emplace_back("K-jacobian = Busemann jacobian within 3 sigma, 10 maps", kjacobian(first));
  rows.emplace_back("l1 plane: Busemann pi/2 and Holmes-Thompson 4/pi within 3 sigma", constants(first));
  rows.emplace_back("change of variables and Fubini, residual <= 1e-6",
                    residuals(first, {"cov-annulus", "cov-sphere", "fubini-twisted", "fubini-3d"}, 1e-6));
  {
    Verdict co = residuals(first, {"coarea-annulus", "coarea-wulff", "coarea-shell"}, 1e-6);
    Verdict ar = residuals(first, {"area-parabola", "area-double-cover", "area-wulff-graph"}, 1e-6);
    Verdict both;
    if (!co.pass) both.fail("coarea: " + co.detail);
    if (!ar.pass) both.fail("area: " + ar.detail);
    if (both.pass) both.detail = "coarea " + co.detail + "; area " + ar.detail;
    rows.emplace_back("area and coarea formulas, three scenarios each, residual <= 1e-6", both);
  }
  rows.emplace_back("Minkowski content = anisotropic area within 1%", minkowski(first));
  rows.emplace_back("isoperimetric ratio >= 1 - 3 sigma on 20 bodies, equality within 3 sigma", isoperimetric(first));
  rows.emplace_back("Wulff boundary area = 2 vol(W) within 3 sigma + 1e-6, three families", wulff_area(first));
  rows.emplace_back("tube volumes within 3 sigma at 1e7 samples, round closed form to 1e-8", tube(first));
  rows.emplace_back("Sobolev and Gagliardo-Nirenberg ratios >= 1 - 1e-3, scale drift <= 1e-6", sobolev(first));
  rows.emplace_back("first variation <= 1e-4, tangential <= 1e-6, Palmer <= 1e-4", variation(first));
  {
    Verdict d;
    for (const auto& n : again) {
      if (report_json(first.reports.at(n)) != report_json(second.reports.at(n)) ||
          report_text(first.reports.at(n)) != report_text(second.reports.at(n))) {
        d.fail(n + " differs between runs");
      }
    }
    if (d.pass) d.detail = std::to_string(again.size()) + " scenarios byte-identical across two runs";
    rows.emplace_back("determinism: identical seed and workers give identical reports", d);
  }

  int failed = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& [title, v] = rows[i];
    std::printf("%-4s %2zu  %s  [%s]\n", v.pass ? "PASS" : "FAIL", i + 1, title.c_str(), v.detail.c_str());
    failed += !v.pass;
  }
  std::printf("%zu of %zu criteria passed\n", rows.size() - failed, rows.size());
  return failed == 0 ? 0 : 1;
}
