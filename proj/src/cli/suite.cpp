#include "scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace anisotrope {

using cli::json;
using cli::Node;

struct Suite::Impl {
  struct Entry {
    std::string name;
    std::string kind;
    MCConfig mc;
    cli::Runner run;
  };
  json doc;
  std::vector<Entry> entries;

  const Entry& find(const std::string& name) const {
    for (const auto& e : entries) {
      if (e.name == name) return e;
    }
    throw ConfigError("scenario '" + name + "' not found");
  }
};

namespace {

bool safe_name(const std::string& s) {
  if (s.empty() || s.size() > 120 || s.front() == '.') return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '-' || c == '_' || c == '.'; });
}

MCConfig read_mc(const Node& n, MCConfig base) {
  if (n.has("seed")) {
    const std::int64_t s = n.integer("seed");
    if (s < 0) n.at("seed").fail("must be non-negative");
    base.seed = static_cast<std::uint64_t>(s);
  }
  base.samples = n.integer("samples", base.samples);
  base.workers = static_cast<int>(n.integer("workers", base.workers));
  try {
    base.validate();
  } catch (const Error& e) {
    n.fail(e.what());
  }
  return base;
}

ScenarioReport execute(const Suite::Impl::Entry& e, std::optional<std::uint64_t> seed) {
  ScenarioReport r;
  r.name = e.name;
  r.kind = e.kind;
  MCConfig mc = e.mc;
  if (seed) mc.seed = *seed;
  r.seed = mc.seed;
  r.samples = mc.samples;
  r.workers = mc.workers;
  try {
    e.run(mc, r);
  } catch (const std::exception& ex) {
    r.error = ex.what();
  }
  return r;
}

json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

Suite Suite::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config");
  std::stringstream text;
  text << in.rdbuf();
  return parse(text.str(), path);
}

namespace {

void read_entries(const json& doc, std::vector<Suite::Impl::Entry>& entries) {
  const Node root(doc, "");
  if (!root.is_object()) root.fail("expected an object with a scenarios list");
  MCConfig defaults;
  if (auto d = root.find("defaults")) {
    defaults = read_mc(*d, defaults);
    d->done();
  }
  if (root.has("description")) root.string("description");
  const Node list = root.at("scenarios");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Node s = list.element(i);
    Suite::Impl::Entry e;
    e.name = s.string("name");
    if (!safe_name(e.name)) s.at("name").fail("use letters, digits, '-', '_' and '.'");
    for (const auto& other : entries) {
      if (other.name == e.name) s.at("name").fail("duplicate scenario name '" + e.name + "'");
    }
    e.kind = s.string("kind");
    if (s.has("description")) s.string("description");
    e.mc = read_mc(s, defaults);
    e.run = cli::prepare_scenario(e.kind, s);
    s.done();
    entries.push_back(std::move(e));
  }
  root.done();
}

}  // namespace

Suite Suite::parse(const std::string& text, const std::string& origin) {
  auto impl = std::make_shared<Impl>();
  try {
    impl->doc = json::parse(text);
    read_entries(impl->doc, impl->entries);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": invalid JSON: " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  Suite suite;
  suite.impl_ = impl;
  return suite;
}

std::vector<std::string> Suite::names() const {
  std::vector<std::string> out;
  for (const auto& e : impl_->entries) out.push_back(e.name);
  return out;
}

std::string Suite::kind(const std::string& name) const { return impl_->find(name).kind; }

ScenarioReport Suite::run_one(const std::string& name, std::optional<std::uint64_t> seed) const {
  return execute(impl_->find(name), seed);
}

RunSummary Suite::run(const RunOptions& opts) const {
  std::vector<const Impl::Entry*> todo;
  for (const auto& e : impl_->entries) {
    if (opts.filter.empty() || e.name.find(opts.filter) != std::string::npos) todo.push_back(&e);
  }
  RunSummary summary;
  summary.reports.resize(todo.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < todo.size();) summary.reports[i] = execute(*todo[i], opts.seed);
  };
  const int threads = std::max(1, std::min<int>(opts.parallel, static_cast<int>(todo.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (!opts.out_dir.empty()) write_reports(summary, opts.out_dir);
  return summary;
}

int RunSummary::passed() const {
  return static_cast<int>(std::count_if(reports.begin(), reports.end(), [](const auto& r) { return r.pass(); }));
}

std::string report_json(const ScenarioReport& r) {
  nlohmann::ordered_json out;
  out["scenario"] = r.name;
  out["kind"] = r.kind;
  out["pass"] = r.pass();
  out["mc"] = {{"seed", r.seed}, {"samples", r.samples}, {"workers", r.workers}};
  auto checks = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json j;
    j["name"] = c.name;
    j["tag"] = c.tag;
    j["lhs"] = number(c.lhs);
    j["rhs"] = number(c.rhs);
    j["residual"] = number(c.residual);
    j["tolerance"] = number(c.tolerance);
    j["pass"] = c.pass;
    if (c.std_error) j["std_error"] = number(*c.std_error);
    if (!c.note.empty()) j["note"] = c.note;
    checks.push_back(std::move(j));
  }
  out["checks"] = std::move(checks);
  if (!r.diagnostics.empty()) {
    nlohmann::ordered_json d = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.diagnostics) d[k] = number(v);
    out["diagnostics"] = std::move(d);
  }
  if (!r.curve.empty()) out["curve"] = {{"header", r.curve_header}, {"rows", r.curve}};
  if (r.error) out["error"] = *r.error;
  return out.dump(2) + "\n";
}

std::string report_text(const ScenarioReport& r) {
  std::ostringstream out;
  out << r.name << " (" << r.kind << "): " << (r.pass() ? "PASS" : "FAIL") << "\n";
  out << "seed " << r.seed << ", samples " << r.samples << ", workers " << r.workers << "\n";
  std::size_t width = 5;
  for (const auto& c : r.checks) width = std::max(width, c.name.size());
  out << std::left << std::setw(static_cast<int>(width)) << "check" << std::right << std::setw(14) << "lhs"
      << std::setw(14) << "rhs" << std::setw(12) << "residual" << std::setw(12) << "tolerance"
      << "  result\n";
  for (const auto& c : r.checks) {
    out << std::left << std::setw(static_cast<int>(width)) << c.name << std::right << std::setw(14) << fixed(c.lhs)
        << std::setw(14) << fixed(c.rhs) << std::setw(12) << fixed(c.residual) << std::setw(12) << fixed(c.tolerance)
        << "  " << (c.pass ? "pass" : "FAIL") << "\n";
  }
  for (const auto& [k, v] : r.diagnostics) out << "  " << k << " = " << fixed(v) << "\n";
  if (r.error) out << "error: " << *r.error << "\n";
  return out.str();
}

std::string summary_json(const RunSummary& s) {
  nlohmann::ordered_json out;
  out["passed"] = s.passed();
  out["total"] = s.reports.size();
  auto list = nlohmann::ordered_json::array();
  for (const auto& r : s.reports) {
    nlohmann::ordered_json j;
    j["scenario"] = r.name;
    j["kind"] = r.kind;
    j["pass"] = r.pass();
    j["checks"] = r.checks.size();
    j["failed"] = std::count_if(r.checks.begin(), r.checks.end(), [](const Check& c) { return !c.pass; });
    if (r.error) j["error"] = *r.error;
    list.push_back(std::move(j));
  }
  out["scenarios"] = std::move(list);
  return out.dump(2) + "\n";
}

std::string summary_text(const RunSummary& s) {
  std::ostringstream out;
  std::size_t width = 8;
  for (const auto& r : s.reports) width = std::max(width, r.name.size());
  for (const auto& r : s.reports) {
    const auto failed = std::count_if(r.checks.begin(), r.checks.end(), [](const Check& c) { return !c.pass; });
    out << (r.pass() ? "PASS  " : "FAIL  ") << std::left << std::setw(static_cast<int>(width)) << r.name << "  "
        << std::setw(16) << r.kind << r.checks.size() - failed << "/" << r.checks.size() << " checks";
    if (r.error) out << "  error: " << *r.error;
    out << "\n";
  }
  out << s.passed() << " of " << s.reports.size() << " scenarios passed\n";
  return out.str();
}

std::string curve_csv(const ScenarioReport& r) {
  if (r.curve_header.empty()) throw DomainError("scenario " + r.name + " has no curve");
  std::ostringstream out;
  for (std::size_t i = 0; i < r.curve_header.size(); ++i) out << (i ? "," : "") << r.curve_header[i];
  out << "\n";
  for (const auto& row : r.curve) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      const bool quote = row[i].find_first_of(",\" ") != std::string::npos;
      out << (i ? "," : "") << (quote ? "\"" + row[i] + "\"" : row[i]);
    }
    out << "\n";
  }
  return out.str();
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + p.string());
}

}  // namespace

void write_reports(const RunSummary& s, const std::string& dir) {
  const std::filesystem::path root(dir);
  std::filesystem::create_directories(root);
  for (const auto& r : s.reports) {
    write_file(root / (r.name + ".json"), report_json(r));
    write_file(root / (r.name + ".txt"), report_text(r));
  }
  write_file(root / "summary.json", summary_json(s));
  write_file(root / "summary.txt", summary_text(s));
}

int run_command(const std::string& config, const RunOptions& opts, std::ostream& log) {
  RunSummary summary;
  try {
    const Suite suite = Suite::load(config);
    summary = suite.run(opts);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitFail;
  }
  log << summary_text(summary);
  return summary.exit_code();
}

int curve_command(const std::string& config, const std::string& scenario, const std::string& out_file,
                  std::optional<std::uint64_t> seed, std::ostream& log) {
  ScenarioReport r;
  try {
    const Suite suite = Suite::load(config);
    const std::string kind = suite.kind(scenario);
    if (kind != "tube" && kind != "minkowski") {
      throw ConfigError(scenario + ": curves exist for tube and minkowski scenarios, not " + kind);
    }
    r = suite.run_one(scenario, seed);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (r.error) {
    log << "error: " << *r.error << "\n";
    return kExitFail;
  }
  try {
    write_file(out_file, curve_csv(r));
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitFail;
  }
  log << r.curve.size() << " rows written to " << out_file << "\n";
  return r.pass() ? kExitPass : kExitFail;
}

}  // namespace anisotrope
