#pragma once

// Config nodes and the builders for shapes, densities, patches and maps.

#include "anisotrope/aniso.hpp"
#include "anisotrope/cli.hpp"

#include <json.hpp>

#include <set>

namespace anisotrope::cli {

using json = nlohmann::json;

/// A JSON object or value with its key path.  Objects track which keys were
/// read so that `done()` can reject the rest.
class Node {
 public:
  Node(const json& j, std::string path);

  const json& raw() const { return *j_; }
  const std::string& path() const { return path_; }
  bool is_object() const { return j_->is_object(); }
  bool is_array() const { return j_->is_array(); }
  bool is_string() const { return j_->is_string(); }

  bool has(const std::string& key) const;
  Node at(const std::string& key) const;
  std::optional<Node> find(const std::string& key) const;
  Node element(std::size_t i) const;
  std::size_t size() const;

  double number() const;
  double number(const std::string& key) const { return at(key).number(); }
  double number(const std::string& key, double fallback) const;
  std::int64_t integer() const;
  std::int64_t integer(const std::string& key) const { return at(key).integer(); }
  std::int64_t integer(const std::string& key, std::int64_t fallback) const;
  std::string string() const;
  std::string string(const std::string& key) const { return at(key).string(); }
  std::string string(const std::string& key, const std::string& fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::vector<double> numbers() const;
  std::vector<double> numbers(const std::string& key) const { return at(key).numbers(); }
  std::vector<std::string> strings() const;

  /// Rejects keys nobody asked for.
  void done() const;
  [[noreturn]] void fail(const std::string& message) const;

 private:
  const json* j_;
  std::string path_;
  std::shared_ptr<std::set<std::string>> used_;
};

/// Converts library parse errors raised while reading `node` into
/// ConfigErrors at its path.
template <class F>
auto guarded(const Node& node, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    node.fail(e.what());
  }
}

SupportFunction parse_support(const Node& n);
Norm parse_norm(const Node& n, int dim);
Mat parse_matrix(const Node& n);
Box parse_box(const Node& n);
std::map<std::string, double> parse_params(const Node& parent);

/// Density built at run time (Busemann and Holmes-Thompson constants need
/// Monte Carlo), with degree and ambient dimension known up front.
struct DensitySpec {
  int degree = 0;
  int ambient = 0;
  std::function<DensityField(const MCConfig&)> make;
};
DensitySpec parse_density(const Node& n);

/// Maps as lists of expressions; `in` may come from the context.
Map parse_map(const Node& n, int in);

/// Patch whose expressions may use extra parameters (fiber families bind
/// b0, b1, ... to the base point).
struct PatchSpec {
  std::function<Patch(const std::map<std::string, double>&)> make;
  bool closed = false;
};
PatchSpec parse_patch(const Node& n, const std::vector<std::string>& free_params = {});
Hypersurface parse_surface(const Node& n);

}  // namespace anisotrope::cli
