#pragma once

#include "spec.hpp"

namespace anisotrope::cli {

/// Executes a parsed scenario with its Monte Carlo settings, appending checks
/// to the report.
using Runner = std::function<void(const MCConfig& mc, ScenarioReport& report)>;

const std::vector<std::string>& scenario_kinds();

/// Reads and validates the kind-specific keys of `n`.
Runner prepare_scenario(const std::string& kind, const Node& n);

}  // namespace anisotrope::cli
