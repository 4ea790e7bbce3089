#pragma once

#include "anisotrope/common.hpp"

#include <optional>
#include <span>

namespace anisotrope {

struct MCConfig {
  static constexpr std::int64_t kMinSamples = 10'000;

  std::uint64_t seed = 1;
  std::int64_t samples = 1'000'000;
  /// Sampling box; when absent the caller derives one from the body.
  std::optional<Box> box;
  /// Each worker draws from its own substream derived from (seed, index),
  /// so estimates are reproducible for a fixed (seed, workers) pair.
  int workers = 1;

  void validate() const;
  MCConfig with_seed(std::uint64_t s) const;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct McEstimate : Estimate {
  std::int64_t hits = 0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  bool zero_hits = false;
};

/// Relative padding of sampling boxes computed from a body.  Wide enough that
/// bodies touching the computed box still leave misses, so the binomial
/// standard error never collapses to zero.
inline constexpr double kBoxPadding = 1e-2;

/// SplitMix64 mixing of (seed, stream) into an independent seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Receives each sample point and bumps any of the counters.  Called
/// concurrently from worker threads; must not mutate shared state.
using CountingVisitor = std::function<void(const Vec& point, std::span<std::int64_t> counters)>;

/// Uniform samples in `box`; returns the per-counter totals.
std::vector<std::int64_t> mc_count(const Box& box, const MCConfig& mc, int counters, const CountingVisitor& visit);

/// Box volume times hit fraction, with stderr box * sqrt(p (1 - p) / N).
McEstimate estimate_from_hits(std::int64_t hits, double box_volume, const MCConfig& mc);

/// Rejection-sampling volume of {p : member(p)} inside `box`.
McEstimate mc_volume(const std::function<bool(const Vec&)>& member, const Box& box, const MCConfig& mc);

}  // namespace anisotrope
