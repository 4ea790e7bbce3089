#include "anisotrope/montecarlo.hpp"

#include <cmath>
#include <random>
#include <thread>

namespace anisotrope {

void MCConfig::validate() const {
  if (samples < kMinSamples) {
    throw DomainError("Monte Carlo needs at least " + std::to_string(kMinSamples) + " samples, got " +
                      std::to_string(samples));
  }
  if (workers < 1) throw DomainError("Monte Carlo needs at least one worker");
  if (box && box->volume() <= 0.0) throw DomainError("Monte Carlo box has non-positive volume");
}

MCConfig MCConfig::with_seed(std::uint64_t s) const {
  MCConfig out = *this;
  out.seed = s;
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<std::int64_t> mc_count(const Box& box, const MCConfig& mc, int counters, const CountingVisitor& visit) {
  mc.validate();
  const int dim = box.dim();
  const int workers = mc.workers;
  std::vector<std::vector<std::int64_t>> partial(static_cast<std::size_t>(workers),
                                                 std::vector<std::int64_t>(static_cast<std::size_t>(counters), 0));

  auto run = [&](int w) {
    std::mt19937_64 rng(derive_seed(mc.seed, static_cast<std::uint64_t>(w)));
    const std::int64_t share = mc.samples / workers + (w < mc.samples % workers ? 1 : 0);
    Vec p(dim);
    auto& local = partial[static_cast<std::size_t>(w)];
    for (std::int64_t s = 0; s < share; ++s) {
      for (int i = 0; i < dim; ++i) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        p[i] = box.axes[i].lo + u * box.axes[i].width();
      }
      visit(p, local);
    }
  };

  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }

  std::vector<std::int64_t> total(static_cast<std::size_t>(counters), 0);
  for (const auto& part : partial) {
    for (int c = 0; c < counters; ++c) total[c] += part[c];
  }
  return total;
}

McEstimate estimate_from_hits(std::int64_t hits, double box_volume, const MCConfig& mc) {
  McEstimate e;
  const double n = static_cast<double>(mc.samples);
  const double p = static_cast<double>(hits) / n;
  e.value = box_volume * p;
  e.std_error = box_volume * std::sqrt(p * (1.0 - p) / n);
  e.hits = hits;
  e.samples = mc.samples;
  e.seed = mc.seed;
  e.workers = mc.workers;
  e.zero_hits = hits == 0;
  return e;
}

McEstimate mc_volume(const std::function<bool(const Vec&)>& member, const Box& box, const MCConfig& mc) {
  const auto counts = mc_count(box, mc, 1, [&](const Vec& p, std::span<std::int64_t> c) {
    if (member(p)) ++c[0];
  });
  return estimate_from_hits(counts[0], box.volume(), mc);
}

}  // namespace anisotrope
