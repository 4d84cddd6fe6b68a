#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "essf/rng.hpp"
#include "essf/zspace.hpp"

namespace essf {

// Which additive-statistic branching system to run.
//
// level_n: the refreshed level-n system -- every live particle is a block
// tracked with n fresh labels, so it proposes at rate n*c + |lambda| forever;
// a paintbox proposal branches into the occupied positive intervals (a single
// one is a mark jump), erosion is a no-op for n >= 2 and kills at n = 1. The
// statistic has mean exp(t * cumulant_level(n, theta)) exactly.
//
// level_infinity: the marks-only system -- every atom proposal branches into
// all positive intervals regardless of occupancy and erosion never acts, so
// the statistic has mean exp(t * cumulant(theta)) exactly.
enum class StatisticMode { level_n, level_infinity };

struct ParticleRunOptions {
  uint64_t max_events = 50'000'000;  // explosion guard per replicate
};

// One replicate: S_theta(t) for every requested time (sorted ascending) and
// theta. Returns matrix indexed [time][theta].
std::vector<std::vector<double>> run_additive_statistic(const Characteristics& ch,
                                                        StatisticMode mode, uint32_t n,
                                                        std::span<const double> times,
                                                        std::span<const double> thetas, Rng& rng,
                                                        const ParticleRunOptions& opts = {});

}  // namespace essf
