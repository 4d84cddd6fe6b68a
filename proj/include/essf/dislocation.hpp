#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "essf/marked_partition.hpp"
#include "essf/rng.hpp"
#include "essf/zspace.hpp"

namespace essf {

// J_n: exponential rate of the first visible level-n event,
// n*c + sum_atoms w * (1 - sum_{v_i > 0} s_i^n).
double killing_rate(const Characteristics& ch, uint32_t n);

// the erosion outcome: integer i detaches as a frozen singleton, the rest of
// {1..n} keeps mark 1
MarkedPartition erosion_atom(uint32_t n, uint32_t i);

// One paintbox sample at level n: n independent uniforms dropped into the
// intervals of z; co-occupants of interval k form a block with mark v_k,
// leftovers become frozen singletons.
MarkedPartition sample_paintbox(const ZElement& z, uint32_t n, Rng& rng);

// A sample from the first-event law at level n (requires killing_rate > 0):
// proposals at rate n*c + |lambda| are thinned by rejecting pure mark jumps
// (single block, positive mark). Erosion proposals pick a uniform integer.
MarkedPartition sample_dislocation(const Characteristics& ch, uint32_t n, Rng& rng);

// The finite level-n jump measure of the log-mark: one (rate, jump) entry per
// distinct jump value log v_j over atoms and rows with v_j > 0, v_j != 1,
// rate w * s_j^n, aggregated by exact equality of the jump value.
std::vector<std::pair<double, double>> level_jump_rates(const Characteristics& ch, uint32_t n);

// Drift felt between uncompensated Poisson jumps:
// d - sum_atoms w * log(v_1) * 1{v_1 > 0, |log v_1| <= 1}. Level-independent.
double effective_drift(const Characteristics& ch);

// Low-level helper shared by the paintbox and the simulators: assigns count
// independent uniforms to interval indices (0-based; -1 = leftover dust).
std::vector<int32_t> paintbox_interval_assignment(const ZElement& z, uint32_t count, Rng& rng);

// One proposal of the level-n Poisson intensity (erosion with probability
// n*c / (n*c + |lambda|), otherwise a weighted atom's paintbox). Returns the
// outcome, or nullopt when it is invisible at level n (pure mark jump).
std::optional<MarkedPartition> propose_level_event(const Characteristics& ch, uint32_t n,
                                                   Rng& rng);

}  // namespace essf
