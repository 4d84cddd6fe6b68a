#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "essf/dislocation.hpp"
#include "essf/levy.hpp"
#include "essf/marked_partition.hpp"
#include "essf/rng.hpp"
#include "essf/zspace.hpp"

namespace essf {

// One block of the simulated genealogy. A node holds its members, the
// homogeneous-clock birth/death times, the mark path split into segments at
// mark-jump events, and how it ended. Frozen nodes persist forever as mark-0
// blocks; dislocated nodes hand their members to their children.
struct BlockNode {
  enum class Termination { dislocated, frozen, alive_at_horizon };

  uint32_t id = 0;
  int32_t parent = -1;
  std::vector<uint32_t> members;
  double birth_time = 0.0;
  double death_time = 0.0;
  double initial_mark = 0.0;
  double mark_before_death = 0.0;  // left limit at death_time
  std::vector<MarkPathSegment> segments;
  Termination termination = Termination::frozen;
  std::vector<uint32_t> children;

  // mark at an in-life time (0 for frozen nodes at or after their death);
  // interpolate allows off-grid lookups on gaussian paths (grid-approximate)
  double mark_at(double t, bool interpolate = false) const;
};

struct GenealogyTree {
  uint32_t level = 0;
  double horizon = 0.0;
  double initial_mark = 1.0;
  double grid_step = 0.0;
  Characteristics characteristics;
  std::vector<double> query_times;
  std::vector<BlockNode> nodes;  // nodes[0] is the root

  const BlockNode& root() const { return nodes.front(); }
  bool complete() const;  // no block alive at the horizon
};

struct SimulateOptions {
  double initial_mark = 1.0;
  double grid_step = 0.0;  // lattice for gaussian mark paths (0 = none)
};

// Event-driven exact simulation of the level-n restriction on the
// homogeneous clock: each live block with b members proposes events at rate
// b*c + |lambda|; erosion detaches a uniform member as a frozen singleton,
// an atom proposal paints the members into intervals -- a single occupied
// positive interval is a mark jump, a zero-mark outcome freezes, anything
// else dislocates into product-marked children. Deterministic given the rng.
GenealogyTree simulate_homogeneous(const Characteristics& ch, uint32_t n, double horizon,
                                   std::span<const double> query_times, Rng& rng,
                                   const SimulateOptions& opts = {});

// marked partition of {1..n} at homogeneous time t (post-event state).
// With beta > 0, t must be a declared query time or an event boundary.
MarkedPartition snapshot(const GenealogyTree& tree, double t);

// Per-block Lamperti time change turning the homogeneous tree into the
// alpha-indexed picture; a block born at self-similar time tau_b lives for
// the integral of mark^{-alpha} over its homogeneous lifetime.
struct SelfSimilarView {
  const GenealogyTree* tree = nullptr;
  double alpha = 0.0;
  std::vector<double> tau_birth;
  std::vector<double> tau_length;
  bool complete = true;
  bool grids_converged = true;
};

SelfSimilarView time_change(const GenealogyTree& tree, double alpha);

// snapshot at self-similar time tau (alpha-clock); requires tau to be
// reachable on every branch (throws if a censored block is passed)
MarkedPartition snapshot_selfsim(const SelfSimilarView& view, double tau);

// sup over leaves of self-similar freeze times; nullopt when some block is
// still alive at the horizon ("not absorbed by horizon")
std::optional<double> absorption_time(const GenealogyTree& tree, double alpha);

// sum over blocks of the mark^{-alpha} Lamperti integral (the self-similar
// genealogy's total branch length); nullopt when censored at the horizon
std::optional<double> total_length(const GenealogyTree& tree, double alpha);

// the first visible level-n event: Exp(J_n) waiting time paired with its
// outcome, produced by the same proposal thinning the simulator uses
struct FirstEvent {
  double time = 0.0;
  MarkedPartition outcome;
};
FirstEvent sample_first_event(const Characteristics& ch, uint32_t n, Rng& rng);

}  // namespace essf
