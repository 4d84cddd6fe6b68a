#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "essf/genealogy.hpp"
#include "essf/marked_partition.hpp"
#include "essf/particle_system.hpp"
#include "essf/rng.hpp"
#include "essf/zspace.hpp"

namespace essf {

// sum over blocks of mark^theta with 0^theta = 0 for every theta, so the
// theta = 0 value counts the blocks with positive mark
double additive_statistic(const MarkedPartition& x, double theta);

// growth rate of the mean additive statistic for the full process:
// d*th + (beta/2)th^2 + sum_atoms w (sum_{v_i>0} v_i^th - 1 - th log v1 1{v1>0,|log v1|<=1})
double cumulant(const Characteristics& ch, double theta);

// level-n growth rate (refreshed statistic). Closed form:
// d*th + (beta/2)th^2 + (n==1 ? -c : 0)
//   + sum_atoms w (sum_{v_j>0} v_j^th (1-(1-s_j)^n) - 1 - th log v1 1{...}),
// using that interval j is occupied by one of n labels with probability
// 1-(1-s_j)^n. Nondecreasing in n with limit cumulant(theta).
double cumulant_level(const Characteristics& ch, uint32_t n, double theta);

struct MonteCarloValue {
  double mean = 0.0;
  double std_error = 0.0;
  uint64_t replicates = 0;
};

// Monte Carlo route to the same quantity: movement part exact, branching part
// estimated as J_n * (mean of S_theta - 1) over first-event-law samples.
MonteCarloValue cumulant_level_mc(const Characteristics& ch, uint32_t n, double theta,
                                  uint64_t replicates, Rng& rng);

struct KappaMinimum {
  double theta_star = 0.0;
  double value = 0.0;
  bool negative_found = false;
};

// golden-section minimization of the (convex) cumulant over [lo, hi]
KappaMinimum cumulant_minimum(const Characteristics& ch, double lo = -10.0, double hi = 10.0);

struct CumulantReport {
  std::vector<double> thetas;
  std::vector<double> kappa;
  std::vector<uint32_t> levels;
  std::vector<std::vector<double>> kappa_level;  // [level index][theta index]
  KappaMinimum minimum;
};

CumulantReport cumulant_report(const Characteristics& ch, std::span<const double> thetas,
                               std::span<const uint32_t> levels);

// Classical self-similar fragmentation embedded as marks = masses: requires
// every atom of nu to have v_i = s_i; picks the drift so the cumulant reduces
// to -c*th + sum w (sum s_i^th - 1).
Characteristics classical_preset(const DislocationMeasure& nu, double c, double alpha = 0.0);

// the binary unit-rate half-half split of that kind
DislocationMeasure binary_classical_measure();
// binary splitting with both halves keeping mark 1 (unit-mark measure)
DislocationMeasure binary_unit_mark_measure();

// binary branching Brownian motion: c = 0, beta = 1, rate-1 half-half split
// with both marks 1, log-marks drifting at the given rate
Characteristics bbm_preset(double drift);

// A self-similar growth-fragmentation cell process: exponent
// phi(q) = -k + (beta/2)q^2 + d q + sum_(w,y) w (e^{yq} - 1 - q y 1{y > -1}),
// jumps y < 0.
struct GrowthFragmentationCell {
  double alpha = 0.0;
  double d = 0.0;
  double beta = 0.0;
  double k = 0.0;                                // killing rate
  std::vector<std::pair<double, double>> jumps;  // (rate, y < 0)
};

double gf_phi(const GrowthFragmentationCell& cell, double q);
// phi(q) + sum rate (1 - e^y)^q: the invariant the embedding must reproduce
double gf_kappa(const GrowthFragmentationCell& cell, double q);

// size profile of the embedded two-interval atoms; the cumulant does not
// depend on this choice, level quantities do
enum class GfSizeChoice { exp_y_one_minus_y, exp_neg_y_squared };

// Embed the cell system as marks of a fragmentation: jumps below -log 2 are
// rewritten through y -> log(1 - e^y) (drift adjusted to keep the cumulant),
// each jump y becomes the atom ((s1(y), e^y), (1-s1(y), 1-e^y)), and killing
// adds k * delta_{(1,0)}.
Characteristics gf_embedding(const GrowthFragmentationCell& cell,
                             GfSizeChoice s1 = GfSizeChoice::exp_y_one_minus_y);

struct MartingalePoint {
  double t = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  double ci_half_width = 0.0;  // 95% normal
  uint64_t replicates = 0;
};

// Monte Carlo means of exp(-t * rate) * S_theta(t) over independent
// replicates of the chosen branching system, where rate is cumulant_level
// (level_n mode) or cumulant (level_infinity mode). Flat means ~ 1.
std::vector<MartingalePoint> martingale_estimate(const Characteristics& ch, double theta,
                                                 std::span<const double> times,
                                                 uint64_t replicates, uint32_t n, uint64_t seed,
                                                 StatisticMode mode = StatisticMode::level_n);

// sup over t of exp(-rate * t) * S_theta(snapshot(t)) along one simulated
// path; exact for beta = 0 trees (piecewise-exponential statistic)
double statistic_path_sup(const GenealogyTree& tree, double theta, double rate);

}  // namespace essf
