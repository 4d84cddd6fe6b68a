#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "essf/rng.hpp"
#include "essf/zspace.hpp"

namespace essf {

// Level-n moment exponent of the killed log-mark process (movement part):
// d*th + (beta/2)*th^2
//   + sum_atoms w * (sum_{v_i>0} s_i^n (v_i^th - 1) - th log v1 1{v1>0,|log v1|<=1}).
// Finite for every th when the measure is finite atomic.
double level_moment_exponent(const Characteristics& ch, uint32_t n, double theta);

struct LevyTriplet {
  double drift = 0.0;     // effective drift between uncompensated jumps
  double gaussian = 0.0;  // beta
  std::vector<std::pair<double, double>> jumps;  // (rate, jump), from level_jump_rates
};

// One continuous stretch of a block's log-mark path between jump events.
// grid holds interior (time, log_mark) samples, strictly increasing and
// strictly inside (t_start, t_end); exact means the path is affine (no
// Gaussian part) so integrals over it have closed forms.
struct MarkPathSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  double log_mark_start = 0.0;
  double log_mark_end = 0.0;
  std::vector<std::pair<double, double>> grid;
  bool exact = true;
  double grid_step = 0.0;  // lattice step the grid was sampled on (0 = none)

  double length() const { return t_end - t_start; }
  // log mark at an in-segment time; for inexact segments t must be an
  // endpoint or a grid node unless interpolate is set, in which case the
  // value is linear between the surrounding grid nodes (grid-approximate)
  double log_mark_at(double t, bool interpolate = false) const;
};

// Evolve a log-mark forward over [t_start, t_start + dt] with the continuous
// triplet (drift, gaussian). Gaussian increments are sampled sequentially at
// the declared query times (strictly inside the interval), then the endpoint;
// there is no discretization error. grid_step > 0 additionally samples a
// lattice t_start + k*grid_step, needed by gridded Lamperti integrals.
MarkPathSegment evolve_mark(double t_start, double log_mark_start, double dt, double drift,
                            double gaussian, Rng& rng, std::span<const double> query_times,
                            double grid_step = 0.0);

struct LampertiResult {
  double value = 0.0;
  bool converged = true;  // gridded self-check: trapezoid vs double-step trapezoid
};

// integral of exp(alpha * log_mark(s)) ds over the segment
LampertiResult lamperti_integral(const MarkPathSegment& seg, double alpha);
LampertiResult lamperti_integral(std::span<const MarkPathSegment> segments, double alpha);

// First homogeneous time u with integral-from-start equal to tau_target;
// +infinity when the whole accumulation falls short. Segments must be
// contiguous in time.
double lamperti_inverse(std::span<const MarkPathSegment> segments, double alpha,
                        double tau_target);

}  // namespace essf
