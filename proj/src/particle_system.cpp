#include "essf/particle_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "essf/dislocation.hpp"

namespace essf {

namespace {

struct Particle {
  double birth;
  double log_mark;
};

}  // namespace

std::vector<std::vector<double>> run_additive_statistic(const Characteristics& ch,
                                                        StatisticMode mode, uint32_t n,
                                                        std::span<const double> times,
                                                        std::span<const double> thetas, Rng& rng,
                                                        const ParticleRunOptions& opts) {
  ch.validate();
  if (mode == StatisticMode::level_n && n == 0)
    throw std::invalid_argument("run_additive_statistic: level must be >= 1");
  if (times.empty()) throw std::invalid_argument("run_additive_statistic: no query times");
  std::vector<double> ts(times.begin(), times.end());
  if (!std::is_sorted(ts.begin(), ts.end()))
    throw std::invalid_argument("run_additive_statistic: times must be sorted");
  const double horizon = ts.back();

  const double drift = effective_drift(ch);
  const double lambda_mass = ch.lambda.total_mass();
  const double rate = (mode == StatisticMode::level_n ? n * ch.c : 0.0) + lambda_mass;
  std::vector<double> atom_weights;
  atom_weights.reserve(ch.lambda.size());
  for (const auto& a : ch.lambda.atoms()) atom_weights.push_back(a.weight);

  std::vector<std::vector<double>> stat(ts.size(), std::vector<double>(thetas.size(), 0.0));
  auto contribute = [&](size_t q, double log_mark) {
    for (size_t k = 0; k < thetas.size(); ++k) stat[q][k] += std::exp(thetas[k] * log_mark);
  };

  uint64_t events = 0;
  std::vector<Particle> stack{{0.0, 0.0}};
  while (!stack.empty()) {
    Particle p = stack.back();
    stack.pop_back();
    double t = p.birth;
    double logv = p.log_mark;
    // first query index not before the particle's birth
    size_t q = static_cast<size_t>(std::lower_bound(ts.begin(), ts.end(), t) - ts.begin());

    for (;;) {
      if (++events > opts.max_events)
        throw std::runtime_error("run_additive_statistic: particle event budget exceeded");
      const double dt =
          rate > 0.0 ? rng.exponential(rate) : std::numeric_limits<double>::infinity();
      const double t_next = t + dt;
      // extend the continuous path over [t, min(t_next, horizon)], touching
      // the query times in order
      while (q < ts.size() && (ts[q] < t_next || (t_next > horizon && ts[q] <= horizon))) {
        const double h = ts[q] - t;
        if (h > 0.0) {
          logv += drift * h + (ch.beta > 0.0 ? std::sqrt(ch.beta * h) * rng.normal() : 0.0);
          t = ts[q];
        }
        contribute(q, logv);
        ++q;
      }
      if (t_next > horizon) break;  // particle alive through the last query time
      {
        const double h = t_next - t;
        if (h > 0.0) {
          logv += drift * h + (ch.beta > 0.0 ? std::sqrt(ch.beta * h) * rng.normal() : 0.0);
          t = t_next;
        }
      }

      if (mode == StatisticMode::level_n && rng.uniform01() * rate < n * ch.c) {
        if (n == 1) goto particle_done;  // the lone tracked label detaches frozen
        continue;                        // erosion refreshes to multiplier 1
      }
      const size_t ai = rng.categorical(atom_weights, lambda_mass);
      const ZElement& z = ch.lambda.atoms()[ai].z;
      double first_child = 0.0;
      bool have_child = false;
      if (mode == StatisticMode::level_n) {
        const auto idx = paintbox_interval_assignment(z, n, rng);
        std::vector<bool> occupied(z.size(), false);
        for (int32_t ix : idx)
          if (ix >= 0) occupied[static_cast<size_t>(ix)] = true;
        for (size_t j = 0; j < z.size(); ++j) {
          if (!occupied[j] || z.v(j) <= 0.0) continue;
          if (!have_child) {
            first_child = std::log(z.v(j));
            have_child = true;
          } else {
            stack.push_back({t, logv + std::log(z.v(j))});
          }
        }
      } else {
        for (size_t j = 0; j < z.size(); ++j) {
          if (z.v(j) <= 0.0) continue;
          if (!have_child) {
            first_child = std::log(z.v(j));
            have_child = true;
          } else {
            stack.push_back({t, logv + std::log(z.v(j))});
          }
        }
      }
      if (!have_child) goto particle_done;  // frozen in every direction
      logv += first_child;
    }
  particle_done:;
  }
  return stat;
}

}  // namespace essf
