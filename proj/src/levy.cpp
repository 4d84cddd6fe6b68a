#include "essf/levy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace essf {

namespace {

constexpr double kExpLinearTol = 1e-8;   // switch to the limit formula
constexpr double kGridCheckTol = 1e-4;   // halving self-check threshold

// integral over [0, h] of exp(l0 + (l1 - l0) * s / h) with the affine model
double affine_exp_integral(double l0, double l1, double h) {
  if (h <= 0.0) return 0.0;
  const double dl = l1 - l0;
  if (std::abs(dl) < kExpLinearTol) return h * std::exp(0.5 * (l0 + l1));
  return h * std::exp(l0) * std::expm1(dl) / dl;
}

}  // namespace

double level_moment_exponent(const Characteristics& ch, uint32_t n, double theta) {
  if (n == 0) throw std::invalid_argument("level_moment_exponent: level must be >= 1");
  double out = ch.d * theta + 0.5 * ch.beta * theta * theta;
  for (const auto& atom : ch.lambda.atoms()) {
    double term = 0.0;
    for (const auto& [s, v] : atom.z.pairs()) {
      if (v <= 0.0) continue;
      term += std::pow(s, static_cast<double>(n)) * (pow_zero_convention(v, theta) - 1.0);
    }
    if (atom.z.size() > 0 && atom.z.v(0) > 0.0) {
      const double lv = std::log(atom.z.v(0));
      if (std::abs(lv) <= 1.0) term -= theta * lv;
    }
    out += atom.weight * term;
  }
  return out;
}

double MarkPathSegment::log_mark_at(double t, bool interpolate) const {
  if (t < t_start || t > t_end)
    throw std::invalid_argument("log_mark_at: time outside segment");
  if (t == t_start) return log_mark_start;
  if (t == t_end) return log_mark_end;
  if (exact) {
    const double h = length();
    return h > 0.0 ? log_mark_start + (log_mark_end - log_mark_start) * (t - t_start) / h
                   : log_mark_start;
  }
  double ta = t_start, la = log_mark_start;
  for (const auto& [gt, gl] : grid) {
    if (gt == t) return gl;
    if (gt > t) {
      if (!interpolate) break;
      return la + (gl - la) * (t - ta) / (gt - ta);
    }
    ta = gt;
    la = gl;
  }
  if (interpolate)
    return la + (log_mark_end - la) * (t - ta) / (t_end - ta);
  throw std::invalid_argument("log_mark_at: time not sampled on this segment");
}

MarkPathSegment evolve_mark(double t_start, double log_mark_start, double dt, double drift,
                            double gaussian, Rng& rng, std::span<const double> query_times,
                            double grid_step) {
  if (!(dt > 0.0)) throw std::invalid_argument("evolve_mark: dt must be > 0");
  MarkPathSegment seg;
  seg.t_start = t_start;
  seg.t_end = t_start + dt;
  seg.log_mark_start = log_mark_start;
  seg.exact = gaussian == 0.0;
  seg.grid_step = grid_step;

  std::vector<double> ts;
  for (double q : query_times)
    if (q > t_start && q < seg.t_end) ts.push_back(q);
  if (grid_step > 0.0 && !seg.exact) {
    for (double g = t_start + grid_step; g < seg.t_end; g += grid_step) ts.push_back(g);
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  if (seg.exact) {
    seg.log_mark_end = log_mark_start + drift * dt;
    seg.grid.reserve(ts.size());
    for (double t : ts)
      seg.grid.emplace_back(t, log_mark_start + drift * (t - t_start));
    return seg;
  }
  const double sd = std::sqrt(gaussian);
  double t = t_start;
  double l = log_mark_start;
  seg.grid.reserve(ts.size());
  for (double q : ts) {
    const double h = q - t;
    l += drift * h + sd * std::sqrt(h) * rng.normal();
    t = q;
    seg.grid.emplace_back(t, l);
  }
  const double h = seg.t_end - t;
  seg.log_mark_end = l + drift * h + sd * std::sqrt(h) * rng.normal();
  return seg;
}

LampertiResult lamperti_integral(const MarkPathSegment& seg, double alpha) {
  LampertiResult out;
  if (seg.length() <= 0.0) return out;
  if (alpha == 0.0) {
    out.value = seg.length();
    return out;
  }
  if (seg.exact) {
    out.value = affine_exp_integral(alpha * seg.log_mark_start, alpha * seg.log_mark_end,
                                    seg.length());
    return out;
  }
  if (seg.grid.empty() && seg.grid_step <= 0.0)
    throw std::invalid_argument("lamperti_integral: gaussian segment carries no grid");
  // trapezoid over (start, grid..., end)
  std::vector<std::pair<double, double>> nodes;
  nodes.reserve(seg.grid.size() + 2);
  nodes.emplace_back(seg.t_start, seg.log_mark_start);
  nodes.insert(nodes.end(), seg.grid.begin(), seg.grid.end());
  nodes.emplace_back(seg.t_end, seg.log_mark_end);
  auto trapezoid = [&](size_t stride) {
    double acc = 0.0;
    size_t prev = 0;
    for (size_t i = stride; i < nodes.size(); i += stride) {
      acc += 0.5 * (nodes[i].first - nodes[prev].first) *
             (std::exp(alpha * nodes[prev].second) + std::exp(alpha * nodes[i].second));
      prev = i;
    }
    if (prev + 1 < nodes.size()) {
      const size_t last = nodes.size() - 1;
      acc += 0.5 * (nodes[last].first - nodes[prev].first) *
             (std::exp(alpha * nodes[prev].second) + std::exp(alpha * nodes[last].second));
    }
    return acc;
  };
  out.value = trapezoid(1);
  if (nodes.size() > 2) {
    const double coarse = trapezoid(2);
    const double scale = std::max(std::abs(out.value), 1e-300);
    out.converged = std::abs(out.value - coarse) <= kGridCheckTol * scale;
  }
  return out;
}

LampertiResult lamperti_integral(std::span<const MarkPathSegment> segments, double alpha) {
  LampertiResult out;
  for (const auto& seg : segments) {
    const auto part = lamperti_integral(seg, alpha);
    out.value += part.value;
    out.converged = out.converged && part.converged;
  }
  return out;
}

double lamperti_inverse(std::span<const MarkPathSegment> segments, double alpha,
                        double tau_target) {
  if (tau_target < 0.0) throw std::invalid_argument("lamperti_inverse: negative target");
  if (segments.empty())
    return tau_target == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  if (tau_target == 0.0) return segments.front().t_start;
  double remaining = tau_target;
  for (const auto& seg : segments) {
    const double total = lamperti_integral(seg, alpha).value;
    if (total < remaining) {
      remaining -= total;
      continue;
    }
    // invert within this segment
    if (alpha == 0.0) return seg.t_start + remaining;
    if (seg.exact) {
      const double h = seg.length();
      const double l0 = alpha * seg.log_mark_start;
      const double dl = alpha * (seg.log_mark_end - seg.log_mark_start);
      if (std::abs(dl) < kExpLinearTol) {
        const double f = std::exp(l0 + (h > 0 ? 0.5 * dl : 0.0));
        return seg.t_start + remaining / f;
      }
      const double rate = dl / h;
      return seg.t_start + std::log1p(remaining * rate * std::exp(-l0)) / rate;
    }
    std::vector<std::pair<double, double>> nodes;
    nodes.reserve(seg.grid.size() + 2);
    nodes.emplace_back(seg.t_start, seg.log_mark_start);
    nodes.insert(nodes.end(), seg.grid.begin(), seg.grid.end());
    nodes.emplace_back(seg.t_end, seg.log_mark_end);
    for (size_t i = 1; i < nodes.size(); ++i) {
      const double h = nodes[i].first - nodes[i - 1].first;
      const double fa = std::exp(alpha * nodes[i - 1].second);
      const double fb = std::exp(alpha * nodes[i].second);
      const double cell = 0.5 * h * (fa + fb);
      if (cell < remaining) {
        remaining -= cell;
        continue;
      }
      // integrand modeled linear on the cell: remaining = fa*x + g*x^2/2
      const double g = h > 0.0 ? (fb - fa) / h : 0.0;
      double x;
      if (std::abs(g) * h < kExpLinearTol * fa) {
        x = remaining / fa;
      } else {
        x = (std::sqrt(fa * fa + 2.0 * g * remaining) - fa) / g;
      }
      return nodes[i - 1].first + std::min(x, h);
    }
    return seg.t_end;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace essf
