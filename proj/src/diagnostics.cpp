#include "essf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

#include "essf/dislocation.hpp"
#include "essf/levy.hpp"

namespace essf {

double additive_statistic(const MarkedPartition& x, double theta) {
  double out = 0.0;
  for (double v : x.marks()) out += pow_zero_convention(v, theta);
  return out;
}

namespace {

// shared atom term: sum_{v>0} v^th * weight_of_row - 1 - th log v1 1{|log v1|<=1}
double atom_cumulant_term(const ZElement& z, double theta,
                          const std::function<double(double s)>& row_weight) {
  double term = -1.0;
  for (const auto& [s, v] : z.pairs()) {
    if (v <= 0.0) continue;
    term += pow_zero_convention(v, theta) * row_weight(s);
  }
  if (z.size() > 0 && z.v(0) > 0.0) {
    const double lv = std::log(z.v(0));
    if (std::abs(lv) <= 1.0) term -= theta * lv;
  }
  return term;
}

}  // namespace

double cumulant(const Characteristics& ch, double theta) {
  double out = ch.d * theta + 0.5 * ch.beta * theta * theta;
  for (const auto& atom : ch.lambda.atoms())
    out += atom.weight * atom_cumulant_term(atom.z, theta, [](double) { return 1.0; });
  return out;
}

double cumulant_level(const Characteristics& ch, uint32_t n, double theta) {
  if (n == 0) throw std::invalid_argument("cumulant_level: level must be >= 1");
  double out = ch.d * theta + 0.5 * ch.beta * theta * theta;
  if (n == 1) out -= ch.c;  // the erosion of a lone label freezes it
  const double nd = static_cast<double>(n);
  for (const auto& atom : ch.lambda.atoms())
    out += atom.weight * atom_cumulant_term(atom.z, theta, [nd](double s) {
      return -std::expm1(nd * std::log1p(-s));  // 1 - (1-s)^n, occupation probability
    });
  return out;
}

MonteCarloValue cumulant_level_mc(const Characteristics& ch, uint32_t n, double theta,
                                  uint64_t replicates, Rng& rng) {
  const double a = level_moment_exponent(ch, n, theta);
  const double jn = killing_rate(ch, n);
  MonteCarloValue out;
  out.replicates = replicates;
  if (jn <= 0.0) {
    out.mean = a;
    return out;
  }
  double sum = 0.0, sumsq = 0.0;
  for (uint64_t r = 0; r < replicates; ++r) {
    const MarkedPartition x = sample_dislocation(ch, n, rng);
    const double s = additive_statistic(x, theta) - 1.0;
    sum += s;
    sumsq += s * s;
  }
  const double mean = sum / static_cast<double>(replicates);
  const double var =
      std::max(0.0, sumsq / static_cast<double>(replicates) - mean * mean);
  out.mean = a + jn * mean;
  out.std_error = jn * std::sqrt(var / static_cast<double>(replicates));
  return out;
}

KappaMinimum cumulant_minimum(const Characteristics& ch, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("cumulant_minimum: need lo < hi");
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = cumulant(ch, c1), f2 = cumulant(ch, c2);
  for (int it = 0; it < 200 && (b - a) > 1e-10; ++it) {
    if (f1 < f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - gr * (b - a);
      f1 = cumulant(ch, c1);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + gr * (b - a);
      f2 = cumulant(ch, c2);
    }
  }
  KappaMinimum out;
  out.theta_star = 0.5 * (a + b);
  out.value = cumulant(ch, out.theta_star);
  out.negative_found = out.value < 0.0 && out.theta_star != 0.0;
  return out;
}

CumulantReport cumulant_report(const Characteristics& ch, std::span<const double> thetas,
                               std::span<const uint32_t> levels) {
  CumulantReport rep;
  rep.thetas.assign(thetas.begin(), thetas.end());
  rep.levels.assign(levels.begin(), levels.end());
  rep.kappa.reserve(thetas.size());
  for (double th : thetas) rep.kappa.push_back(cumulant(ch, th));
  rep.kappa_level.resize(levels.size());
  for (size_t li = 0; li < levels.size(); ++li) {
    rep.kappa_level[li].reserve(thetas.size());
    for (double th : thetas) rep.kappa_level[li].push_back(cumulant_level(ch, rep.levels[li], th));
  }
  rep.minimum = cumulant_minimum(ch);
  return rep;
}

Characteristics classical_preset(const DislocationMeasure& nu, double c, double alpha) {
  if (!(c >= 0.0)) throw std::invalid_argument("classical_preset: c must be >= 0");
  double comp = 0.0;
  for (const auto& atom : nu.atoms()) {
    for (const auto& [s, v] : atom.z.pairs())
      if (v != s) throw std::invalid_argument("classical_preset: atoms must have marks = sizes");
    if (atom.z.size() > 0 && atom.z.s(0) > 0.0) {
      const double ls = std::log(atom.z.s(0));
      if (std::abs(ls) <= 1.0) comp += atom.weight * ls;
    }
  }
  Characteristics ch;
  ch.alpha = alpha;
  ch.c = c;
  ch.d = -c + comp;
  ch.beta = 0.0;
  ch.lambda = nu;
  ch.validate();
  return ch;
}

DislocationMeasure binary_classical_measure() {
  return DislocationMeasure({{1.0, ZElement({{0.5, 0.5}, {0.5, 0.5}})}});
}

DislocationMeasure binary_unit_mark_measure() {
  return DislocationMeasure({{1.0, ZElement({{0.5, 1.0}, {0.5, 1.0}})}});
}

Characteristics bbm_preset(double drift) {
  Characteristics ch;
  ch.alpha = 0.0;
  ch.c = 0.0;
  ch.d = drift;
  ch.beta = 1.0;
  ch.lambda = binary_unit_mark_measure();
  ch.validate();
  return ch;
}

double gf_phi(const GrowthFragmentationCell& cell, double q) {
  double out = -cell.k + 0.5 * cell.beta * q * q + cell.d * q;
  for (const auto& [w, y] : cell.jumps)
    out += w * (std::exp(y * q) - 1.0 - (y > -1.0 ? q * y : 0.0));
  return out;
}

double gf_kappa(const GrowthFragmentationCell& cell, double q) {
  double out = gf_phi(cell, q);
  for (const auto& [w, y] : cell.jumps) out += w * std::pow(-std::expm1(y), q);
  return out;
}

Characteristics gf_embedding(const GrowthFragmentationCell& cell, GfSizeChoice s1) {
  const double log_half = -std::log(2.0);
  auto s1_of = [s1](double y) {
    switch (s1) {
      case GfSizeChoice::exp_y_one_minus_y:
        return std::exp(y) * (1.0 - y);
      case GfSizeChoice::exp_neg_y_squared:
        return std::exp(-y * y);
    }
    return 0.0;
  };
  double drift = cell.d;
  std::vector<DislocationMeasure::Atom> atoms;
  atoms.reserve(cell.jumps.size() + 1);
  for (const auto& [w, y] : cell.jumps) {
    if (!(w > 0.0)) throw std::invalid_argument("gf_embedding: rates must be > 0");
    if (!(y < 0.0)) throw std::invalid_argument("gf_embedding: jumps must be negative");
    double yy = y;
    if (y < log_half) {
      // keep the larger piece: push y through log(1 - e^y) and move the
      // compensator difference into the drift so the cumulant is unchanged
      yy = std::log(-std::expm1(y));
      drift += w * (yy - (y > -1.0 ? y : 0.0));
    }
    const double v1 = std::exp(yy);
    const double s = s1_of(yy);
    if (!(s >= 0.5) || s > 1.0)
      throw std::invalid_argument("gf_embedding: size choice breaks the atom ordering");
    std::vector<std::pair<double, double>> pairs{{s, v1}};
    if (s < 1.0) pairs.emplace_back(1.0 - s, 1.0 - v1);
    atoms.push_back({w, ZElement(std::move(pairs))});
  }
  if (cell.k > 0.0) atoms.push_back({cell.k, ZElement::unit(0.0)});
  Characteristics ch;
  ch.alpha = cell.alpha;
  ch.c = 0.0;
  ch.d = drift;
  ch.beta = cell.beta;
  ch.lambda = DislocationMeasure(std::move(atoms));
  ch.validate();
  return ch;
}

std::vector<MartingalePoint> martingale_estimate(const Characteristics& ch, double theta,
                                                 std::span<const double> times,
                                                 uint64_t replicates, uint32_t n, uint64_t seed,
                                                 StatisticMode mode) {
  std::vector<double> ts(times.begin(), times.end());
  std::sort(ts.begin(), ts.end());
  std::vector<double> scale(ts.size());
  for (size_t i = 0; i < ts.size(); ++i) {
    const double rate = mode == StatisticMode::level_n ? cumulant_level(ch, n, theta)
                                                       : cumulant(ch, theta);
    scale[i] = std::exp(-ts[i] * rate);
  }
  std::vector<double> sum(ts.size(), 0.0), sumsq(ts.size(), 0.0);
  const double thetas[1] = {theta};
  for (uint64_t r = 0; r < replicates; ++r) {
    Rng rng = Rng::stream(seed, r);
    const auto stat = run_additive_statistic(ch, mode, n, ts, thetas, rng);
    for (size_t i = 0; i < ts.size(); ++i) {
      const double v = scale[i] * stat[i][0];
      sum[i] += v;
      sumsq[i] += v * v;
    }
  }
  std::vector<MartingalePoint> out(ts.size());
  for (size_t i = 0; i < ts.size(); ++i) {
    const double mean = sum[i] / static_cast<double>(replicates);
    const double var =
        std::max(0.0, sumsq[i] / static_cast<double>(replicates) - mean * mean);
    out[i].t = ts[i];
    out[i].mean = mean;
    out[i].std_error = std::sqrt(var / static_cast<double>(replicates));
    out[i].ci_half_width = 1.959963984540054 * out[i].std_error;
    out[i].replicates = replicates;
  }
  return out;
}

double statistic_path_sup(const GenealogyTree& tree, double theta, double rate) {
  if (tree.characteristics.beta != 0.0)
    throw std::invalid_argument("statistic_path_sup: exact only for beta = 0");
  const double drift = effective_drift(tree.characteristics);
  std::set<double> boundary_set{0.0};
  for (const auto& nd : tree.nodes) {
    boundary_set.insert(nd.birth_time);
    if (nd.death_time <= tree.horizon) boundary_set.insert(nd.death_time);
    for (const auto& seg : nd.segments) boundary_set.insert(seg.t_start);
  }
  if (!tree.complete()) boundary_set.insert(tree.horizon);
  std::vector<double> boundaries(boundary_set.begin(), boundary_set.end());
  double sup = 0.0;
  double prev_t = 0.0, prev_s = 0.0;
  for (size_t i = 0; i < boundaries.size(); ++i) {
    const double t = boundaries[i];
    if (i > 0) {
      // left limit from the previous post-event value
      const double s_left = prev_s * std::exp(theta * drift * (t - prev_t));
      sup = std::max(sup, std::exp(-rate * t) * s_left);
    }
    const double s_right = additive_statistic(snapshot(tree, t), theta);
    sup = std::max(sup, std::exp(-rate * t) * s_right);
    prev_t = t;
    prev_s = s_right;
  }
  return sup;
}

}  // namespace essf
