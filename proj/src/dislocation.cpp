#include "essf/dislocation.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace essf {

double killing_rate(const Characteristics& ch, uint32_t n) {
  if (n == 0) throw std::invalid_argument("killing_rate: level must be >= 1");
  double rate = n * ch.c;
  for (const auto& atom : ch.lambda.atoms()) {
    double covered = 0.0;
    for (const auto& [s, v] : atom.z.pairs())
      if (v > 0.0) covered += std::pow(s, static_cast<double>(n));
    rate += atom.weight * (1.0 - covered);
  }
  return rate;
}

MarkedPartition erosion_atom(uint32_t n, uint32_t i) {
  if (n == 0 || i == 0 || i > n) throw std::invalid_argument("erosion_atom: i out of range");
  if (n == 1) return MarkedPartition::single_block(1, 0.0);
  std::vector<uint32_t> assignment(n, 1);
  assignment[i - 1] = 2;
  // raw label 1 is the surviving block, raw label 2 the frozen singleton;
  // canonicalization reorders the labels as needed
  return MarkedPartition::from_assignment(std::move(assignment), {1.0, 0.0});
}

std::vector<int32_t> paintbox_interval_assignment(const ZElement& z, uint32_t count, Rng& rng) {
  std::vector<int32_t> idx(count, -1);
  for (uint32_t i = 0; i < count; ++i) {
    const double u = rng.uniform01();
    double acc = 0.0;
    for (size_t k = 0; k < z.size(); ++k) {
      acc += z.s(k);
      if (u < acc) {
        idx[i] = static_cast<int32_t>(k);
        break;
      }
    }
  }
  return idx;
}

MarkedPartition sample_paintbox(const ZElement& z, uint32_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("sample_paintbox: level must be >= 1");
  const auto idx = paintbox_interval_assignment(z, n, rng);
  std::vector<uint32_t> assignment(n, 0);
  std::vector<double> marks;
  std::vector<uint32_t> interval_label(z.size(), 0);
  uint32_t next = 0;
  for (uint32_t i = 0; i < n; ++i) {
    if (idx[i] < 0) {
      assignment[i] = ++next;
      marks.push_back(0.0);
    } else {
      auto& lab = interval_label[static_cast<size_t>(idx[i])];
      if (lab == 0) {
        lab = ++next;
        marks.push_back(z.v(static_cast<size_t>(idx[i])));
      }
      assignment[i] = lab;
    }
  }
  return MarkedPartition::from_assignment(std::move(assignment), std::move(marks));
}

std::optional<MarkedPartition> propose_level_event(const Characteristics& ch, uint32_t n,
                                                   Rng& rng) {
  const double erosion = n * ch.c;
  const double total = erosion + ch.lambda.total_mass();
  if (!(total > 0.0)) throw std::invalid_argument("propose_level_event: zero proposal rate");
  if (rng.uniform01() * total < erosion)
    return erosion_atom(n, 1 + static_cast<uint32_t>(rng.below(n)));
  std::vector<double> weights;
  weights.reserve(ch.lambda.size());
  for (const auto& a : ch.lambda.atoms()) weights.push_back(a.weight);
  const size_t k = rng.categorical(weights, ch.lambda.total_mass());
  MarkedPartition x = sample_paintbox(ch.lambda.atoms()[k].z, n, rng);
  const bool mark_jump = x.is_single_block() && x.mark_of_block(1) > 0.0;
  if (mark_jump) return std::nullopt;
  return x;
}

MarkedPartition sample_dislocation(const Characteristics& ch, uint32_t n, Rng& rng) {
  if (killing_rate(ch, n) <= 0.0)
    throw std::invalid_argument("sample_dislocation: level never dislocates (killing rate 0)");
  for (;;) {
    if (auto x = propose_level_event(ch, n, rng)) return std::move(*x);
  }
}

std::vector<std::pair<double, double>> level_jump_rates(const Characteristics& ch, uint32_t n) {
  if (n == 0) throw std::invalid_argument("level_jump_rates: level must be >= 1");
  std::map<double, double> by_jump;  // exact equality of jump values, no fuzzy merging
  for (const auto& atom : ch.lambda.atoms()) {
    for (const auto& [s, v] : atom.z.pairs()) {
      if (v <= 0.0 || v == 1.0) continue;
      by_jump[std::log(v)] += atom.weight * std::pow(s, static_cast<double>(n));
    }
  }
  std::vector<std::pair<double, double>> out;
  out.reserve(by_jump.size());
  for (const auto& [jump, rate] : by_jump)
    if (rate > 0.0) out.emplace_back(rate, jump);
  return out;
}

double effective_drift(const Characteristics& ch) {
  double comp = 0.0;
  for (const auto& atom : ch.lambda.atoms()) {
    if (atom.z.size() == 0) continue;
    const double v1 = atom.z.v(0);
    if (v1 <= 0.0) continue;
    const double lv = std::log(v1);
    if (std::abs(lv) <= 1.0) comp += atom.weight * lv;
  }
  return ch.d - comp;
}

}  // namespace essf
