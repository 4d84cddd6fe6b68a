#include "essf/zspace.hpp"

#include <cmath>
#include <stdexcept>

namespace essf {

ZElement::ZElement(std::vector<std::pair<double, double>> pairs) {
  double mass = 0.0;
  for (size_t k = 0; k < pairs.size(); ++k) {
    const auto [s, v] = pairs[k];
    if (!(s >= 0.0) || s > 1.0 || !std::isfinite(s))
      throw std::invalid_argument("ZElement: sizes must lie in [0,1]");
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("ZElement: marks must be finite and >= 0");
    if (s == 0.0 && v != 0.0)
      throw std::invalid_argument("ZElement: size 0 forces mark 0");
    if (k > 0) {
      const auto [sp, vp] = pairs[k - 1];
      const bool ordered = sp > s || (sp == s && vp >= v);
      if (!ordered)
        throw std::invalid_argument("ZElement: pairs must be lexicographically nonincreasing");
    }
    mass += s;
  }
  if (mass > 1.0 + kMassTol)
    throw std::invalid_argument("ZElement: sizes sum beyond 1");
  while (!pairs.empty() && pairs.back().first == 0.0) pairs.pop_back();
  pairs_ = std::move(pairs);
  mass_ = mass;
}

ZElement ZElement::unit(double v) { return ZElement({{1.0, v}}); }

DislocationMeasure::DislocationMeasure(std::vector<Atom> atoms) {
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.weight > 0.0) || !std::isfinite(a.weight))
      throw std::invalid_argument("DislocationMeasure: atom weights must be finite and > 0");
    if (a.z.is_unit_one())
      throw std::invalid_argument("DislocationMeasure: no atom at the trivial element (1,1)");
    total += a.weight;
  }
  atoms_ = std::move(atoms);
  total_mass_ = total;
}

TruncatedMeasure DislocationMeasure::filtered(
    const std::function<bool(double, const ZElement&)>& keep) const {
  std::vector<Atom> kept;
  double dropped = 0.0;
  for (const auto& a : atoms_) {
    if (keep(a.weight, a.z))
      kept.push_back(a);
    else
      dropped += a.weight * integrability_integrand(a.z);
  }
  return {DislocationMeasure(std::move(kept)), dropped};
}

double integrability_integrand(const ZElement& z) {
  const double s1 = z.size() ? z.s(0) : 0.0;
  const double v1 = z.size() ? z.v(0) : 0.0;
  if (v1 <= 0.0) return 1.0;
  const double lv = std::log(v1);
  return 1.0 - s1 + std::min(lv * lv, 1.0);
}

double integrability_value(const DislocationMeasure& lambda) {
  double out = 0.0;
  for (const auto& a : lambda.atoms()) out += a.weight * integrability_integrand(a.z);
  return out;
}

void Characteristics::validate() const {
  if (!(c >= 0.0) || !std::isfinite(c))
    throw std::invalid_argument("characteristics: erosion rate c must be finite and >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("characteristics: gaussian rate beta must be finite and >= 0");
  if (!std::isfinite(d)) throw std::invalid_argument("characteristics: drift d must be finite");
  if (!std::isfinite(alpha))
    throw std::invalid_argument("characteristics: index alpha must be finite");
  if (!std::isfinite(integrability_value(lambda)))
    throw std::invalid_argument("characteristics: dislocation measure fails integrability");
}

}  // namespace essf
