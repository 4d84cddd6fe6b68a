#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace essf {

// An element of the dislocation state space: lexicographically nonincreasing
// (size, mark) pairs with sizes summing to at most 1 and an implicit zero
// tail. size 0 forces mark 0, and such pairs are dropped.
class ZElement {
 public:
  static constexpr double kMassTol = 1e-12;

  ZElement() = default;  // pure dust: every sampled integer is a frozen singleton
  explicit ZElement(std::vector<std::pair<double, double>> pairs);

  // the distinguished single-interval element (s1 = 1, v1 = v)
  static ZElement unit(double v);

  size_t size() const { return pairs_.size(); }
  double s(size_t k) const { return pairs_[k].first; }
  double v(size_t k) const { return pairs_[k].second; }
  const std::vector<std::pair<double, double>>& pairs() const { return pairs_; }

  double mass() const { return mass_; }
  bool is_unit_one() const {
    return pairs_.size() == 1 && pairs_[0].first == 1.0 && pairs_[0].second == 1.0;
  }

  bool operator==(const ZElement& other) const { return pairs_ == other.pairs_; }

 private:
  std::vector<std::pair<double, double>> pairs_;
  double mass_ = 0.0;
};

struct TruncatedMeasure;

// Finite atomic dislocation measure. Atom weights are positive and no atom
// sits at the trivial element (s1, v1) = (1, 1).
class DislocationMeasure {
 public:
  struct Atom {
    double weight;
    ZElement z;
  };

  DislocationMeasure() = default;
  explicit DislocationMeasure(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  double total_mass() const { return total_mass_; }

  // Truncation hook for infinite-activity approximations: keep atoms the
  // predicate accepts, report the integrability mass that was dropped. No
  // error-control claim is attached to this.
  TruncatedMeasure filtered(const std::function<bool(double weight, const ZElement&)>& keep) const;

 private:
  std::vector<Atom> atoms_;
  double total_mass_ = 0.0;
};

struct TruncatedMeasure {
  DislocationMeasure measure;
  double dropped_integrability_mass = 0.0;
};

// integrand of the finiteness functional for one atom (weight 1)
double integrability_integrand(const ZElement& z);
// sum of weight * integrand over atoms
double integrability_value(const DislocationMeasure& lambda);

// Full parameterization of a homogeneous process plus the self-similarity
// index: erosion rate c, log-mark drift d, Gaussian rate beta, dislocation
// measure lambda.
struct Characteristics {
  double alpha = 0.0;
  double c = 0.0;
  double d = 0.0;
  double beta = 0.0;
  DislocationMeasure lambda;

  void validate() const;
  Characteristics with_alpha(double a) const {
    Characteristics out = *this;
    out.alpha = a;
    return out;
  }
};

}  // namespace essf
