#include "essf/marked_partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace essf {

namespace {

void check_mark(double m) {
  if (!(m >= 0.0) || !std::isfinite(m))
    throw std::invalid_argument("marked partition: marks must be finite and >= 0");
}

}  // namespace

MarkedPartition MarkedPartition::from_assignment(std::vector<uint32_t> assignment,
                                                 std::vector<double> marks_per_label) {
  if (assignment.empty()) throw std::invalid_argument("marked partition: level must be >= 1");
  const uint32_t n = static_cast<uint32_t>(assignment.size());
  // relabel in first-occurrence order
  std::vector<uint32_t> relabel(marks_per_label.size() + 1, 0);
  std::vector<double> marks;
  std::vector<uint32_t> canon(n);
  uint32_t next = 0;
  for (uint32_t i = 0; i < n; ++i) {
    const uint32_t raw = assignment[i];
    if (raw == 0 || raw > marks_per_label.size())
      throw std::invalid_argument("marked partition: label out of range of the marks vector");
    if (relabel[raw] == 0) {
      relabel[raw] = ++next;
      check_mark(marks_per_label[raw - 1]);
      marks.push_back(marks_per_label[raw - 1]);
    }
    canon[i] = relabel[raw];
  }
  // labels that never occur simply drop out (restriction does this a lot)
  MarkedPartition x;
  x.assignment_ = std::move(canon);
  x.marks_ = std::move(marks);
  return x;
}

MarkedPartition MarkedPartition::single_block(uint32_t level, double mark) {
  if (level == 0) throw std::invalid_argument("marked partition: level must be >= 1");
  check_mark(mark);
  MarkedPartition x;
  x.assignment_.assign(level, 1);
  x.marks_.assign(1, mark);
  return x;
}

MarkedPartition MarkedPartition::singletons(uint32_t level, double mark) {
  if (level == 0) throw std::invalid_argument("marked partition: level must be >= 1");
  check_mark(mark);
  MarkedPartition x;
  x.assignment_.resize(level);
  for (uint32_t i = 0; i < level; ++i) x.assignment_[i] = i + 1;
  x.marks_.assign(level, mark);
  return x;
}

uint32_t MarkedPartition::label_of(uint32_t i) const {
  if (i == 0 || i > level()) throw std::invalid_argument("label_of: integer out of range");
  return assignment_[i - 1];
}

double MarkedPartition::mark_of_block(uint32_t label) const {
  if (label == 0 || label > block_count()) throw std::invalid_argument("mark_of_block: bad label");
  return marks_[label - 1];
}

std::vector<uint32_t> MarkedPartition::members(uint32_t label) const {
  if (label == 0 || label > block_count()) throw std::invalid_argument("members: bad label");
  std::vector<uint32_t> out;
  for (uint32_t i = 0; i < level(); ++i)
    if (assignment_[i] == label) out.push_back(i + 1);
  return out;
}

std::string MarkedPartition::shape_key() const {
  std::string key;
  for (uint32_t a : assignment_) {
    key += std::to_string(a);
    key += ' ';
  }
  return key;
}

std::string MarkedPartition::to_text() const {
  std::string out = "n=" + std::to_string(level()) + "\n";
  for (uint32_t i = 0; i < level(); ++i) {
    if (i) out += ' ';
    out += std::to_string(assignment_[i]);
  }
  out += '\n';
  char buf[40];
  for (uint32_t k = 0; k < block_count(); ++k) {
    if (k) out += ' ';
    if (marks_[k] == 0.0) {
      out += '0';
    } else {
      std::snprintf(buf, sizeof(buf), "%.17g", marks_[k]);
      out += buf;
    }
  }
  out += '\n';
  return out;
}

MarkedPartition MarkedPartition::from_text(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header) || header.rfind("n=", 0) != 0)
    throw std::invalid_argument("marked partition text: missing n= header");
  const long n = std::strtol(header.c_str() + 2, nullptr, 10);
  if (n <= 0) throw std::invalid_argument("marked partition text: bad level");
  std::vector<uint32_t> assignment(static_cast<size_t>(n));
  for (auto& a : assignment)
    if (!(in >> a)) throw std::invalid_argument("marked partition text: short assignment line");
  uint32_t labels = 0;
  for (uint32_t a : assignment) labels = std::max(labels, a);
  std::vector<double> marks(labels);
  for (auto& m : marks)
    if (!(in >> m)) throw std::invalid_argument("marked partition text: short marks line");
  return from_assignment(std::move(assignment), std::move(marks));
}

bool MarkedPartition::finer_or_equal(const MarkedPartition& coarser) const {
  if (level() != coarser.level()) return false;
  // each of our blocks must sit inside one block of coarser: our label
  // determines theirs
  std::vector<uint32_t> image(block_count() + 1, 0);
  for (uint32_t i = 0; i < level(); ++i) {
    const uint32_t mine = assignment_[i];
    const uint32_t theirs = coarser.assignment_[i];
    if (image[mine] == 0)
      image[mine] = theirs;
    else if (image[mine] != theirs)
      return false;
  }
  return true;
}

MarkedPartition restrict(const MarkedPartition& x, uint32_t n) {
  if (n == 0 || n > x.level()) throw std::invalid_argument("restrict: n out of range");
  std::vector<uint32_t> assignment(x.assignment().begin(), x.assignment().begin() + n);
  return MarkedPartition::from_assignment(std::move(assignment), x.marks());
}

MarkedPartition apply_permutation(const MarkedPartition& x, const std::vector<uint32_t>& sigma) {
  const uint32_t n = x.level();
  if (sigma.size() != n) throw std::invalid_argument("apply_permutation: size mismatch");
  std::vector<bool> seen(n + 1, false);
  for (uint32_t s : sigma) {
    if (s == 0 || s > n || seen[s]) throw std::invalid_argument("apply_permutation: not a bijection");
    seen[s] = true;
  }
  std::vector<uint32_t> assignment(n);
  for (uint32_t i = 0; i < n; ++i) assignment[i] = x.label_of(sigma[i]);
  return MarkedPartition::from_assignment(std::move(assignment), x.marks());
}

MarkedPartition frag(const MarkedPartition& x, const std::vector<MarkedPartition>& parts) {
  const uint32_t nblocks = x.block_count();
  if (parts.size() < nblocks) throw std::invalid_argument("frag: fewer parts than blocks");
  const uint32_t n = x.level();
  std::vector<uint32_t> assignment(n, 0);
  std::vector<double> marks;
  uint32_t next_label = 0;
  // process mother blocks in canonical order; child labels canonicalized at
  // the end by from_assignment
  for (uint32_t k = 1; k <= nblocks; ++k) {
    const auto mem = x.members(k);
    const double mother = x.mark_of_block(k);
    if (mother == 0.0) {
      // frozen blocks stay intact
      const uint32_t lab = ++next_label;
      marks.push_back(0.0);
      for (uint32_t i : mem) assignment[i - 1] = lab;
      continue;
    }
    const MarkedPartition& part = parts[k - 1];
    if (part.level() < mem.size()) throw std::invalid_argument("frag: part level below block size");
    const MarkedPartition sub = mem.size() == part.level()
                                    ? part
                                    : restrict(part, static_cast<uint32_t>(mem.size()));
    std::vector<uint32_t> child_label(sub.block_count(), 0);
    for (size_t j = 0; j < mem.size(); ++j) {
      const uint32_t l = sub.label_of(static_cast<uint32_t>(j + 1));
      if (child_label[l - 1] == 0) {
        child_label[l - 1] = ++next_label;
        marks.push_back(mother * sub.mark_of_block(l));
      }
      assignment[mem[j] - 1] = child_label[l - 1];
    }
  }
  return MarkedPartition::from_assignment(std::move(assignment), std::move(marks));
}

FrequencyEstimate empirical_frequencies(const MarkedPartition& x) {
  const double n = static_cast<double>(x.level());
  std::vector<uint32_t> counts(x.block_count(), 0);
  for (uint32_t a : x.assignment()) counts[a - 1]++;
  FrequencyEstimate est;
  est.pairs.reserve(x.block_count());
  for (uint32_t k = 0; k < x.block_count(); ++k)
    est.pairs.emplace_back(counts[k] / n, x.marks()[k]);
  std::sort(est.pairs.begin(), est.pairs.end(),
            [](const auto& a, const auto& b) {
              return a.first > b.first || (a.first == b.first && a.second > b.second);
            });
  return est;
}

}  // namespace essf
