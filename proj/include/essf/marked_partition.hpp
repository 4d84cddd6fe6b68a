#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace essf {

// A partition of {1..n} with one nonnegative mark per block (mark 0 = the
// block is frozen and never changes again). Labels are canonical: block 1
// contains 1, block k+1 starts at the smallest integer not in blocks 1..k,
// so labels appear in first-occurrence order when scanning the assignment.
class MarkedPartition {
 public:
  // assignment is 1-based per integer; labels need not be canonical on input,
  // they are relabeled (and marks permuted accordingly).
  static MarkedPartition from_assignment(std::vector<uint32_t> assignment,
                                         std::vector<double> marks_per_label);

  static MarkedPartition single_block(uint32_t level, double mark);
  static MarkedPartition singletons(uint32_t level, double mark);

  uint32_t level() const { return static_cast<uint32_t>(assignment_.size()); }
  uint32_t block_count() const { return static_cast<uint32_t>(marks_.size()); }

  // 1-based block label of integer i (1 <= i <= level)
  uint32_t label_of(uint32_t i) const;
  double mark_of_block(uint32_t label) const;
  double mark_of(uint32_t i) const { return mark_of_block(label_of(i)); }
  // members of a block, increasing
  std::vector<uint32_t> members(uint32_t label) const;

  const std::vector<uint32_t>& assignment() const { return assignment_; }
  const std::vector<double>& marks() const { return marks_; }

  bool is_single_block() const { return marks_.size() == 1; }

  // "i j k ..." assignment string; the chi-square category for a shape
  std::string shape_key() const;

  // three-line text format: "n=<level>" / assignment / marks
  std::string to_text() const;
  static MarkedPartition from_text(const std::string& text);

  bool operator==(const MarkedPartition& other) const = default;

  // true if every block of *this is contained in a block of coarser
  bool finer_or_equal(const MarkedPartition& coarser) const;

 private:
  MarkedPartition() = default;
  std::vector<uint32_t> assignment_;
  std::vector<double> marks_;
};

// restriction to {1..n}
MarkedPartition restrict(const MarkedPartition& x, uint32_t n);

// sigma is 1-based, a bijection of {1..n}: i ~ j in the result iff
// sigma(i) ~ sigma(j) in x, and the mark of i becomes the mark of sigma(i).
MarkedPartition apply_permutation(const MarkedPartition& x, const std::vector<uint32_t>& sigma);

// Fragment each block k of x by parts[k-1] (restricted to the block's size
// via its canonical member enumeration); child marks are products. Frozen
// blocks of x stay intact with mark 0. parts may be longer than the block
// count; shorter is an error.
MarkedPartition frag(const MarkedPartition& x, const std::vector<MarkedPartition>& parts);

struct FrequencyEstimate {
  // (block frequency, mark), lexicographically nonincreasing
  std::vector<std::pair<double, double>> pairs;
};

FrequencyEstimate empirical_frequencies(const MarkedPartition& x);

}  // namespace essf
