#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "essf/genealogy.hpp"

namespace essf {

// One JSON-lines tree dump: a replicate header line followed by one node per
// line. For alpha != 0 the marks_at_queries entries live on the self-similar
// clock (queries where the node currently holds its members).
void write_tree_jsonl(std::ostream& out, const GenealogyTree& tree, double alpha,
                      std::span<const double> query_times, uint64_t replicate, uint64_t seed,
                      const std::string& config_hash);

std::string format_double(double v);  // shortest stable decimal (%.17g)

}  // namespace essf
