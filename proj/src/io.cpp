#include "essf/io.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace essf {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

const char* termination_name(BlockNode::Termination t) {
  switch (t) {
    case BlockNode::Termination::dislocated:
      return "dislocated";
    case BlockNode::Termination::frozen:
      return "frozen";
    case BlockNode::Termination::alive_at_horizon:
      return "alive";
  }
  return "?";
}

// is the node the current holder of its members at homogeneous time t
bool holder_at(const BlockNode& nd, double t) {
  if (t < nd.birth_time) return false;
  if (nd.termination == BlockNode::Termination::dislocated) return t < nd.death_time;
  if (nd.termination == BlockNode::Termination::alive_at_horizon) return t <= nd.death_time;
  return true;
}

}  // namespace

void write_tree_jsonl(std::ostream& out, const GenealogyTree& tree, double alpha,
                      std::span<const double> query_times, uint64_t replicate, uint64_t seed,
                      const std::string& config_hash) {
  json header;
  header["replicate"] = replicate;
  header["seed"] = seed;
  header["config_hash"] = config_hash;
  header["level"] = tree.level;
  header["horizon"] = tree.horizon;
  header["alpha"] = alpha;
  out << header.dump() << '\n';

  SelfSimilarView view;
  if (alpha != 0.0) view = time_change(tree, alpha);

  for (const auto& nd : tree.nodes) {
    json j;
    j["id"] = nd.id;
    if (nd.parent < 0)
      j["parent"] = nullptr;
    else
      j["parent"] = nd.parent;
    j["members"] = nd.members;
    j["birth"] = nd.birth_time;
    j["death"] = nd.death_time;
    j["init_mark"] = nd.initial_mark;
    j["termination"] = termination_name(nd.termination);
    json marks = json::array();
    for (double q : query_times) {
      if (alpha == 0.0) {
        if (holder_at(nd, q)) marks.push_back({q, nd.mark_at(q)});
        continue;
      }
      const double tb = view.tau_birth[nd.id];
      const double te = tb + view.tau_length[nd.id];
      double value;
      if (q < tb) continue;
      if (nd.initial_mark == 0.0) {
        value = 0.0;
      } else if (q < te) {
        const double u = lamperti_inverse(std::span(nd.segments), -alpha, q - tb);
        value = nd.mark_at(std::min(u, nd.death_time), /*interpolate=*/true);
      } else if (nd.termination == BlockNode::Termination::frozen) {
        value = 0.0;
      } else {
        continue;  // dislocated (children hold) or censored beyond the horizon
      }
      marks.push_back({q, value});
    }
    j["marks_at_queries"] = marks;
    out << j.dump() << '\n';
  }
}

}  // namespace essf
