#include "essf/genealogy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace essf {

namespace {

struct Pending {
  std::vector<uint32_t> members;
  double birth;
  double mark;
  int32_t parent;
};

}  // namespace

double BlockNode::mark_at(double t, bool interpolate) const {
  if (t < birth_time) throw std::invalid_argument("mark_at: before birth");
  if (initial_mark == 0.0) return 0.0;
  if (termination == Termination::frozen && t >= death_time) return 0.0;
  if (t > death_time) throw std::invalid_argument("mark_at: block no longer alive");
  if (segments.empty()) return initial_mark;
  if (t >= segments.back().t_end) return std::exp(segments.back().log_mark_end);
  // last segment starting at or before t carries the cadlag value
  size_t lo = 0, hi = segments.size();
  while (lo + 1 < hi) {
    const size_t mid = (lo + hi) / 2;
    if (segments[mid].t_start <= t)
      lo = mid;
    else
      hi = mid;
  }
  return std::exp(segments[lo].log_mark_at(t, interpolate));
}

bool GenealogyTree::complete() const {
  for (const auto& nd : nodes)
    if (nd.termination == BlockNode::Termination::alive_at_horizon) return false;
  return true;
}

GenealogyTree simulate_homogeneous(const Characteristics& ch, uint32_t n, double horizon,
                                   std::span<const double> query_times, Rng& rng,
                                   const SimulateOptions& opts) {
  ch.validate();
  if (ch.alpha != 0.0)
    throw std::invalid_argument("simulate_homogeneous: alpha must be 0 (apply time_change)");
  if (n == 0) throw std::invalid_argument("simulate_homogeneous: level must be >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("simulate_homogeneous: horizon must be > 0");
  if (!(opts.initial_mark >= 0.0))
    throw std::invalid_argument("simulate_homogeneous: initial mark must be >= 0");

  GenealogyTree tree;
  tree.level = n;
  tree.horizon = horizon;
  tree.initial_mark = opts.initial_mark;
  tree.grid_step = opts.grid_step;
  tree.characteristics = ch;
  tree.query_times.assign(query_times.begin(), query_times.end());
  std::sort(tree.query_times.begin(), tree.query_times.end());
  tree.query_times.erase(std::unique(tree.query_times.begin(), tree.query_times.end()),
                         tree.query_times.end());

  const double drift = effective_drift(ch);
  const double lambda_mass = ch.lambda.total_mass();
  std::vector<double> atom_weights;
  atom_weights.reserve(ch.lambda.size());
  for (const auto& a : ch.lambda.atoms()) atom_weights.push_back(a.weight);

  std::vector<Pending> stack;
  {
    std::vector<uint32_t> all(n);
    for (uint32_t i = 0; i < n; ++i) all[i] = i + 1;
    stack.push_back({std::move(all), 0.0, opts.initial_mark, -1});
  }

  while (!stack.empty()) {
    Pending blk = std::move(stack.back());
    stack.pop_back();
    const uint32_t id = static_cast<uint32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    BlockNode& node = tree.nodes.back();
    node.id = id;
    node.parent = blk.parent;
    node.members = std::move(blk.members);
    node.birth_time = blk.birth;
    node.initial_mark = blk.mark;
    if (blk.parent >= 0) tree.nodes[static_cast<size_t>(blk.parent)].children.push_back(id);

    if (blk.mark == 0.0) {
      node.death_time = blk.birth;
      node.mark_before_death = 0.0;
      node.termination = BlockNode::Termination::frozen;
      continue;
    }

    const uint32_t b = static_cast<uint32_t>(node.members.size());
    const double rate = b * ch.c + lambda_mass;
    double t = blk.birth;
    double logv = std::log(blk.mark);
    std::vector<Pending> kids;

    for (;;) {
      const double dt = rate > 0.0 ? rng.exponential(rate)
                                   : std::numeric_limits<double>::infinity();
      if (t + dt >= horizon) {
        if (horizon > t)
          node.segments.push_back(evolve_mark(t, logv, horizon - t, drift, ch.beta, rng,
                                              tree.query_times, opts.grid_step));
        node.death_time = horizon;
        node.mark_before_death =
            node.segments.empty() ? blk.mark : std::exp(node.segments.back().log_mark_end);
        node.termination = BlockNode::Termination::alive_at_horizon;
        break;
      }
      if (dt > 0.0) {
        node.segments.push_back(
            evolve_mark(t, logv, dt, drift, ch.beta, rng, tree.query_times, opts.grid_step));
        logv = node.segments.back().log_mark_end;
      }
      t += dt;

      const bool is_erosion = rng.uniform01() * rate < b * ch.c;
      if (is_erosion) {
        const uint32_t victim = node.members[rng.below(b)];
        node.death_time = t;
        node.mark_before_death = std::exp(logv);
        if (b == 1) {
          node.termination = BlockNode::Termination::frozen;
          break;
        }
        node.termination = BlockNode::Termination::dislocated;
        std::vector<uint32_t> rest;
        rest.reserve(b - 1);
        for (uint32_t m : node.members)
          if (m != victim) rest.push_back(m);
        if (rest.front() < victim) {
          kids.push_back({std::move(rest), t, node.mark_before_death, static_cast<int32_t>(id)});
          kids.push_back({{victim}, t, 0.0, static_cast<int32_t>(id)});
        } else {
          kids.push_back({{victim}, t, 0.0, static_cast<int32_t>(id)});
          kids.push_back({std::move(rest), t, node.mark_before_death, static_cast<int32_t>(id)});
        }
        break;
      }

      const size_t ai = rng.categorical(atom_weights, lambda_mass);
      const ZElement& z = ch.lambda.atoms()[ai].z;
      const auto idx = paintbox_interval_assignment(z, b, rng);
      bool any_leftover = false;
      int32_t single = -2;  // -2 unset, -3 several intervals
      for (int32_t ix : idx) {
        if (ix < 0)
          any_leftover = true;
        else
          single = (single == -2 || single == ix) ? ix : -3;
      }

      if (!any_leftover && single >= 0) {
        const double vj = z.v(static_cast<size_t>(single));
        if (vj > 0.0) {
          if (vj != 1.0) logv += std::log(vj);  // mark jump, segment boundary at t
          continue;
        }
        node.death_time = t;  // whole block painted into a frozen interval
        node.mark_before_death = std::exp(logv);
        node.termination = BlockNode::Termination::frozen;
        break;
      }
      if (b == 1) {
        node.death_time = t;  // the single member fell into the dust
        node.mark_before_death = std::exp(logv);
        node.termination = BlockNode::Termination::frozen;
        break;
      }

      // dislocation: one child per occupied interval plus frozen singletons
      node.death_time = t;
      node.mark_before_death = std::exp(logv);
      node.termination = BlockNode::Termination::dislocated;
      std::vector<std::vector<uint32_t>> groups(z.size());
      for (uint32_t i = 0; i < b; ++i) {
        if (idx[i] < 0)
          kids.push_back({{node.members[i]}, t, 0.0, static_cast<int32_t>(id)});
        else
          groups[static_cast<size_t>(idx[i])].push_back(node.members[i]);
      }
      for (size_t j = 0; j < groups.size(); ++j)
        if (!groups[j].empty())
          kids.push_back({std::move(groups[j]), t, node.mark_before_death * z.v(j),
                          static_cast<int32_t>(id)});
      std::sort(kids.begin(), kids.end(),
                [](const Pending& a, const Pending& c) { return a.members.front() < c.members.front(); });
      break;
    }

    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(std::move(*it));
  }
  return tree;
}

namespace {

bool node_current_at(const BlockNode& nd, double t) {
  if (t < nd.birth_time) return false;
  switch (nd.termination) {
    case BlockNode::Termination::frozen:
      return true;
    case BlockNode::Termination::alive_at_horizon:
      return t <= nd.death_time;
    case BlockNode::Termination::dislocated:
      return t < nd.death_time;
  }
  return false;
}

}  // namespace

MarkedPartition snapshot(const GenealogyTree& tree, double t) {
  if (t < 0.0 || t > tree.horizon)
    throw std::invalid_argument("snapshot: time outside [0, horizon]");
  std::vector<uint32_t> assignment(tree.level, 0);
  std::vector<double> marks;
  std::vector<uint32_t> walk{0};
  while (!walk.empty()) {
    const BlockNode& nd = tree.nodes[walk.back()];
    walk.pop_back();
    if (node_current_at(nd, t)) {
      marks.push_back(nd.mark_at(t));
      const uint32_t lab = static_cast<uint32_t>(marks.size());
      for (uint32_t m : nd.members) assignment[m - 1] = lab;
    } else {
      for (uint32_t c : nd.children) walk.push_back(c);
    }
  }
  return MarkedPartition::from_assignment(std::move(assignment), std::move(marks));
}

SelfSimilarView time_change(const GenealogyTree& tree, double alpha) {
  SelfSimilarView view;
  view.tree = &tree;
  view.alpha = alpha;
  view.tau_birth.resize(tree.nodes.size(), 0.0);
  view.tau_length.resize(tree.nodes.size(), 0.0);
  for (const auto& nd : tree.nodes) {
    const auto r = lamperti_integral(std::span(nd.segments), -alpha);
    view.tau_length[nd.id] = r.value;
    view.grids_converged = view.grids_converged && r.converged;
    if (nd.parent >= 0)
      view.tau_birth[nd.id] = view.tau_birth[static_cast<size_t>(nd.parent)] +
                              view.tau_length[static_cast<size_t>(nd.parent)];
    if (nd.termination == BlockNode::Termination::alive_at_horizon) view.complete = false;
  }
  return view;
}

MarkedPartition snapshot_selfsim(const SelfSimilarView& view, double tau) {
  if (tau < 0.0) throw std::invalid_argument("snapshot_selfsim: negative time");
  const GenealogyTree& tree = *view.tree;
  std::vector<uint32_t> assignment(tree.level, 0);
  std::vector<double> marks;
  std::vector<uint32_t> walk{0};
  while (!walk.empty()) {
    const BlockNode& nd = tree.nodes[walk.back()];
    walk.pop_back();
    const double tb = view.tau_birth[nd.id];
    const double te = tb + view.tau_length[nd.id];
    double mark;
    if (nd.initial_mark == 0.0) {
      mark = 0.0;
    } else if (tau < te) {
      const double u = lamperti_inverse(std::span(nd.segments), -view.alpha, tau - tb);
      mark = nd.mark_at(std::min(u, nd.death_time), /*interpolate=*/true);
    } else if (nd.termination == BlockNode::Termination::frozen) {
      mark = 0.0;
    } else if (nd.termination == BlockNode::Termination::dislocated) {
      for (uint32_t c : nd.children) walk.push_back(c);
      continue;
    } else {
      if (tau > te)
        throw std::invalid_argument("snapshot_selfsim: beyond the simulated horizon");
      mark = nd.mark_at(nd.death_time);
    }
    marks.push_back(mark);
    const uint32_t lab = static_cast<uint32_t>(marks.size());
    for (uint32_t m : nd.members) assignment[m - 1] = lab;
  }
  return MarkedPartition::from_assignment(std::move(assignment), std::move(marks));
}

std::optional<double> absorption_time(const GenealogyTree& tree, double alpha) {
  const auto view = time_change(tree, alpha);
  if (!view.complete) return std::nullopt;
  double sup = 0.0;
  for (const auto& nd : tree.nodes)
    if (nd.termination == BlockNode::Termination::frozen)
      sup = std::max(sup, view.tau_birth[nd.id] + view.tau_length[nd.id]);
  return sup;
}

std::optional<double> total_length(const GenealogyTree& tree, double alpha) {
  const auto view = time_change(tree, alpha);
  if (!view.complete) return std::nullopt;
  double total = 0.0;
  for (double len : view.tau_length) total += len;
  return total;
}

FirstEvent sample_first_event(const Characteristics& ch, uint32_t n, Rng& rng) {
  if (killing_rate(ch, n) <= 0.0)
    throw std::invalid_argument("sample_first_event: level never dislocates");
  const double rate = n * ch.c + ch.lambda.total_mass();
  double t = 0.0;
  for (;;) {
    t += rng.exponential(rate);
    if (auto x = propose_level_event(ch, n, rng)) return {t, std::move(*x)};
  }
}

}  // namespace essf
