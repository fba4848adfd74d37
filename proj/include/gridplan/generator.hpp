#ifndef GRIDPLAN_GENERATOR_HPP_
#define GRIDPLAN_GENERATOR_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gridplan/compliance.hpp"
#include "gridplan/grid.hpp"
#include "gridplan/io.hpp"

namespace gridplan {

/// Deterministic generator state (splitmix64); all sampling goes through it,
/// so generation is a pure function of (config, seed) on every platform.
struct Rng {
  uint64_t state;

  explicit Rng(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t below(uint64_t n) { return n == 0 ? 0 : next() % n; }
};

struct GenConfig {
  int num_nodes = 8;
  int num_primaries = 2;
  double alpha = 1.0;
  uint64_t seed = 0;
  int feeders = 0;  // 0: derived from the secondary count
};

struct GeneratedInstance {
  Instance instance;
  Plan witness;       // sequential plan from start to target
  int witness_bound;  // g, the witness length
};

namespace detail {

inline std::string padded_id(char prefix, int index, int width) {
  std::string digits = std::to_string(index);
  while (static_cast<int>(digits.size()) < width) digits.insert(digits.begin(), '0');
  return prefix + digits;
}

inline void check_gen_config(const GenConfig& cfg) {
  if (cfg.num_primaries < 2 || cfg.num_nodes < cfg.num_primaries + 2 || cfg.alpha <= 0) {
    throw Error(Errc::generation_failed,
                "need num_primaries >= 2, num_nodes >= num_primaries + 2, alpha > 0");
  }
}

inline std::vector<Action> walk_candidates(const PowerGrid& g,
                                           const std::set<Edge>& added,
                                           const std::set<Edge>& removed,
                                           const std::optional<Action>& previous) {
  std::vector<Action> out;
  // Adds from the reserve of absent pairs: secondary-secondary or
  // primary-secondary, secondary endpoints kept at degree <= 3, removed
  // edges never rebuilt.
  auto nodes = g.nodes();
  std::vector<int> deg(nodes.size(), 0);
  {
    detail::NodeIndexer idx(g);
    for (const auto& [e, st] : g.edges()) {
      ++deg[idx.at(e.u())];
      ++deg[idx.at(e.v())];
    }
  }
  for (size_t i = 0; i < nodes.size(); ++i) {
    for (size_t j = i + 1; j < nodes.size(); ++j) {
      if (nodes[i].second == NodeKind::Primary && nodes[j].second == NodeKind::Primary) continue;
      if (nodes[i].second == NodeKind::Secondary && deg[i] >= 3) continue;
      if (nodes[j].second == NodeKind::Secondary && deg[j] >= 3) continue;
      Edge e(nodes[i].first, nodes[j].first);
      if (g.has_edge(e) || removed.count(e)) continue;
      out.push_back(Action::add(e));
    }
  }
  // Removes of present open edges that were not built by this walk.
  for (const auto& [e, st] : g.edges()) {
    if (st == EdgeState::Open && !added.count(e)) out.push_back(Action::remove(e));
  }
  // Applicable switches, skipping the exact inverse of the previous step.
  for (const auto& [e, st] : g.edges()) {
    if (st != EdgeState::Close) continue;
    for (const auto& [e2, st2] : g.edges()) {
      if (st2 != EdgeState::Open) continue;
      for (const NodeId* pivot : {&e.u(), &e.v()}) {
        if (!e2.touches(*pivot) || g.node_kind(*pivot) != NodeKind::Secondary) continue;
        const NodeId& from = e.other(*pivot);
        const NodeId& to = e2.other(*pivot);
        if (from == to) continue;
        Action sw = Action::switch_at(*pivot, from, to);
        if (previous && previous->kind == ActionKind::Switch && previous->x == sw.x &&
            previous->y == sw.z && previous->z == sw.y) {
          continue;
        }
        out.push_back(sw);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Samples a compliant grid: secondaries are split into feeders, each feeder
/// a closed path between two primaries with one randomly placed open point,
/// plus a few open tie edges between feeders within the degree budget.
inline PowerGrid generate_grid(const GenConfig& cfg, Rng& rng) {
  detail::check_gen_config(cfg);
  const int num_secondaries = cfg.num_nodes - cfg.num_primaries;
  const int width = cfg.num_nodes >= 100 ? 3 : 2;

  for (int attempt = 0; attempt < 8; ++attempt) {
    int feeders = cfg.feeders > 0
                      ? cfg.feeders
                      : std::max(1, static_cast<int>(std::lround(num_secondaries / 4.0)));
    while (feeders > 1 && num_secondaries < 2 * feeders) --feeders;
    while (num_secondaries > 6 * feeders) ++feeders;

    GridBuilder builder;
    std::vector<NodeId> primaries, secondaries;
    for (int i = 1; i <= cfg.num_primaries; ++i) {
      primaries.emplace_back(detail::padded_id('p', i, width));
      builder.add_node(primaries.back(), NodeKind::Primary);
    }
    for (int i = 1; i <= num_secondaries; ++i) {
      secondaries.emplace_back(detail::padded_id('s', i, width));
      builder.add_node(secondaries.back(), NodeKind::Secondary);
    }

    std::vector<NodeId> shuffled = secondaries;
    for (size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    }

    std::vector<std::vector<NodeId>> feeder_nodes(feeders);
    for (size_t i = 0; i < shuffled.size(); ++i) {
      feeder_nodes[i % feeders].push_back(shuffled[i]);
    }

    for (int f = 0; f < feeders; ++f) {
      const NodeId& pa = primaries[f % cfg.num_primaries];
      const NodeId& pb = primaries[(f + 1) % cfg.num_primaries];
      std::vector<NodeId> chain;
      chain.push_back(pa);
      for (const NodeId& s : feeder_nodes[f]) chain.push_back(s);
      chain.push_back(pb);
      int open_at = static_cast<int>(rng.below(chain.size() - 1));
      for (size_t i = 0; i + 1 < chain.size(); ++i) {
        builder.add_edge(Edge(chain[i], chain[i + 1]),
                         static_cast<int>(i) == open_at ? EdgeState::Open : EdgeState::Close);
      }
    }

    PowerGrid grid = builder.build();

    // Random open ties between distinct feeders, respecting degree <= 3.
    int tie_attempts = feeders;
    for (int t = 0; t < tie_attempts; ++t) {
      int fa = static_cast<int>(rng.below(feeders));
      int fb = static_cast<int>(rng.below(feeders));
      if (fa == fb || feeder_nodes[fa].empty() || feeder_nodes[fb].empty()) continue;
      const NodeId& a = feeder_nodes[fa][rng.below(feeder_nodes[fa].size())];
      const NodeId& b = feeder_nodes[fb][rng.below(feeder_nodes[fb].size())];
      if (a == b) continue;
      Edge e(a, b);
      if (grid.has_edge(e) || grid.degree(a) >= 3 || grid.degree(b) >= 3) continue;
      std::vector<PowerGrid::EdgeEntry> with(grid.edges().begin(), grid.edges().end());
      auto pos = std::lower_bound(with.begin(), with.end(), e,
                                  [](const PowerGrid::EdgeEntry& ee, const Edge& k) {
                                    return ee.first < k;
                                  });
      with.insert(pos, {e, EdgeState::Open});
      grid = grid.with_edges(std::move(with));
    }

    if (check_compliance(grid).compliant()) return grid;
  }
  throw Error(Errc::generation_failed, "no compliant grid for this configuration");
}

/// A sequential plan of exactly `depth` compliance-preserving single actions
/// from g0, avoiding add/remove of the same edge anywhere in the walk and
/// opposite switches in adjacent steps. Throws DeadEnd when stuck.
inline std::pair<Plan, PowerGrid> random_compliant_walk(const PowerGrid& g0, int depth,
                                                        Rng& rng) {
  if (depth < 1) throw Error(Errc::generation_failed, "walk depth must be >= 1");
  PowerGrid grid = g0;
  Plan plan;
  std::set<Edge> added, removed;
  std::optional<Action> previous;
  for (int step = 0; step < depth; ++step) {
    std::vector<Action> candidates = detail::walk_candidates(grid, added, removed, previous);
    std::vector<Action> keep;
    for (const Action& a : candidates) {
      if (is_compliant(apply_action(grid, a))) keep.push_back(a);
    }
    if (keep.empty()) {
      throw Error(Errc::dead_end, "walk stuck after " + std::to_string(step) + " steps");
    }
    Action pick = keep[rng.below(keep.size())];
    grid = apply_action(grid, pick);
    if (pick.kind == ActionKind::Add) added.insert(pick.edge());
    if (pick.kind == ActionKind::Remove) removed.insert(pick.edge());
    plan.steps.push_back({pick});
    previous = pick;
  }
  return {std::move(plan), std::move(grid)};
}

/// Grid plus an alpha·|E| walk, assembled into an instance with its witness
/// plan and the bound g. Dead ends retry with fresh sub-seeds.
inline GeneratedInstance generate_instance(const GenConfig& cfg, Rng& rng) {
  detail::check_gen_config(cfg);
  const int max_attempts = 32;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Rng attempt_rng(rng.next());
    PowerGrid start = generate_grid(cfg, attempt_rng);
    int depth = static_cast<int>(std::ceil(cfg.alpha * static_cast<double>(start.edge_count())));
    depth = std::max(depth, 1);
    try {
      auto [witness, target] = random_compliant_walk(start, depth, attempt_rng);
      GeneratedInstance out{make_instance(std::move(start), std::move(target)),
                            std::move(witness), depth};
      return out;
    } catch (const Error& e) {
      if (e.code() != Errc::dead_end) throw;
    }
  }
  throw Error(Errc::generation_failed,
              "no instance after " + std::to_string(max_attempts) + " attempts");
}

inline GeneratedInstance generate_instance(const GenConfig& cfg) {
  Rng rng(cfg.seed);
  return generate_instance(cfg, rng);
}

}  // namespace gridplan

#endif  // GRIDPLAN_GENERATOR_HPP_
