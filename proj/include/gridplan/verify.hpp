#ifndef GRIDPLAN_VERIFY_HPP_
#define GRIDPLAN_VERIFY_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "gridplan/compliance.hpp"
#include "gridplan/grid.hpp"
#include "gridplan/io.hpp"
#include "gridplan/planner.hpp"

namespace gridplan {

enum class FailureCode {
  NotApplicable,
  Interference,
  NotBuildable,
  NotRemovable,
  ReversedEdit,
  NoncompliantState,
  FinalMismatch,
  EmptyStep,
  NotSequential,
};

inline const char* failure_name(FailureCode c) {
  switch (c) {
    case FailureCode::NotApplicable: return "NOT_APPLICABLE";
    case FailureCode::Interference: return "INTERFERENCE";
    case FailureCode::NotBuildable: return "NOT_BUILDABLE";
    case FailureCode::NotRemovable: return "NOT_REMOVABLE";
    case FailureCode::ReversedEdit: return "REVERSED_EDIT";
    case FailureCode::NoncompliantState: return "NONCOMPLIANT_STATE";
    case FailureCode::FinalMismatch: return "FINAL_MISMATCH";
    case FailureCode::EmptyStep: return "EMPTY_STEP";
    case FailureCode::NotSequential: return "NOT_SEQUENTIAL";
  }
  return "?";
}

struct Failure {
  int step;  // -1 for whole-plan or initial-state findings
  FailureCode code;
  std::string detail;
};

struct ValidationReport {
  bool valid = false;
  std::vector<Failure> failures;

  bool has(FailureCode code) const {
    for (const auto& f : failures) {
      if (f.code == code) return true;
    }
    return false;
  }
};

namespace detail {

inline std::string edge_text(const Edge& e) { return "(" + e.u().str() + "," + e.v().str() + ")"; }

/// Replay state kept as a plain ordered edge map, deliberately not sharing
/// the planner's successor machinery.
struct ReplayState {
  std::map<Edge, EdgeState> edges;

  static ReplayState of(const PowerGrid& g) {
    ReplayState s;
    for (const auto& [e, st] : g.edges()) s.edges.emplace(e, st);
    return s;
  }

  PowerGrid as_grid(const PowerGrid& like) const {
    std::vector<PowerGrid::EdgeEntry> v(edges.begin(), edges.end());
    return like.with_edges(std::move(v));
  }
};

}  // namespace detail

/// Replays the plan from inst.start, checking per step: nonemptiness,
/// sequential arity, pairwise compatibility, applicability, C3/C4 edit
/// permissions and C5 irreversibility, compliance of every traversed state,
/// and exact final equality with the target. All problems land in the report.
inline ValidationReport validate_plan(const Instance& inst, const Plan& plan, PlanMode mode) {
  ValidationReport report;
  auto fail = [&report](int step, FailureCode code, std::string detail) {
    report.failures.push_back({step, code, std::move(detail)});
  };

  // Static checks over the whole plan.
  std::map<Edge, int> added, removed;
  for (size_t t = 0; t < plan.steps.size(); ++t) {
    const ActionSet& step = plan.steps[t];
    if (step.empty()) fail(static_cast<int>(t), FailureCode::EmptyStep, "no action");
    if (mode == PlanMode::Sequential && step.size() > 1) {
      fail(static_cast<int>(t), FailureCode::NotSequential,
           std::to_string(step.size()) + " concurrent actions in sequential mode");
    }
    for (const Action& a : step) {
      if (a.kind == ActionKind::Add) {
        if (!inst.in_buildable(a.edge())) {
          fail(static_cast<int>(t), FailureCode::NotBuildable,
               "add" + detail::edge_text(a.edge()) + " is not in B");
        }
        added.emplace(a.edge(), static_cast<int>(t));
      } else if (a.kind == ActionKind::Remove) {
        if (!inst.in_removable(a.edge())) {
          fail(static_cast<int>(t), FailureCode::NotRemovable,
               "remove" + detail::edge_text(a.edge()) + " is not in R");
        }
        removed.emplace(a.edge(), static_cast<int>(t));
      }
    }
    for (size_t i = 0; i < step.size(); ++i) {
      for (size_t j = i + 1; j < step.size(); ++j) {
        if (!compatible(step[i], step[j])) {
          fail(static_cast<int>(t), FailureCode::Interference,
               detail::action_text(step[i]) + " and " + detail::action_text(step[j]) +
                   " share an edge");
        }
      }
    }
  }
  for (const auto& [e, t_add] : added) {
    auto it = removed.find(e);
    if (it != removed.end()) {
      fail(std::max(t_add, it->second), FailureCode::ReversedEdit,
           detail::edge_text(e) + " is both added and removed");
    }
  }

  // Dynamic replay; stops once the state becomes ill-defined.
  auto state = detail::ReplayState::of(inst.start);
  auto check_state = [&](int produced_by_step) {
    PowerGrid g = state.as_grid(inst.start);
    auto r = check_compliance(g);
    if (!r.compliant()) {
      fail(produced_by_step, FailureCode::NoncompliantState, compliance_summary(r));
    }
  };
  check_state(-1);  // G_0
  bool replay_ok = true;
  for (size_t t = 0; t < plan.steps.size() && replay_ok; ++t) {
    const ActionSet& step = plan.steps[t];
    if (!compatible_set(step)) {
      replay_ok = false;
      break;
    }
    for (const Action& a : step) {
      std::string why;
      switch (a.kind) {
        case ActionKind::Add:
          if (state.edges.count(a.edge())) why = "edge already present";
          break;
        case ActionKind::Remove: {
          auto it = state.edges.find(a.edge());
          if (it == state.edges.end()) {
            why = "edge not present";
          } else if (it->second == EdgeState::Close) {
            why = "closed edges cannot be removed";
          }
          break;
        }
        case ActionKind::Switch: {
          if (inst.start.node_kind(a.x) != NodeKind::Secondary) {
            why = "pivot is not a secondary";
            break;
          }
          auto from = state.edges.find(Edge(a.x, a.y));
          auto to = state.edges.find(Edge(a.x, a.z));
          if (from == state.edges.end() || from->second != EdgeState::Close) {
            why = "edge to open is not close";
          } else if (to == state.edges.end() || to->second != EdgeState::Open) {
            why = "edge to close is not open";
          }
          break;
        }
      }
      if (!why.empty()) {
        fail(static_cast<int>(t), FailureCode::NotApplicable,
             detail::action_text(a) + ": " + why);
        replay_ok = false;
      }
    }
    if (!replay_ok) break;
    for (const Action& a : step) {
      switch (a.kind) {
        case ActionKind::Add:
          state.edges.emplace(a.edge(), EdgeState::Open);
          break;
        case ActionKind::Remove:
          state.edges.erase(a.edge());
          break;
        case ActionKind::Switch:
          state.edges[a.opened_edge()] = EdgeState::Open;
          state.edges[a.closed_edge()] = EdgeState::Close;
          break;
      }
    }
    check_state(static_cast<int>(t));
  }

  if (replay_ok) {
    // C1 and r49-r51: the final grid is exactly the target, edges and states,
    // with every R edge gone.
    std::string diffs;
    int diff_count = 0;
    auto note = [&](const std::string& s) {
      if (diff_count < 4) diffs += (diffs.empty() ? "" : ", ") + s;
      ++diff_count;
    };
    for (const auto& [e, st] : state.edges) {
      auto want = inst.target.edge_state(e);
      if (!want) {
        note(detail::edge_text(e) + " should be gone");
      } else if (*want != st) {
        note(detail::edge_text(e) + " should be " + (*want == EdgeState::Open ? "open" : "close"));
      }
    }
    for (const auto& [e, st] : inst.target.edges()) {
      if (!state.edges.count(e)) note(detail::edge_text(e) + " is missing");
    }
    for (const Edge& e : inst.removable) {
      if (state.edges.count(e)) note("removable " + detail::edge_text(e) + " still present");
    }
    if (diff_count > 0) {
      fail(static_cast<int>(plan.steps.size()) - 1, FailureCode::FinalMismatch,
           std::to_string(diff_count) + " difference(s): " + diffs);
    }
  }

  report.valid = report.failures.empty();
  return report;
}

struct OracleResult {
  Plan plan;
  PlanCost cost;
};

namespace detail {

/// The oracle's own successor enumeration; written against the raw grid so it
/// shares nothing with planner::candidate_actions.
inline std::vector<Action> oracle_moves(const PowerGrid& g, const Instance& inst) {
  std::vector<Action> moves;
  for (const Edge& e : inst.buildable) {
    if (!g.has_edge(e)) moves.push_back(Action::add(e));
  }
  for (const Edge& e : inst.removable) {
    if (g.edge_state(e) == EdgeState::Open) moves.push_back(Action::remove(e));
  }
  for (const auto& [id, kind] : g.nodes()) {
    if (kind != NodeKind::Secondary) continue;
    std::vector<NodeId> closed, open;
    for (const auto& [e, st] : g.edges()) {
      if (!e.touches(id)) continue;
      (st == EdgeState::Close ? closed : open).push_back(e.other(id));
    }
    for (const NodeId& y : closed) {
      for (const NodeId& z : open) {
        if (y != z) moves.push_back(Action::switch_at(id, y, z));
      }
    }
  }
  std::sort(moves.begin(), moves.end());
  return moves;
}

inline void oracle_subsets(const std::vector<Action>& moves,
                           const std::vector<std::vector<char>>& compat, size_t first,
                           std::vector<int>& chosen, std::vector<ActionSet>& out) {
  for (size_t j = first; j < moves.size(); ++j) {
    bool ok = true;
    for (int c : chosen) ok &= compat[c][j];
    if (!ok) continue;
    chosen.push_back(static_cast<int>(j));
    ActionSet set;
    for (int c : chosen) set.push_back(moves[c]);
    out.push_back(std::move(set));
    oracle_subsets(moves, compat, j + 1, chosen, out);
    chosen.pop_back();
  }
}

}  // namespace detail

/// Exhaustive uniform-cost search over grid states with lexicographic cost
/// (switches, steps); a provably cost-minimal plan within the length cap, or
/// nullopt when none exists. Intended for small instances only.
inline std::optional<OracleResult> oracle_shortest(const Instance& inst, PlanMode mode,
                                                   int length_cap,
                                                   uint64_t state_budget = 2000000) {
  if (inst.start == inst.target) return OracleResult{Plan{}, PlanCost{0, 0}};

  struct Node {
    PowerGrid grid;
    PlanCost dist;
    uint64_t parent = 0;
    ActionSet via;
    bool settled = false;
  };
  std::unordered_map<uint64_t, Node> nodes;
  using QueueItem = std::tuple<PlanCost, uint64_t, uint64_t>;  // dist, seq, hash
  std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>> queue;
  uint64_t seq = 0;

  const uint64_t start_hash = inst.start.content_hash();
  const uint64_t target_hash = inst.target.content_hash();
  nodes[start_hash] = Node{inst.start, PlanCost{0, 0}, 0, {}, false};
  queue.emplace(PlanCost{0, 0}, seq++, start_hash);

  if (!is_compliant(inst.start)) return std::nullopt;

  while (!queue.empty()) {
    auto [dist, s, hash] = queue.top();
    queue.pop();
    Node& node = nodes[hash];
    if (node.settled || node.dist != dist) continue;
    node.settled = true;
    if (hash == target_hash) {
      OracleResult result;
      result.cost = node.dist;
      uint64_t cur = hash;
      while (cur != start_hash) {
        const Node& n = nodes[cur];
        result.plan.steps.push_back(n.via);
        cur = n.parent;
      }
      std::reverse(result.plan.steps.begin(), result.plan.steps.end());
      return result;
    }
    if (node.dist.length >= length_cap) continue;

    std::vector<Action> moves = detail::oracle_moves(node.grid, inst);
    std::vector<ActionSet> steps;
    if (mode == PlanMode::Sequential) {
      for (const Action& a : moves) steps.push_back({a});
    } else {
      std::vector<std::vector<char>> compat(moves.size(), std::vector<char>(moves.size(), 0));
      for (size_t i = 0; i < moves.size(); ++i) {
        for (size_t j = i + 1; j < moves.size(); ++j) {
          compat[i][j] = compat[j][i] = compatible(moves[i], moves[j]);
        }
      }
      std::vector<int> chosen;
      detail::oracle_subsets(moves, compat, 0, chosen, steps);
    }

    const PowerGrid base = node.grid;  // copy: the map may rehash below
    const PlanCost base_dist = node.dist;
    for (const ActionSet& step : steps) {
      int step_switches = 0;
      for (const Action& a : step) step_switches += a.kind == ActionKind::Switch;
      PlanCost next{base_dist.switches + step_switches, base_dist.length + 1};
      PowerGrid succ = apply_action_set(base, step);
      uint64_t succ_hash = succ.content_hash();
      if (succ_hash != target_hash && !is_compliant(succ)) continue;
      auto it = nodes.find(succ_hash);
      if (it == nodes.end()) {
        if (nodes.size() >= state_budget) {
          throw Error(Errc::cap_exceeded,
                      "oracle state budget of " + std::to_string(state_budget) + " exceeded");
        }
        nodes.emplace(succ_hash, Node{std::move(succ), next, hash, step, false});
        queue.emplace(next, seq++, succ_hash);
      } else if (!it->second.settled && next < it->second.dist) {
        it->second.dist = next;
        it->second.parent = hash;
        it->second.via = step;
        queue.emplace(next, seq++, succ_hash);
      }
    }
  }
  return std::nullopt;
}

}  // namespace gridplan

#endif  // GRIDPLAN_VERIFY_HPP_
