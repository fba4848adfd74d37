#ifndef GRIDPLAN_PLANNER_HPP_
#define GRIDPLAN_PLANNER_HPP_

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include "gridplan/compliance.hpp"
#include "gridplan/grid.hpp"
#include "gridplan/io.hpp"

namespace gridplan {

enum class PlanMode { Sequential, Parallel };
enum class Objective { Satisficing, Optimal };

/// Lexicographic plan cost: switch count dominates plan length, mirroring the
/// two optimization priorities (adds and removes are fixed per instance, so
/// minimizing switches minimizes total actions).
struct PlanCost {
  int switches = 0;
  int length = 0;

  friend auto operator<=>(const PlanCost&, const PlanCost&) = default;
};

inline PlanCost plan_cost(const Plan& plan) {
  PlanCost cost{0, plan.length()};
  for (const ActionSet& step : plan.steps) {
    for (const Action& a : step) cost.switches += a.kind == ActionKind::Switch;
  }
  return cost;
}

inline int total_actions(const Plan& plan) {
  int n = 0;
  for (const ActionSet& step : plan.steps) n += static_cast<int>(step.size());
  return n;
}

struct SolveConfig {
  PlanMode mode = PlanMode::Parallel;
  Objective objective = Objective::Optimal;
  int max_horizon = 256;
  double time_limit = 1800.0;                     // seconds, shared across windows
  uint64_t memory_limit = 2ull * 1024 * 1024 * 1024;  // bytes, bounds the memo table
  std::optional<uint64_t> node_limit;
  bool strict_nonempty = false;  // restore "at least one action per time-point" for n = 0
  uint64_t seed = 0;             // reserved; the reference search is deterministic
};

enum class SolveOutcome { Solved, UnsatWithinHorizon, ResourceExceeded };

struct SolveStats {
  uint64_t expanded = 0;   // states expanded
  uint64_t generated = 0;  // action sets applied
  double wall_seconds = 0;
  int windows_tried = 0;
};

struct SolveResult {
  SolveOutcome outcome = SolveOutcome::UnsatWithinHorizon;
  std::optional<Plan> plan;  // Solved: the plan; ResourceExceeded: best found, if any
  PlanCost cost;             // meaningful when plan is set
  int horizon = 0;           // UnsatWithinHorizon: the exhausted bound
  SolveStats stats;
};

/// All actions applicable in g and admitted by the instance: adds only of
/// unbuilt B edges, removes only of open R edges, and every applicable
/// switch. Sorted in canonical action order.
inline std::vector<Action> candidate_actions(const PowerGrid& g, const Instance& inst) {
  std::vector<Action> out;
  for (const Edge& e : inst.buildable) {
    if (!g.has_edge(e)) out.push_back(Action::add(e));
  }
  for (const Edge& e : inst.removable) {
    if (g.edge_state(e) == EdgeState::Open) out.push_back(Action::remove(e));
  }
  // Per secondary pivot, pair each closed incident edge with each open one.
  for (const auto& [e, st] : g.edges()) {
    if (st != EdgeState::Close) continue;
    for (const auto& [e2, st2] : g.edges()) {
      if (st2 != EdgeState::Open) continue;
      for (const NodeId* pivot : {&e.u(), &e.v()}) {
        if (!e2.touches(*pivot)) continue;
        if (g.node_kind(*pivot) != NodeKind::Secondary) continue;
        const NodeId& from = e.other(*pivot);
        const NodeId& to = e2.other(*pivot);
        if (from == to) continue;
        out.push_back(Action::switch_at(*pivot, from, to));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Exponential horizon windows [2^h, 2^(h+1)] clipped to max_horizon; their
/// union covers every length in [1, max_horizon] with no gaps.
inline std::vector<std::pair<int, int>> horizon_windows(int max_horizon) {
  std::vector<std::pair<int, int>> windows;
  for (long long lo = 1; lo <= max_horizon; lo *= 2) {
    windows.emplace_back(static_cast<int>(lo),
                         static_cast<int>(std::min<long long>(lo * 2, max_horizon)));
  }
  return windows;
}

namespace detail {

inline uint64_t mix_hash(uint64_t h, uint64_t salt) {
  uint64_t z = h ^ (salt + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct PendingWork {
  int adds = 0;      // B edges still absent
  int removes = 0;   // R edges still present
  int close_to_open = 0;
  int open_to_close = 0;
  int max_edge_touches = 0;

  int switch_bound() const { return std::max(close_to_open, open_to_close); }
  int step_bound(PlanMode mode) const {
    if (mode == PlanMode::Sequential) return adds + removes + switch_bound();
    int any = (adds + removes + close_to_open + open_to_close) > 0 ? 1 : 0;
    return std::max(any, max_edge_touches);
  }
};

inline PendingWork pending_work(const PowerGrid& g, const Instance& inst) {
  PendingWork w;
  for (const auto& [e, st] : g.edges()) {
    int touches = 0;
    if (inst.in_removable(e)) {
      ++w.removes;
      ++touches;
      if (st == EdgeState::Close) {
        ++w.close_to_open;
        ++touches;
      }
    } else {
      auto target_state = inst.target.edge_state(e);
      if (target_state && *target_state != st) {
        ++touches;
        if (st == EdgeState::Close) {
          ++w.close_to_open;
        } else {
          ++w.open_to_close;
        }
      }
    }
    w.max_edge_touches = std::max(w.max_edge_touches, touches);
  }
  for (const Edge& e : inst.buildable) {
    if (g.has_edge(e)) continue;
    ++w.adds;
    int touches = 1;
    if (inst.target.edge_state(e) == EdgeState::Close) {
      ++w.open_to_close;
      ++touches;
    }
    w.max_edge_touches = std::max(w.max_edge_touches, touches);
  }
  return w;
}

class BoundedSearch {
 public:
  BoundedSearch(const Instance& inst, const SolveConfig& cfg, int lo, int hi,
                std::chrono::steady_clock::time_point deadline,
                std::optional<PlanCost> incumbent = std::nullopt)
      : inst_(inst),
        cfg_(cfg),
        lo_(lo),
        hi_(hi),
        deadline_(deadline),
        memo_cap_(std::max<uint64_t>(1024, cfg.memory_limit / kMemoEntryBytes)),
        target_hash_(inst.target.content_hash()) {
    if (incumbent) best_cost_ = *incumbent;
  }

  SolveResult run() {
    SolveResult result;
    if (is_compliant(inst_.start)) {
      dfs(inst_.start, 0, 0, pending_work(inst_.start, inst_));
    }
    result.stats = stats_;
    if (stopped()) {
      result.outcome = SolveOutcome::ResourceExceeded;
      if (best_plan_) {
        result.plan = best_plan_;
        result.cost = best_cost_;
      }
    } else if (best_plan_) {
      result.outcome = SolveOutcome::Solved;
      result.plan = std::move(best_plan_);
      result.cost = best_cost_;
    } else {
      result.outcome = SolveOutcome::UnsatWithinHorizon;
      result.horizon = hi_;
    }
    return result;
  }

 private:
  static constexpr uint64_t kMemoEntryBytes = 64;  // ballpark unordered_map overhead

  bool stopped() const { return out_of_time_ || out_of_memory_ || out_of_nodes_; }

  void note_limits() {
    if ((stats_.generated & 1023u) == 0 &&
        std::chrono::steady_clock::now() > deadline_) {
      out_of_time_ = true;
    }
    if (cfg_.node_limit && stats_.expanded >= *cfg_.node_limit) out_of_nodes_ = true;
    if (memo_.size() >= memo_cap_) out_of_memory_ = true;
  }

  // Returns true in satisficing mode once a plan is found (unwinds the DFS).
  bool dfs(const PowerGrid& g, int t, int switches_so_far, const PendingWork& work) {
    ++stats_.expanded;
    note_limits();
    if (stopped()) return false;

    std::vector<Action> candidates = candidate_actions(g, inst_);
    if (cfg_.mode == PlanMode::Sequential) {
      for (const Action& a : candidates) {
        if (visit_child(g, std::vector<Action>{a}, t, switches_so_far)) return true;
        if (stopped()) return false;
      }
      return false;
    }
    std::vector<Action> chosen;
    std::vector<Edge> chosen_edges;
    return enumerate_subsets(g, candidates, 0, chosen, chosen_edges, t, switches_so_far,
                             work.switch_bound());
  }

  // A step using `step_switches` switches from a state whose outstanding work
  // needs at least `node_switch_lb` leaves total switches of at least
  // switches_so_far + max(step_switches, node_switch_lb): the step's own
  // switches count, and each of them can discharge at most one unit of the
  // outstanding bound.
  bool switch_budget_blown(int switches_so_far, int step_switches, int node_switch_lb,
                           int t) const {
    PlanCost floor{switches_so_far + std::max(step_switches, node_switch_lb), t + 1};
    return floor >= best_cost_;
  }

  // Compatible-subset enumeration over the sorted candidate list. Optimal mode
  // visits a set before its extensions (lexicographic order, which the lex
  // tie-break relies on); satisficing visits extensions first so maximal sets
  // lead the way to short plans. Candidates sort adds/removes before
  // switches, so once the switch budget is blown the rest of the tail can be
  // dropped wholesale in optimal mode.
  bool enumerate_subsets(const PowerGrid& g, const std::vector<Action>& candidates, size_t first,
                         std::vector<Action>& chosen, std::vector<Edge>& chosen_edges, int t,
                         int switches_so_far, int node_switch_lb) {
    int chosen_switches = 0;
    for (const Action& a : chosen) chosen_switches += a.kind == ActionKind::Switch;
    for (size_t j = first; j < candidates.size(); ++j) {
      const Action& a = candidates[j];
      if (a.kind == ActionKind::Switch && cfg_.objective == Objective::Optimal &&
          switch_budget_blown(switches_so_far, chosen_switches + 1, node_switch_lb, t)) {
        break;  // only switches remain in the sorted tail
      }
      Edge aff[2];
      int naff = 1;
      if (a.kind == ActionKind::Switch) {
        aff[0] = a.opened_edge();
        aff[1] = a.closed_edge();
        naff = 2;
      } else {
        aff[0] = a.edge();
      }
      bool clash = false;
      for (const Edge& e : chosen_edges) {
        for (int k = 0; k < naff; ++k) clash |= e == aff[k];
      }
      if (clash) continue;

      chosen.push_back(a);
      for (int k = 0; k < naff; ++k) chosen_edges.push_back(aff[k]);

      bool found = false;
      if (cfg_.objective == Objective::Optimal) {
        found = visit_child(g, chosen, t, switches_so_far);
        if (!found && !stopped()) {
          found = enumerate_subsets(g, candidates, j + 1, chosen, chosen_edges, t,
                                    switches_so_far, node_switch_lb);
        }
      } else {
        found = enumerate_subsets(g, candidates, j + 1, chosen, chosen_edges, t,
                                  switches_so_far, node_switch_lb);
        if (!found && !stopped()) {
          found = visit_child(g, chosen, t, switches_so_far);
        }
      }

      chosen.pop_back();
      chosen_edges.resize(chosen_edges.size() - naff);
      if (found) return true;
      if (stopped()) return false;
    }
    return false;
  }

  bool visit_child(const PowerGrid& g, const std::vector<Action>& step, int t,
                   int switches_so_far) {
    ++stats_.generated;
    note_limits();
    if (stopped()) return false;

    int sw = switches_so_far;
    for (const Action& a : step) sw += a.kind == ActionKind::Switch;
    const int t1 = t + 1;

    std::vector<PowerGrid::EdgeEntry> edges(g.edges().begin(), g.edges().end());
    for (const Action& a : step) apply_unchecked(edges, a);
    PowerGrid child = g.with_edges(std::move(edges));
    const uint64_t child_hash = child.content_hash();
    const bool is_target = child_hash == target_hash_ && child == inst_.target;

    if (is_target) {
      if (t1 >= lo_) {
        record_plan(step, t1, sw);
        return cfg_.objective == Objective::Satisficing;
      }
      // Too early to stop; the target is compliant, keep acting below.
    } else if (t1 >= hi_) {
      return false;
    }

    // Revisits of a state with the same remaining budget face the identical
    // completion subproblem; prune before the costlier checks.
    uint64_t key = mix_hash(child_hash, static_cast<uint64_t>(hi_ - t1));
    auto [it, inserted] = memo_.try_emplace(key, sw);
    if (!inserted) {
      if (cfg_.objective == Objective::Satisficing || it->second <= sw) return false;
      it->second = sw;
    }

    PendingWork work = pending_work(child, inst_);
    const int step_lb = work.step_bound(cfg_.mode);
    if (t1 + step_lb > hi_) return false;
    if (cfg_.objective == Objective::Optimal) {
      PlanCost bound{sw + work.switch_bound(), t1 + step_lb};
      if (bound >= best_cost_) return false;
    }
    if (!is_target && !is_compliant(child)) return false;

    current_.push_back(step);
    bool found = dfs(child, t1, sw, work);
    current_.pop_back();
    return found;
  }

  void record_plan(const std::vector<Action>& last_step, int length, int switches) {
    PlanCost cost{switches, length};
    if (cost >= best_cost_) return;
    Plan plan;
    plan.steps = current_;
    plan.steps.push_back(last_step);
    best_plan_ = std::move(plan);
    best_cost_ = cost;
  }

  const Instance& inst_;
  const SolveConfig& cfg_;
  int lo_, hi_;
  std::chrono::steady_clock::time_point deadline_;
  uint64_t memo_cap_;
  uint64_t target_hash_;
  std::unordered_map<uint64_t, int> memo_;
  std::vector<ActionSet> current_;
  std::optional<Plan> best_plan_;
  PlanCost best_cost_{std::numeric_limits<int>::max(), std::numeric_limits<int>::max()};
  SolveStats stats_;
  bool out_of_time_ = false;
  bool out_of_memory_ = false;
  bool out_of_nodes_ = false;
};

inline SolveResult solve_bounded_until(const Instance& inst, const SolveConfig& cfg, int lo,
                                       int hi,
                                       std::chrono::steady_clock::time_point deadline,
                                       std::optional<PlanCost> incumbent = std::nullopt) {
  if (lo < 1 || lo > hi) {
    throw Error(Errc::invalid_window, "need 1 <= lo <= hi, got [" + std::to_string(lo) + "," +
                                          std::to_string(hi) + "]");
  }
  auto begin = std::chrono::steady_clock::now();
  BoundedSearch search(inst, cfg, lo, hi, deadline, incumbent);
  SolveResult result = search.run();
  result.stats.wall_seconds = std::chrono::duration<double>(
      std::chrono::steady_clock::now() - begin).count();
  return result;
}

}  // namespace detail

/// Complete bounded search: returns a plan with lo <= length <= hi when one
/// exists (cost-minimal and lexicographically smallest in optimal mode),
/// UnsatWithinHorizon otherwise, or ResourceExceeded on a limit.
inline SolveResult solve_bounded(const Instance& inst, const SolveConfig& cfg, int lo, int hi) {
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(cfg.time_limit));
  return detail::solve_bounded_until(inst, cfg, lo, hi, deadline);
}

/// Exponential horizon expansion over windows [2^h, 2^(h+1)]. Satisficing
/// stops at the first solved window. Optimal keeps walking windows as long as
/// a cheaper plan could still exist — an improving plan needs one fewer
/// switch and so has length at most |B| + |R| + switches - 1 — which makes
/// the returned cost the horizon-wide lexicographic optimum (the mode
/// dominance and oracle-equality guarantees rely on this). The zero-length
/// plan is answered before the first window unless strict_nonempty.
inline SolveResult solve(const Instance& inst, const SolveConfig& cfg) {
  auto begin = std::chrono::steady_clock::now();
  auto deadline = begin + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(cfg.time_limit));
  SolveResult result;
  auto finish = [&](SolveOutcome outcome) {
    result.outcome = outcome;
    result.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    return result;
  };
  if (!cfg.strict_nonempty && inst.start == inst.target) {
    result.plan = Plan{};
    result.cost = PlanCost{0, 0};
    return finish(SolveOutcome::Solved);
  }

  const detail::PendingWork initial_work = detail::pending_work(inst.start, inst);
  const int fixed_edits = initial_work.adds + initial_work.removes;

  std::optional<Plan> best;
  PlanCost best_cost{0, 0};
  for (auto [lo, hi] : horizon_windows(cfg.max_horizon)) {
    if (best) {
      // Only strictly fewer switches can improve, and every step holds at
      // least one action, so improving plans fit below this length.
      int improving_length_cap = fixed_edits + best_cost.switches - 1;
      if (lo > improving_length_cap) break;
      hi = std::min(hi, improving_length_cap);
    }
    std::optional<PlanCost> incumbent;
    if (best) incumbent = best_cost;
    SolveResult window = detail::solve_bounded_until(inst, cfg, lo, hi, deadline, incumbent);
    result.stats.expanded += window.stats.expanded;
    result.stats.generated += window.stats.generated;
    ++result.stats.windows_tried;
    if (window.plan) {
      best = std::move(window.plan);
      best_cost = window.cost;
    }
    if (window.outcome == SolveOutcome::ResourceExceeded) {
      result.plan = best;
      if (best) result.cost = best_cost;
      return finish(SolveOutcome::ResourceExceeded);
    }
    if (best && cfg.objective == Objective::Satisficing) break;
  }
  if (best) {
    result.plan = std::move(best);
    result.cost = best_cost;
    return finish(SolveOutcome::Solved);
  }
  result.horizon = cfg.max_horizon;
  return finish(SolveOutcome::UnsatWithinHorizon);
}

}  // namespace gridplan

#endif  // GRIDPLAN_PLANNER_HPP_
