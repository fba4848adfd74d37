#ifndef GRIDPLAN_BENCH_HPP_
#define GRIDPLAN_BENCH_HPP_

#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gridplan/io.hpp"
#include "gridplan/planner.hpp"

namespace gridplan {

/// One benchmark subject: a parsed instance plus its witness bound g from the
/// sidecar metadata (required by the bounded strategies).
struct BenchItem {
  std::string name;
  Instance instance;
  std::optional<int> witness_bound;
};

/// Comparison arms: the exponential horizon expansion against single bounded
/// calls at beta * g.
struct BenchStrategy {
  std::string name;
  bool exponential = true;
  double beta = 0.0;

  static BenchStrategy make_exponential() { return {"exponential", true, 0.0}; }
  static BenchStrategy bounded(double beta, std::string name) {
    return {std::move(name), false, beta};
  }
};

inline std::vector<BenchStrategy> default_strategies() {
  return {BenchStrategy::make_exponential(), BenchStrategy::bounded(0.5, "bounded@0.5g"),
          BenchStrategy::bounded(1.0, "bounded@g"), BenchStrategy::bounded(2.0, "bounded@2g")};
}

struct BenchConfig {
  std::vector<PlanMode> modes = {PlanMode::Sequential, PlanMode::Parallel};
  std::vector<BenchStrategy> strategies = default_strategies();
  Objective objective = Objective::Satisficing;
  double timeout = 1800.0;
  uint64_t memory_limit = 2ull * 1024 * 1024 * 1024;
  int max_horizon = 256;
  int jobs = 0;  // 0: half the hardware threads
};

struct BenchRow {
  std::string instance;
  int size = 0;
  PlanMode mode = PlanMode::Sequential;
  std::string strategy;
  bool solved = false;
  std::optional<PlanCost> cost;
  double seconds = 0.0;
};

inline const char* mode_name(PlanMode m) {
  return m == PlanMode::Sequential ? "sequential" : "parallel";
}

/// Runs every (instance, mode, strategy) cell, up to `jobs` concurrently;
/// each cell is an isolated solver call.
inline std::vector<BenchRow> run_bench(const std::vector<BenchItem>& items,
                                       const BenchConfig& cfg) {
  struct Cell {
    const BenchItem* item;
    PlanMode mode;
    const BenchStrategy* strategy;
  };
  std::vector<Cell> cells;
  for (const BenchItem& item : items) {
    for (PlanMode mode : cfg.modes) {
      for (const BenchStrategy& strategy : cfg.strategies) {
        if (!strategy.exponential && !item.witness_bound) {
          throw Error(Errc::syntax,
                      "instance '" + item.name + "' lacks the g metadata needed by " +
                          strategy.name);
        }
        cells.push_back({&item, mode, &strategy});
      }
    }
  }

  std::vector<BenchRow> rows(cells.size());
  std::atomic<size_t> next{0};
  int jobs = cfg.jobs > 0
                 ? cfg.jobs
                 : std::max(1u, std::thread::hardware_concurrency() / 2);
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& cell = cells[i];
      SolveConfig solve_cfg;
      solve_cfg.mode = cell.mode;
      solve_cfg.objective = cfg.objective;
      solve_cfg.max_horizon = cfg.max_horizon;
      solve_cfg.time_limit = cfg.timeout;
      solve_cfg.memory_limit = cfg.memory_limit;
      auto begin = std::chrono::steady_clock::now();
      SolveResult result;
      if (cell.strategy->exponential) {
        result = solve(cell.item->instance, solve_cfg);
      } else {
        int hi = std::max(1, static_cast<int>(std::ceil(cell.strategy->beta *
                                                        *cell.item->witness_bound)));
        result = solve_bounded(cell.item->instance, solve_cfg, 1, hi);
      }
      BenchRow row;
      row.instance = cell.item->name;
      row.size = static_cast<int>(cell.item->instance.start.node_count());
      row.mode = cell.mode;
      row.strategy = cell.strategy->name;
      row.solved = result.outcome == SolveOutcome::Solved;
      if (row.solved) row.cost = result.cost;
      row.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
      rows[i] = std::move(row);
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

inline std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "instance,size,mode,strategy,solved,cost_switches,cost_length,seconds\n";
  for (const BenchRow& row : rows) {
    os << row.instance << "," << row.size << "," << mode_name(row.mode) << "," << row.strategy
       << "," << (row.solved ? 1 : 0) << ",";
    if (row.cost) os << row.cost->switches;
    os << ",";
    if (row.cost) os << row.cost->length;
    os << "," << row.seconds << "\n";
  }
  return os.str();
}

/// Cactus data: per (mode, strategy), cumulative solved count against the
/// sorted per-instance runtimes.
inline std::string bench_cactus(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "mode,strategy,solved,seconds\n";
  std::vector<std::pair<std::string, std::string>> methods;
  for (const BenchRow& row : rows) {
    std::pair<std::string, std::string> key{mode_name(row.mode), row.strategy};
    if (std::find(methods.begin(), methods.end(), key) == methods.end()) {
      methods.push_back(key);
    }
  }
  for (const auto& [mode, strategy] : methods) {
    std::vector<double> times;
    for (const BenchRow& row : rows) {
      if (row.solved && mode_name(row.mode) == mode && row.strategy == strategy) {
        times.push_back(row.seconds);
      }
    }
    std::sort(times.begin(), times.end());
    for (size_t i = 0; i < times.size(); ++i) {
      os << mode << "," << strategy << "," << (i + 1) << "," << times[i] << "\n";
    }
  }
  return os.str();
}

}  // namespace gridplan

#endif  // GRIDPLAN_BENCH_HPP_
