#ifndef GRIDPLAN_CLI_HPP_
#define GRIDPLAN_CLI_HPP_

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gridplan/bench.hpp"
#include "gridplan/compliance.hpp"
#include "gridplan/generator.hpp"
#include "gridplan/io.hpp"
#include "gridplan/planner.hpp"
#include "gridplan/verify.hpp"

namespace gridplan::cli {

// Exit codes: 0 success/valid/solved, 1 well-formed negative answer,
// 2 usage error, 3 input error, 4 resource limit, 5 internal error.
constexpr int kSuccess = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;
constexpr int kInput = 3;
constexpr int kResource = 4;
constexpr int kInternal = 5;

namespace detail {

inline int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::invalid_window:
      return kUsage;
    case Errc::cap_exceeded:
      return kResource;
    default:
      return kInput;
  }
}

inline uint64_t env_seed() {
  const char* s = std::getenv("GRIDPLAN_SEED");
  if (!s || !*s) return 0;
  return std::strtoull(s, nullptr, 10);
}

inline PlanMode parse_mode(const std::string& s) {
  return s == "sequential" ? PlanMode::Sequential : PlanMode::Parallel;
}

inline Objective parse_objective(const std::string& s) {
  return s == "satisficing" ? Objective::Satisficing : Objective::Optimal;
}

inline std::string format_alpha(double alpha) {
  std::ostringstream os;
  os << alpha;
  return os.str();
}

inline nlohmann::json compliance_json(const ComplianceReport& report) {
  nlohmann::json violations = nlohmann::json::array();
  for (const auto& v : report.violations) {
    violations.push_back({{"code", violation_name(v.code)},
                          {"subject", v.subject},
                          {"message", v.message}});
  }
  return {{"radial", report.radial},
          {"reconfigurable", report.reconfigurable},
          {"degree_compliant", report.degree_compliant},
          {"compliant", report.compliant()},
          {"violations", violations}};
}

inline void print_compliance(const ComplianceReport& report, std::ostream& out) {
  auto yn = [](bool b) { return b ? "yes" : "no"; };
  out << "radial: " << yn(report.radial) << "\n";
  out << "reconfigurable: " << yn(report.reconfigurable);
  if (!report.radial && !report.redundancy_evaluated) out << " (not evaluated: grid not radial)";
  out << "\n";
  out << "degree_compliant: " << yn(report.degree_compliant) << "\n";
  for (const auto& v : report.violations) {
    out << "  " << violation_name(v.code) << " " << v.subject << ": " << v.message << "\n";
  }
  out << (report.compliant() ? "compliant" : "not compliant") << "\n";
}

inline nlohmann::json validation_json(const ValidationReport& report) {
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"step", f.step}, {"code", failure_name(f.code)}, {"detail", f.detail}});
  }
  return {{"valid", report.valid}, {"failures", failures}};
}

inline void print_validation(const ValidationReport& report, std::ostream& out) {
  if (report.valid) {
    out << "valid\n";
    return;
  }
  out << "invalid\n";
  for (const auto& f : report.failures) {
    out << "  step " << f.step << " " << failure_name(f.code) << ": " << f.detail << "\n";
  }
}

struct SolveOptions {
  std::string instance_path;
  std::string mode = "parallel";
  std::string objective = "optimal";
  int max_horizon = 256;
  double timeout = 1800.0;
  uint64_t mem_limit = 2ull * 1024 * 1024 * 1024;
  bool strict_nonempty = false;
  uint64_t seed = 0;
  bool seed_given = false;
  std::string out_path;
  std::string stats = "none";
};

inline int cmd_solve(const SolveOptions& opt, std::ostream& out, std::ostream& err) {
  Instance inst = parse_instance(read_file(opt.instance_path));
  SolveConfig cfg;
  cfg.mode = parse_mode(opt.mode);
  cfg.objective = parse_objective(opt.objective);
  cfg.max_horizon = opt.max_horizon;
  cfg.time_limit = opt.timeout;
  cfg.memory_limit = opt.mem_limit;
  cfg.strict_nonempty = opt.strict_nonempty;
  cfg.seed = opt.seed_given ? opt.seed : env_seed();

  SolveResult result = solve(inst, cfg);

  if (opt.stats == "json") {
    const char* outcome = result.outcome == SolveOutcome::Solved ? "solved"
                          : result.outcome == SolveOutcome::UnsatWithinHorizon
                              ? "unsat_within_horizon"
                              : "resource_exceeded";
    nlohmann::json stats = {{"outcome", outcome},
                            {"mode", opt.mode},
                            {"objective", opt.objective},
                            {"windows_tried", result.stats.windows_tried},
                            {"expanded", result.stats.expanded},
                            {"generated", result.stats.generated},
                            {"wall_seconds", result.stats.wall_seconds}};
    if (result.plan) {
      stats["cost"] = {{"switches", result.cost.switches}, {"length", result.cost.length}};
      stats["total_actions"] = total_actions(*result.plan);
    }
    err << stats.dump(2) << "\n";
  }

  auto emit_plan = [&](const Plan& plan, const std::string& header) {
    std::string text = header + serialize_plan(plan);
    if (opt.out_path.empty()) {
      out << text;
    } else {
      write_file(opt.out_path, text);
      err << "plan written to " << opt.out_path << "\n";
    }
  };

  switch (result.outcome) {
    case SolveOutcome::Solved: {
      auto check = validate_plan(inst, *result.plan, cfg.mode);
      if (!check.valid) {
        err << "internal error: solver produced an invalid plan\n";
        print_validation(check, err);
        return kInternal;
      }
      emit_plan(*result.plan, "");
      return kSuccess;
    }
    case SolveOutcome::UnsatWithinHorizon:
      err << "UnsatWithinHorizon(" << result.horizon << "): no plan of length <= "
          << result.horizon << "\n";
      return kNegative;
    case SolveOutcome::ResourceExceeded:
      err << "resource limit exceeded\n";
      if (result.plan) emit_plan(*result.plan, "% incomplete\n");
      return kResource;
  }
  return kInternal;
}

struct ValidateOptions {
  std::string instance_path;
  std::string plan_path;
  std::string mode = "parallel";
  bool json = false;
};

inline int cmd_validate(const ValidateOptions& opt, std::ostream& out) {
  Instance inst = parse_instance(read_file(opt.instance_path));
  Plan plan = parse_plan(read_file(opt.plan_path));
  ValidationReport report = validate_plan(inst, plan, parse_mode(opt.mode));
  if (opt.json) {
    out << validation_json(report).dump(2) << "\n";
  } else {
    print_validation(report, out);
  }
  return report.valid ? kSuccess : kNegative;
}

struct CheckOptions {
  std::string grid_path;
  bool json = false;
};

inline int cmd_check(const CheckOptions& opt, std::ostream& out) {
  PowerGrid grid = parse_grid(read_file(opt.grid_path));
  ComplianceReport report = check_compliance(grid);
  if (opt.json) {
    out << compliance_json(report).dump(2) << "\n";
  } else {
    print_compliance(report, out);
  }
  return report.compliant() ? kSuccess : kNegative;
}

struct GenerateOptions {
  std::vector<int> nodes = {8};
  int primaries = 2;
  std::vector<double> alphas = {0.2, 0.6, 1.0, 1.4, 1.8};
  int count = 5;
  uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir;
};

inline int cmd_generate(const GenerateOptions& opt, std::ostream& out) {
  namespace fs = std::filesystem;
  fs::create_directories(opt.out_dir);
  uint64_t base_seed = opt.seed_given ? opt.seed : env_seed();
  for (int nodes : opt.nodes) {
    for (double alpha : opt.alphas) {
      for (int c = 0; c < opt.count; ++c) {
        uint64_t seed = base_seed + static_cast<uint64_t>(c);
        GenConfig cfg;
        cfg.num_nodes = nodes;
        cfg.num_primaries = opt.primaries;
        cfg.alpha = alpha;
        cfg.seed = seed;
        GeneratedInstance gen = generate_instance(cfg);
        std::string base = "v" + std::to_string(nodes) + "_a" + format_alpha(alpha) + "_s" +
                           std::to_string(seed);
        InstanceMeta meta{gen.witness_bound, alpha, seed};
        write_file((fs::path(opt.out_dir) / (base + ".lp")).string(),
                   meta_comment(meta) + serialize_instance(gen.instance));
        write_file((fs::path(opt.out_dir) / (base + ".plan")).string(),
                   serialize_plan(gen.witness));
        out << base << ".lp g=" << gen.witness_bound << " edges="
            << gen.instance.start.edge_count() << "\n";
      }
    }
  }
  return kSuccess;
}

struct ExportOptions {
  std::string path;
  bool target = false;
  std::string out_path;
};

inline int cmd_export(const ExportOptions& opt, std::ostream& out) {
  Instance inst = parse_instance(read_file(opt.path), /*permissive=*/true);
  std::string dot = export_dot(opt.target ? inst.target : inst.start);
  if (opt.out_path.empty()) {
    out << dot;
  } else {
    write_file(opt.out_path, dot);
  }
  return kSuccess;
}

struct BenchOptions {
  std::string dir;
  std::vector<std::string> modes = {"sequential", "parallel"};
  std::vector<std::string> strategies = {"exponential", "bounded-0.5g", "bounded-g",
                                         "bounded-2g"};
  std::string objective = "satisficing";
  double timeout = 1800.0;
  uint64_t mem_limit = 2ull * 1024 * 1024 * 1024;
  int max_horizon = 256;
  int jobs = 0;
  std::string csv_path;
  std::string cactus_path;
};

inline int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(opt.dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".lp") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    err << "no .lp instances under " << opt.dir << "\n";
    return kInput;
  }

  std::vector<BenchItem> items;
  for (const std::string& path : files) {
    std::string text = read_file(path);
    BenchItem item;
    item.name = fs::path(path).filename().string();
    item.instance = parse_instance(text);
    if (auto meta = parse_instance_meta(text)) item.witness_bound = meta->g;
    items.push_back(std::move(item));
  }

  BenchConfig cfg;
  cfg.modes.clear();
  for (const std::string& m : opt.modes) cfg.modes.push_back(parse_mode(m));
  cfg.strategies.clear();
  for (const std::string& s : opt.strategies) {
    if (s == "exponential") {
      cfg.strategies.push_back(BenchStrategy::make_exponential());
    } else if (s == "bounded-0.5g") {
      cfg.strategies.push_back(BenchStrategy::bounded(0.5, "bounded@0.5g"));
    } else if (s == "bounded-g") {
      cfg.strategies.push_back(BenchStrategy::bounded(1.0, "bounded@g"));
    } else {
      cfg.strategies.push_back(BenchStrategy::bounded(2.0, "bounded@2g"));
    }
  }
  cfg.objective = parse_objective(opt.objective);
  cfg.timeout = opt.timeout;
  cfg.memory_limit = opt.mem_limit;
  cfg.max_horizon = opt.max_horizon;
  cfg.jobs = opt.jobs;

  std::vector<BenchRow> rows = run_bench(items, cfg);
  std::string csv = bench_csv(rows);
  if (opt.csv_path.empty()) {
    out << csv;
  } else {
    write_file(opt.csv_path, csv);
    err << "csv written to " << opt.csv_path << "\n";
  }
  if (!opt.cactus_path.empty()) {
    write_file(opt.cactus_path, bench_cactus(rows));
    err << "cactus data written to " << opt.cactus_path << "\n";
  }
  return kSuccess;
}

}  // namespace detail

/// Parses and runs one CLI invocation; `args` excludes the program name.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Long-term power grid planning: solve, validate, check, generate, export, bench"};
  app.name("gridplan");
  app.require_subcommand(1);

  detail::SolveOptions solve_opt;
  auto* solve_cmd = app.add_subcommand("solve", "Plan a sequence of grid edits");
  solve_cmd->add_option("instance", solve_opt.instance_path, "instance fact file")->required();
  solve_cmd->add_option("--mode", solve_opt.mode, "sequential or parallel steps")
      ->check(CLI::IsMember({"sequential", "parallel"}));
  solve_cmd->add_option("--objective", solve_opt.objective, "satisficing or optimal")
      ->check(CLI::IsMember({"satisficing", "optimal"}));
  solve_cmd->add_option("--max-horizon", solve_opt.max_horizon, "largest plan length tried")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--timeout", solve_opt.timeout, "time limit in seconds");
  solve_cmd->add_option("--mem-limit", solve_opt.mem_limit, "memory limit in bytes");
  solve_cmd->add_flag("--strict-nonempty", solve_opt.strict_nonempty,
                      "require at least one action even when start equals target");
  auto* solve_seed = solve_cmd->add_option("--seed", solve_opt.seed, "search seed");
  solve_cmd->add_option("--out", solve_opt.out_path, "write the plan here instead of stdout");
  solve_cmd->add_option("--stats", solve_opt.stats, "emit solver statistics")
      ->check(CLI::IsMember({"none", "json"}));

  detail::ValidateOptions validate_opt;
  auto* validate_cmd = app.add_subcommand("validate", "Replay and check a plan");
  validate_cmd->add_option("instance", validate_opt.instance_path, "instance fact file")
      ->required();
  validate_cmd->add_option("plan", validate_opt.plan_path, "plan fact file")->required();
  validate_cmd->add_option("--mode", validate_opt.mode, "sequential or parallel semantics")
      ->check(CLI::IsMember({"sequential", "parallel"}));
  validate_cmd->add_flag("--json", validate_opt.json, "machine-readable report");

  detail::CheckOptions check_opt;
  auto* check_cmd = app.add_subcommand("check", "Check compliance of a grid file");
  check_cmd->add_option("grid", check_opt.grid_path, "grid-only fact file")->required();
  check_cmd->add_flag("--json", check_opt.json, "machine-readable report");

  detail::GenerateOptions generate_opt;
  auto* generate_cmd = app.add_subcommand("generate", "Sample synthetic instances");
  generate_cmd->add_option("--out", generate_opt.out_dir, "output directory")->required();
  generate_cmd->add_option("--nodes", generate_opt.nodes, "grid sizes |V|")
      ->check(CLI::PositiveNumber);
  generate_cmd->add_option("--primaries", generate_opt.primaries, "number of primaries");
  generate_cmd->add_option("--alpha", generate_opt.alphas, "walk depth factors");
  generate_cmd->add_option("--count", generate_opt.count, "seeds per (size, alpha) cell")
      ->check(CLI::PositiveNumber);
  auto* generate_seed = generate_cmd->add_option("--seed", generate_opt.seed, "base seed");

  detail::ExportOptions export_opt;
  auto* export_cmd = app.add_subcommand("export", "Render a grid as DOT");
  export_cmd->add_option("file", export_opt.path, "grid or instance fact file")->required();
  export_cmd->add_flag("--target", export_opt.target, "render the target grid");
  export_cmd->add_option("--out", export_opt.out_path, "write DOT here instead of stdout");

  detail::BenchOptions bench_opt;
  auto* bench_cmd = app.add_subcommand("bench", "Run the solver over an instance directory");
  bench_cmd->add_option("dir", bench_opt.dir, "directory of .lp instances")->required();
  bench_cmd->add_option("--mode", bench_opt.modes, "modes to run")
      ->check(CLI::IsMember({"sequential", "parallel"}));
  bench_cmd->add_option("--strategy", bench_opt.strategies, "search strategies")
      ->check(CLI::IsMember({"exponential", "bounded-0.5g", "bounded-g", "bounded-2g"}));
  bench_cmd->add_option("--objective", bench_opt.objective, "satisficing or optimal")
      ->check(CLI::IsMember({"satisficing", "optimal"}));
  bench_cmd->add_option("--timeout", bench_opt.timeout, "per-run time limit in seconds");
  bench_cmd->add_option("--mem-limit", bench_opt.mem_limit, "per-run memory limit in bytes");
  bench_cmd->add_option("--max-horizon", bench_opt.max_horizon, "horizon for exponential runs");
  bench_cmd->add_option("--jobs", bench_opt.jobs, "concurrent solver jobs");
  bench_cmd->add_option("--csv", bench_opt.csv_path, "write the CSV here instead of stdout");
  bench_cmd->add_option("--cactus", bench_opt.cactus_path, "write cactus-plot data here");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  solve_opt.seed_given = solve_seed->count() > 0;
  generate_opt.seed_given = generate_seed->count() > 0;

  try {
    if (solve_cmd->parsed()) return detail::cmd_solve(solve_opt, out, err);
    if (validate_cmd->parsed()) return detail::cmd_validate(validate_opt, out);
    if (check_cmd->parsed()) return detail::cmd_check(check_opt, out);
    if (generate_cmd->parsed()) return detail::cmd_generate(generate_opt, out);
    if (export_cmd->parsed()) return detail::cmd_export(export_opt, out);
    if (bench_cmd->parsed()) return detail::cmd_bench(bench_opt, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return detail::exit_code_for(e);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace gridplan::cli

#endif  // GRIDPLAN_CLI_HPP_
