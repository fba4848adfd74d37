#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "gridplan/planner.hpp"
#include "gridplan/verify.hpp"

using namespace gridplan;

namespace {

Plan single_switch_plan() {
  Plan p;
  p.steps.push_back({Action::switch_at(NodeId("s1"), NodeId("p1"), NodeId("s2"))});
  return p;
}

SolveConfig config(PlanMode mode, Objective objective) {
  SolveConfig cfg;
  cfg.mode = mode;
  cfg.objective = objective;
  cfg.time_limit = 120.0;
  return cfg;
}

}  // namespace

TEST_CASE("plan_cost counts switches lexicographically before length") {
  CHECK(plan_cost(single_switch_plan()) == PlanCost{1, 1});

  Plan two;
  two.steps.push_back({Action::add(Edge(NodeId("a"), NodeId("b")))});
  two.steps.push_back({Action::remove(Edge(NodeId("c"), NodeId("d")))});
  CHECK(plan_cost(two) == PlanCost{0, 2});

  CHECK(PlanCost{0, 3} < PlanCost{1, 1});
  CHECK(PlanCost{1, 1} < PlanCost{1, 2});
}

TEST_CASE("candidate actions on the ring fixture are its two switches") {
  Instance inst = fixtures::ring4_instance();
  auto cands = candidate_actions(inst.start, inst);
  std::vector<Action> expect = {
      Action::switch_at(NodeId("s1"), NodeId("p1"), NodeId("s2")),
      Action::switch_at(NodeId("s2"), NodeId("p2"), NodeId("s1")),
  };
  CHECK(cands == expect);
}

TEST_CASE("candidate adds appear exactly until the edge is built") {
  PowerGrid start = fixtures::ring4_start();
  PowerGrid target = apply_action(start, Action::add(Edge(NodeId("p2"), NodeId("s1"))));
  Instance inst = make_instance(start, target);
  Action add = Action::add(Edge(NodeId("p2"), NodeId("s1")));

  auto before = candidate_actions(inst.start, inst);
  CHECK(std::count(before.begin(), before.end(), add) == 1);

  PowerGrid built = apply_action(inst.start, add);
  auto after = candidate_actions(built, inst);
  CHECK(std::count(after.begin(), after.end(), add) == 0);
}

TEST_CASE("solve_bounded finds the optimal single switch on the ring") {
  Instance inst = fixtures::ring4_instance();
  for (PlanMode mode : {PlanMode::Sequential, PlanMode::Parallel}) {
    SolveResult r = solve_bounded(inst, config(mode, Objective::Optimal), 1, 2);
    REQUIRE(r.outcome == SolveOutcome::Solved);
    CHECK(*r.plan == single_switch_plan());
    CHECK(r.cost == PlanCost{1, 1});
  }
  auto oracle = oracle_shortest(inst, PlanMode::Sequential, 4);
  REQUIRE(oracle.has_value());
  CHECK(oracle->cost == PlanCost{1, 1});
}

TEST_CASE("solve_bounded validates the window") {
  Instance inst = fixtures::ring4_instance();
  SolveConfig cfg = config(PlanMode::Parallel, Objective::Optimal);
  CHECK_THROWS_AS(solve_bounded(inst, cfg, 0, 2), Error);
  CHECK_THROWS_AS(solve_bounded(inst, cfg, 3, 2), Error);
}

TEST_CASE("solve answers the ring in the first window") {
  Instance inst = fixtures::ring4_instance();
  SolveResult r = solve(inst, config(PlanMode::Parallel, Objective::Optimal));
  REQUIRE(r.outcome == SolveOutcome::Solved);
  CHECK(r.cost == PlanCost{1, 1});
  CHECK(r.stats.windows_tried == 1);
}

TEST_CASE("exponential windows walk up to the right horizon") {
  // Moving the open point five positions along a single feeder takes exactly
  // five switches and admits no parallelism (each move shares an edge with
  // the next), so windows [1,2] and [2,4] fail and [4,8] succeeds.
  Instance inst = fixtures::feeder_move_instance(5, 0, 5);
  for (PlanMode mode : {PlanMode::Sequential, PlanMode::Parallel}) {
    CAPTURE(static_cast<int>(mode));
    SolveResult r = solve(inst, config(mode, Objective::Optimal));
    REQUIRE(r.outcome == SolveOutcome::Solved);
    CHECK(r.cost == PlanCost{5, 5});
    CHECK(r.stats.windows_tried == 3);
    CHECK(validate_plan(inst, *r.plan, mode).valid);
  }
  auto oracle = oracle_shortest(inst, PlanMode::Parallel, 6);
  REQUIRE(oracle.has_value());
  CHECK(oracle->cost == PlanCost{5, 5});
}

TEST_CASE("windows cover every length with no gaps") {
  for (int max_horizon : {1, 2, 3, 5, 8, 17, 64, 256}) {
    auto windows = horizon_windows(max_horizon);
    std::set<int> covered;
    for (auto [lo, hi] : windows) {
      CHECK(lo >= 1);
      CHECK(lo <= hi);
      CHECK(hi <= max_horizon);
      for (int len = lo; len <= hi; ++len) covered.insert(len);
    }
    CHECK(static_cast<int>(covered.size()) == max_horizon);
    CHECK(*covered.begin() == 1);
    CHECK(*covered.rbegin() == max_horizon);
  }
}

TEST_CASE("a too-small horizon reports UnsatWithinHorizon") {
  Instance inst = fixtures::feeder_move_instance(5, 0, 5);  // needs length 5
  SolveConfig cfg = config(PlanMode::Parallel, Objective::Optimal);
  cfg.max_horizon = 4;
  SolveResult r = solve(inst, cfg);
  CHECK(r.outcome == SolveOutcome::UnsatWithinHorizon);
  CHECK(r.horizon == 4);
  CHECK(r.stats.windows_tried == 3);  // [1,2], [2,4], [4,4]
  CHECK_FALSE(oracle_shortest(inst, PlanMode::Parallel, 4).has_value());
}

TEST_CASE("tie relocation deadlock separates the modes") {
  Instance inst = fixtures::deadlock_instance();

  SUBCASE("parallel does both edits in one step") {
    SolveResult r = solve(inst, config(PlanMode::Parallel, Objective::Optimal));
    REQUIRE(r.outcome == SolveOutcome::Solved);
    CHECK(r.cost == PlanCost{0, 1});
    CHECK(validate_plan(inst, *r.plan, PlanMode::Parallel).valid);
  }

  SUBCASE("sequential is unsatisfiable at any horizon") {
    SolveConfig cfg = config(PlanMode::Sequential, Objective::Optimal);
    cfg.max_horizon = 8;
    SolveResult r = solve(inst, cfg);
    CHECK(r.outcome == SolveOutcome::UnsatWithinHorizon);
    CHECK(r.horizon == 8);
    CHECK_FALSE(oracle_shortest(inst, PlanMode::Sequential, 8).has_value());
  }
}

TEST_CASE("zero-length plans and strict mode") {
  Instance same = make_instance(fixtures::ring4_start(), fixtures::ring4_start());

  SUBCASE("the empty plan answers an empty diff before any window") {
    SolveResult r = solve(same, config(PlanMode::Parallel, Objective::Optimal));
    REQUIRE(r.outcome == SolveOutcome::Solved);
    CHECK(r.plan->steps.empty());
    CHECK(r.cost == PlanCost{0, 0});
    CHECK(r.stats.windows_tried == 0);
  }

  SUBCASE("strict mode on a grid with moves finds a switch round-trip") {
    SolveConfig cfg = config(PlanMode::Sequential, Objective::Optimal);
    cfg.strict_nonempty = true;
    SolveResult r = solve(same, cfg);
    REQUIRE(r.outcome == SolveOutcome::Solved);
    CHECK(r.cost == PlanCost{2, 2});
    CHECK(validate_plan(same, *r.plan, PlanMode::Sequential).valid);
    // Two symmetric round-trips tie on cost; ties resolve to the
    // lexicographically smallest action sequence.
    CHECK(r.plan->steps[0][0] ==
          Action::switch_at(NodeId("s1"), NodeId("p1"), NodeId("s2")));
  }

  SUBCASE("strict mode with no applicable action is unsatisfiable") {
    GridBuilder b1, b2;
    b1.add_node(NodeId("p1"), NodeKind::Primary);
    b2.add_node(NodeId("p1"), NodeKind::Primary);
    Instance lone = make_instance(b1.build(), b2.build());
    SolveConfig cfg = config(PlanMode::Parallel, Objective::Optimal);
    cfg.strict_nonempty = true;
    cfg.max_horizon = 4;
    SolveResult r = solve(lone, cfg);
    CHECK(r.outcome == SolveOutcome::UnsatWithinHorizon);
    CHECK(r.horizon == 4);
    // Without strict mode the empty plan answers it.
    SolveResult easy = solve(lone, config(PlanMode::Parallel, Objective::Optimal));
    CHECK(easy.outcome == SolveOutcome::Solved);
    CHECK(easy.cost == PlanCost{0, 0});
  }
}

TEST_CASE("optimization never costs more than satisficing") {
  for (int dist = 2; dist <= 4; ++dist) {
    Instance inst = fixtures::feeder_move_instance(5, 0, dist);
    SolveResult opt = solve(inst, config(PlanMode::Parallel, Objective::Optimal));
    SolveResult sat = solve(inst, config(PlanMode::Parallel, Objective::Satisficing));
    REQUIRE(opt.outcome == SolveOutcome::Solved);
    REQUIRE(sat.outcome == SolveOutcome::Solved);
    CHECK(opt.cost <= sat.cost);
    CHECK(total_actions(*opt.plan) <= total_actions(*sat.plan));
    CHECK(validate_plan(inst, *sat.plan, PlanMode::Parallel).valid);
  }
}

TEST_CASE("solver results are deterministic across runs") {
  Instance inst = fixtures::feeder_move_instance(4, 1, 3);
  for (Objective obj : {Objective::Optimal, Objective::Satisficing}) {
    for (PlanMode mode : {PlanMode::Sequential, PlanMode::Parallel}) {
      SolveResult a = solve(inst, config(mode, obj));
      SolveResult b = solve(inst, config(mode, obj));
      REQUIRE(a.outcome == SolveOutcome::Solved);
      CHECK(a.outcome == b.outcome);
      CHECK(*a.plan == *b.plan);
      CHECK(a.cost == b.cost);
    }
  }
}

TEST_CASE("resource limits surface as ResourceExceeded") {
  Instance inst = fixtures::feeder_move_instance(5, 0, 5);

  SUBCASE("node limit") {
    SolveConfig cfg = config(PlanMode::Parallel, Objective::Optimal);
    cfg.node_limit = 1;
    SolveResult r = solve(inst, cfg);
    CHECK(r.outcome == SolveOutcome::ResourceExceeded);
  }

  SUBCASE("time limit") {
    SolveConfig cfg = config(PlanMode::Parallel, Objective::Optimal);
    cfg.time_limit = 0.0;
    SolveResult r = solve(inst, cfg);
    CHECK(r.outcome == SolveOutcome::ResourceExceeded);
  }
}

TEST_CASE("every solved plan validates and reports its own cost") {
  std::vector<Instance> corpus = {
      fixtures::ring4_instance(),
      fixtures::feeder_move_instance(3, 0, 2),
      fixtures::feeder_move_instance(5, 2, 5),
      fixtures::deadlock_instance(),
  };
  for (const Instance& inst : corpus) {
    for (PlanMode mode : {PlanMode::Sequential, PlanMode::Parallel}) {
      for (Objective obj : {Objective::Optimal, Objective::Satisficing}) {
        SolveResult r = solve(inst, config(mode, obj));
        if (r.outcome != SolveOutcome::Solved) continue;
        auto report = validate_plan(inst, *r.plan, mode);
        CAPTURE(static_cast<int>(mode));
        CAPTURE(static_cast<int>(obj));
        CHECK(report.valid);
        CHECK(plan_cost(*r.plan) == r.cost);
      }
    }
  }
}
