#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "gridplan/compliance.hpp"

using namespace gridplan;

namespace {

PowerGrid closed_triangle_with_spare_primary() {
  GridBuilder b;
  b.add_node(NodeId("p1"), NodeKind::Primary);
  b.add_node(NodeId("p2"), NodeKind::Primary);
  b.add_node(NodeId("s1"), NodeKind::Secondary);
  b.add_node(NodeId("s2"), NodeKind::Secondary);
  b.add_edge("p1", "s1", EdgeState::Close);
  b.add_edge("s1", "s2", EdgeState::Close);
  b.add_edge("p1", "s2", EdgeState::Close);
  return b.build();
}

PowerGrid closed_primary_path() {
  GridBuilder b;
  b.add_node(NodeId("p1"), NodeKind::Primary);
  b.add_node(NodeId("p2"), NodeKind::Primary);
  b.add_node(NodeId("s1"), NodeKind::Secondary);
  b.add_edge("p1", "s1", EdgeState::Close);
  b.add_edge("p2", "s1", EdgeState::Close);
  return b.build();
}

bool has_violation(const ComplianceReport& r, ViolationCode code) {
  for (const auto& v : r.violations) {
    if (v.code == code) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("radiality by traversal") {
  CHECK(is_radial(fixtures::ring4_start()));
  CHECK_FALSE(is_radial(closed_triangle_with_spare_primary()));
  CHECK_FALSE(is_radial(closed_primary_path()));

  SUBCASE("direct closed primary-primary edge is a loop") {
    GridBuilder b;
    b.add_node(NodeId("p1"), NodeKind::Primary);
    b.add_node(NodeId("p2"), NodeKind::Primary);
    b.add_edge("p1", "p2", EdgeState::Close);
    CHECK_FALSE(is_radial(b.build()));
  }

  SUBCASE("unsupplied secondary") {
    GridBuilder b;
    b.add_node(NodeId("p1"), NodeKind::Primary);
    b.add_node(NodeId("s1"), NodeKind::Secondary);
    b.add_node(NodeId("s2"), NodeKind::Secondary);
    b.add_edge("p1", "s1", EdgeState::Close);
    b.add_edge("s1", "s2", EdgeState::Open);
    CHECK_FALSE(is_radial(b.build()));
  }
}

TEST_CASE("radiality by edge count") {
  CHECK(is_radial_by_count(fixtures::ring4_start()));

  SUBCASE("extra closed edge breaks the count") {
    GridBuilder b;
    b.add_node(NodeId("p1"), NodeKind::Primary);
    b.add_node(NodeId("p2"), NodeKind::Primary);
    b.add_node(NodeId("s1"), NodeKind::Secondary);
    b.add_node(NodeId("s2"), NodeKind::Secondary);
    b.add_edge("p1", "s1", EdgeState::Close);
    b.add_edge("p2", "s2", EdgeState::Close);
    b.add_edge("s1", "s2", EdgeState::Close);
    CHECK_FALSE(is_radial_by_count(b.build()));
  }

  SUBCASE("agrees with the traversal formulation on random grids") {
    fixtures::TestRng rng(21);
    for (int i = 0; i < 2000; ++i) {
      PowerGrid g = fixtures::random_test_grid(rng);
      CAPTURE(i);
      CHECK(is_radial(g) == is_radial_by_count(g));
    }
  }

  SUBCASE("agrees exhaustively on tiny graphs") {
    // All edge subsets of K4 with all open/close labelings and all P choices
    // of size 1 or 2; the full |V| <= 6 sweep runs in the acceptance suite.
    const int n = 4;
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }
    const int m = static_cast<int>(pairs.size());
    for (int pmask = 1; pmask < (1 << n); ++pmask) {
      int pcount = __builtin_popcount(pmask);
      if (pcount < 1 || pcount > 2) continue;
      std::vector<NodeId> ids;
      auto table = std::make_shared<PowerGrid::NodeTable>();
      for (int i = 0; i < n; ++i) {
        std::string name = (pmask >> i & 1 ? "p" : "s") + std::to_string(i);
        ids.emplace_back(name);
      }
      std::vector<int> order(n);
      for (int i = 0; i < n; ++i) order[i] = i;
      std::sort(order.begin(), order.end(),
                [&](int a, int b) { return ids[a] < ids[b]; });
      for (int i : order) {
        table->emplace_back(ids[i], (pmask >> i & 1) ? NodeKind::Primary : NodeKind::Secondary);
      }
      for (int emask = 0; emask < (1 << m); ++emask) {
        int smask = 0;
        for (;;) {  // all subsets of emask as the closed edges
          std::vector<PowerGrid::EdgeEntry> edges;
          for (int k = 0; k < m; ++k) {
            if (!(emask >> k & 1)) continue;
            edges.emplace_back(Edge(ids[pairs[k].first], ids[pairs[k].second]),
                               (smask >> k & 1) ? EdgeState::Close : EdgeState::Open);
          }
          std::sort(edges.begin(), edges.end());
          PowerGrid g = PowerGrid::from_parts(table, std::move(edges));
          CHECK(is_radial(g) == is_radial_by_count(g));
          if (smask == emask) break;
          smask = (smask - emask) & emask;
        }
      }
    }
  }
}

TEST_CASE("assigned primary follows the closed component") {
  PowerGrid g = fixtures::ring4_start();
  CHECK(assigned_primary(g, NodeId("s1")) == NodeId("p1"));
  CHECK(assigned_primary(g, NodeId("s2")) == NodeId("p2"));

  PowerGrid h = apply_action(g, Action::switch_at(NodeId("s1"), NodeId("p1"), NodeId("s2")));
  CHECK(assigned_primary(h, NodeId("s1")) == NodeId("p2"));

  CHECK_THROWS_AS(assigned_primary(closed_primary_path(), NodeId("s1")), Error);
  CHECK_THROWS_AS(assigned_primary(g, NodeId("zz")), Error);
}

TEST_CASE("redundant connectivity") {
  PowerGrid g = fixtures::ring4_start();
  CHECK(is_redundantly_connected(g, NodeId("s1")));
  CHECK(is_redundantly_connected(g, NodeId("s2")));

  SUBCASE("no path to a second primary") {
    GridBuilder b;
    b.add_node(NodeId("p1"), NodeKind::Primary);
    b.add_node(NodeId("p2"), NodeKind::Primary);
    b.add_node(NodeId("s1"), NodeKind::Secondary);
    b.add_edge("p1", "s1", EdgeState::Close);
    CHECK_FALSE(is_redundantly_connected(b.build(), NodeId("s1")));
  }

  SUBCASE("length-1 path to the other primary suffices") {
    GridBuilder b;
    b.add_node(NodeId("p1"), NodeKind::Primary);
    b.add_node(NodeId("p2"), NodeKind::Primary);
    b.add_node(NodeId("s1"), NodeKind::Secondary);
    b.add_edge("p1", "s1", EdgeState::Close);
    b.add_edge("p2", "s1", EdgeState::Open);
    CHECK(is_redundantly_connected(b.build(), NodeId("s1")));
  }

  SUBCASE("paths through a primary do not count") {
    // s1 - p2 - s2 - p3: the only route from s1 to p3 passes through p2.
    GridBuilder b;
    b.add_node(NodeId("p1"), NodeKind::Primary);
    b.add_node(NodeId("p2"), NodeKind::Primary);
    b.add_node(NodeId("p3"), NodeKind::Primary);
    b.add_node(NodeId("s1"), NodeKind::Secondary);
    b.add_node(NodeId("s2"), NodeKind::Secondary);
    b.add_edge("p1", "s1", EdgeState::Close);
    b.add_edge("p2", "s1", EdgeState::Open);
    b.add_edge("p2", "s2", EdgeState::Close);
    b.add_edge("p3", "s2", EdgeState::Open);
    PowerGrid g2 = b.build();
    CHECK(is_redundantly_connected(g2, NodeId("s1")));  // direct edge to p2
    // s2 reaches p3 directly; its redundancy is fine too.
    CHECK(is_redundantly_connected(g2, NodeId("s2")));
  }

  SUBCASE("requires a radial grid") {
    CHECK_THROWS_AS(is_redundantly_connected(closed_primary_path(), NodeId("s1")), Error);
  }
}

TEST_CASE("reconfigurability quantifies over all secondaries") {
  CHECK(is_reconfigurable(fixtures::ring4_start()));

  SUBCASE("dropping the tie breaks it") {
    GridBuilder b;
    b.add_node(NodeId("p1"), NodeKind::Primary);
    b.add_node(NodeId("p2"), NodeKind::Primary);
    b.add_node(NodeId("s1"), NodeKind::Secondary);
    b.add_node(NodeId("s2"), NodeKind::Secondary);
    b.add_edge("p1", "s1", EdgeState::Close);
    b.add_edge("p2", "s2", EdgeState::Close);
    CHECK_FALSE(is_reconfigurable(b.build()));
  }

  SUBCASE("vacuous without secondaries") {
    GridBuilder b;
    b.add_node(NodeId("p1"), NodeKind::Primary);
    CHECK(is_reconfigurable(b.build()));
  }

  SUBCASE("single primary with secondaries can never be reconfigurable") {
    GridBuilder b;
    b.add_node(NodeId("p1"), NodeKind::Primary);
    b.add_node(NodeId("s1"), NodeKind::Secondary);
    b.add_node(NodeId("s2"), NodeKind::Secondary);
    b.add_edge("p1", "s1", EdgeState::Close);
    b.add_edge("s1", "s2", EdgeState::Close);
    b.add_edge("p1", "s2", EdgeState::Open);
    CHECK_FALSE(is_reconfigurable(b.build()));
  }
}

TEST_CASE("degree compliance bounds secondary degree to [2,3]") {
  CHECK(is_degree_compliant(fixtures::ring4_start()));

  GridBuilder low;
  low.add_node(NodeId("p1"), NodeKind::Primary);
  low.add_node(NodeId("s1"), NodeKind::Secondary);
  low.add_edge("p1", "s1", EdgeState::Close);
  CHECK_FALSE(is_degree_compliant(low.build()));

  GridBuilder high;
  high.add_node(NodeId("p1"), NodeKind::Primary);
  high.add_node(NodeId("p2"), NodeKind::Primary);
  high.add_node(NodeId("s1"), NodeKind::Secondary);
  high.add_node(NodeId("s2"), NodeKind::Secondary);
  high.add_node(NodeId("s3"), NodeKind::Secondary);
  high.add_edge("p1", "s1", EdgeState::Close);
  high.add_edge("s1", "s2", EdgeState::Open);
  high.add_edge("p2", "s1", EdgeState::Open);
  high.add_edge("s1", "s3", EdgeState::Open);
  CHECK_FALSE(is_degree_compliant(high.build()));

  SUBCASE("primaries are unconstrained") {
    GridBuilder b;
    b.add_node(NodeId("p1"), NodeKind::Primary);
    CHECK(is_degree_compliant(b.build()));
  }
}

TEST_CASE("check_compliance itemizes violations") {
  SUBCASE("compliant fixture has none") {
    auto r = check_compliance(fixtures::ring4_start());
    CHECK(r.radial);
    CHECK(r.reconfigurable);
    CHECK(r.degree_compliant);
    CHECK(r.compliant());
    CHECK(r.violations.empty());
  }

  SUBCASE("primary loop reported") {
    auto r = check_compliance(closed_primary_path());
    CHECK_FALSE(r.radial);
    CHECK_FALSE(r.reconfigurable);
    CHECK_FALSE(r.redundancy_evaluated);
    CHECK(has_violation(r, ViolationCode::PrimaryLoop));
  }

  SUBCASE("closed cycle reported") {
    auto r = check_compliance(closed_triangle_with_spare_primary());
    CHECK(has_violation(r, ViolationCode::ClosedCycle));
  }

  SUBCASE("degree-1 secondary reported as DEGREE_LOW with the node named") {
    GridBuilder b;
    b.add_node(NodeId("p1"), NodeKind::Primary);
    b.add_node(NodeId("p2"), NodeKind::Primary);
    b.add_node(NodeId("s1"), NodeKind::Secondary);
    b.add_edge("p1", "s1", EdgeState::Close);
    auto r = check_compliance(b.build());
    CHECK_FALSE(r.degree_compliant);
    REQUIRE(has_violation(r, ViolationCode::DegreeLow));
    for (const auto& v : r.violations) {
      if (v.code == ViolationCode::DegreeLow) CHECK(v.subject == "s1");
    }
  }

  SUBCASE("agrees with the three predicates and booleans match violations") {
    fixtures::TestRng rng(31);
    for (int i = 0; i < 1500; ++i) {
      PowerGrid g = fixtures::random_test_grid(rng);
      auto r = check_compliance(g);
      bool radial = is_radial(g);
      CHECK(r.radial == radial);
      CHECK(r.degree_compliant == is_degree_compliant(g));
      if (radial) {
        CHECK(r.reconfigurable == is_reconfigurable(g));
      } else {
        CHECK_FALSE(r.reconfigurable);
      }
      CHECK((r.radial && r.reconfigurable && r.degree_compliant) == r.violations.empty());
      CHECK(r.compliant() == is_compliant(g));
    }
  }
}

TEST_CASE("switch keeps degrees and moves one closed subtree") {
  fixtures::TestRng rng(47);
  int exercised = 0;
  for (int i = 0; i < 4000 && exercised < 120; ++i) {
    PowerGrid g = fixtures::random_test_grid(rng);
    if (!is_compliant(g)) continue;
    // Enumerate applicable switches that preserve compliance.
    for (const auto& [e, st] : g.edges()) {
      if (st != EdgeState::Close) continue;
      for (const auto& [e2, st2] : g.edges()) {
        if (st2 != EdgeState::Open) continue;
        for (const NodeId* pivot : {&e.u(), &e.v()}) {
          if (g.node_kind(*pivot) != NodeKind::Secondary || !e2.touches(*pivot)) continue;
          if (e.other(*pivot) == e2.other(*pivot)) continue;
          Action sw = Action::switch_at(*pivot, e.other(*pivot), e2.other(*pivot));
          if (!applicable(g, sw)) continue;
          PowerGrid h = apply_action(g, sw);
          if (!is_compliant(h)) continue;
          ++exercised;
          for (const auto& [id, kind] : g.nodes()) CHECK(degree(g, id) == degree(h, id));
          // The secondaries whose assignment changes are exactly the pivot's
          // closed subtree on the opened side, when the new root differs.
          std::set<std::string> changed;
          for (const auto& [id, kind] : g.nodes()) {
            if (kind != NodeKind::Secondary) continue;
            if (assigned_primary(g, id) != assigned_primary(h, id)) changed.insert(id.str());
          }
          // Detach the opened edge in the old grid and collect the pivot side.
          std::vector<PowerGrid::EdgeEntry> cut(g.edges().begin(), g.edges().end());
          for (auto& [ce, cst] : cut) {
            if (ce == sw.opened_edge()) cst = EdgeState::Open;
          }
          PowerGrid gcut = g.with_edges(std::move(cut));
          std::set<std::string> subtree;
          if (assigned_primary(g, sw.x) != assigned_primary(h, sw.x)) {
            for (const auto& [id, kind] : g.nodes()) {
              if (kind != NodeKind::Secondary) continue;
              // In the cut grid the pivot-side nodes form one closed component.
              auto scan_owner = [&gcut](const NodeId& a, const NodeId& b) {
                auto sc = gridplan::detail::radial_scan(gcut);
                gridplan::detail::NodeIndexer ix(gcut);
                return sc.root[ix.at(a)] == sc.root[ix.at(b)];
              };
              if (scan_owner(id, sw.x)) subtree.insert(id.str());
            }
          }
          CHECK(changed == subtree);
        }
      }
    }
  }
  CHECK(exercised >= 60);
}

TEST_CASE("removing an open edge never breaks radiality") {
  fixtures::TestRng rng(55);
  for (int i = 0; i < 800; ++i) {
    PowerGrid g = fixtures::random_test_grid(rng);
    bool radial = is_radial(g);
    for (const auto& [e, st] : g.edges()) {
      if (st != EdgeState::Open) continue;
      PowerGrid h = apply_action(g, Action::remove(e));
      if (radial) CHECK(is_radial(h));
    }
  }
}

TEST_CASE("radial grids have one primary per closed component") {
  fixtures::TestRng rng(77);
  int radial_seen = 0;
  for (int i = 0; i < 3000 && radial_seen < 150; ++i) {
    PowerGrid g = fixtures::random_test_grid(rng);
    if (!is_radial(g)) continue;
    ++radial_seen;
    auto scan = gridplan::detail::radial_scan(g);
    std::set<int> roots;
    for (size_t k = 0; k < g.node_count(); ++k) roots.insert(scan.root[k]);
    // Every component holds at most one primary; components containing any
    // secondary hold exactly one.
    for (int r : roots) CHECK(scan.primaries_in_component[r] <= 1);
    for (size_t k = 0; k < g.node_count(); ++k) {
      if (g.nodes()[k].second == NodeKind::Secondary) {
        CHECK(scan.primaries_in_component[scan.root[k]] == 1);
      }
    }
  }
  CHECK(radial_seen >= 50);
}
