#ifndef GRIDPLAN_TESTS_FIXTURES_HPP_
#define GRIDPLAN_TESTS_FIXTURES_HPP_

#include <string>

#include "gridplan/grid.hpp"
#include "gridplan/io.hpp"

namespace fixtures {

using namespace gridplan;

// Two secured feeders p1-s1, p2-s2 with the tie s1-s2 open; the target moves
// the open point from s1-s2 to p1-s1.
inline const char* ring4_file() {
  return
      "node(p1). node(p2). node(s1). node(s2).\n"
      "node_attr(p1,is_primary). node_attr(p2,is_primary).\n"
      "start(p1,s1,close).\n"
      "start(p2,s2,close).\n"
      "start(s1,s2,open).\n"
      "target(p1,s1,open).\n"
      "target(p2,s2,close).\n"
      "target(s1,s2,close).\n";
}

inline PowerGrid ring4_start() {
  GridBuilder b;
  b.add_node(NodeId("p1"), NodeKind::Primary);
  b.add_node(NodeId("p2"), NodeKind::Primary);
  b.add_node(NodeId("s1"), NodeKind::Secondary);
  b.add_node(NodeId("s2"), NodeKind::Secondary);
  b.add_edge("p1", "s1", EdgeState::Close);
  b.add_edge("p2", "s2", EdgeState::Close);
  b.add_edge("s1", "s2", EdgeState::Open);
  return b.build();
}

inline PowerGrid ring4_target() {
  GridBuilder b;
  b.add_node(NodeId("p1"), NodeKind::Primary);
  b.add_node(NodeId("p2"), NodeKind::Primary);
  b.add_node(NodeId("s1"), NodeKind::Secondary);
  b.add_node(NodeId("s2"), NodeKind::Secondary);
  b.add_edge("p1", "s1", EdgeState::Open);
  b.add_edge("p2", "s2", EdgeState::Close);
  b.add_edge("s1", "s2", EdgeState::Close);
  return b.build();
}

inline Instance ring4_instance() { return make_instance(ring4_start(), ring4_target()); }

// Single feeder path p1-s1-...-sk-p2, all edges closed except the open point,
// given as the 0-based edge position along the path. Moving the open point
// from position `from` to position `to` takes exactly |to - from| switches.
inline PowerGrid feeder_path(int secondaries, int open_position) {
  GridBuilder b;
  b.add_node(NodeId("p1"), NodeKind::Primary);
  b.add_node(NodeId("p2"), NodeKind::Primary);
  std::vector<std::string> chain = {"p1"};
  for (int i = 1; i <= secondaries; ++i) {
    std::string id = "s" + std::to_string(i);
    b.add_node(NodeId(id), NodeKind::Secondary);
    chain.push_back(id);
  }
  chain.push_back("p2");
  for (int i = 0; i + 1 < static_cast<int>(chain.size()); ++i) {
    b.add_edge(chain[i], chain[i + 1], i == open_position ? EdgeState::Open : EdgeState::Close);
  }
  return b.build();
}

inline Instance feeder_move_instance(int secondaries, int open_from, int open_to) {
  return make_instance(feeder_path(secondaries, open_from), feeder_path(secondaries, open_to));
}

// Tie relocation that deadlocks sequential planning: the new tie (a2,b2)
// cannot be built while a2 still has degree 3, and dropping the old tie
// (a2,b1) first strands the redundancy of the two stub feeders. A parallel
// step does both at once, so the instance separates the two modes.
inline Instance deadlock_instance() {
  auto build = [](bool moved) {
    GridBuilder b;
    b.add_node(NodeId("p1"), NodeKind::Primary);
    b.add_node(NodeId("p2"), NodeKind::Primary);
    for (const char* s : {"a1", "a2", "b1", "b2", "c1", "c2"}) {
      b.add_node(NodeId(s), NodeKind::Secondary);
    }
    b.add_edge("p1", "a1", EdgeState::Close);
    b.add_edge("a1", "a2", EdgeState::Close);
    b.add_edge("p1", "c1", EdgeState::Close);
    b.add_edge("c1", "c2", EdgeState::Close);
    b.add_edge("p1", "b1", EdgeState::Close);
    b.add_edge("b1", "b2", EdgeState::Close);
    b.add_edge("b2", "p2", EdgeState::Open);
    b.add_edge("a2", "c2", EdgeState::Open);
    b.add_edge(moved ? "b2" : "b1", "a2", EdgeState::Open);
    return b.build();
  };
  return make_instance(build(false), build(true));
}

// Deterministic rng for property tests (splitmix64).
struct TestRng {
  uint64_t state;

  explicit TestRng(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t below(uint64_t n) { return n == 0 ? 0 : next() % n; }
  bool chance(uint64_t num, uint64_t den) { return below(den) < num; }
};

// Arbitrary small labeled grid (not necessarily compliant): n nodes with at
// least one primary, each node pair an edge with probability ~1/2.
inline PowerGrid random_test_grid(TestRng& rng, int max_nodes = 8) {
  int n = 3 + static_cast<int>(rng.below(static_cast<uint64_t>(max_nodes - 2)));
  GridBuilder b;
  std::vector<NodeId> ids;
  int primaries = 1 + static_cast<int>(rng.below(2));
  for (int i = 0; i < n; ++i) {
    std::string name = (i < primaries ? "p" : "s") + std::to_string(i);
    ids.emplace_back(name);
    b.add_node(ids.back(), i < primaries ? NodeKind::Primary : NodeKind::Secondary);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.chance(1, 2)) {
        b.add_edge(Edge(ids[i], ids[j]),
                   rng.chance(1, 2) ? EdgeState::Close : EdgeState::Open);
      }
    }
  }
  return b.build();
}

}  // namespace fixtures

#endif  // GRIDPLAN_TESTS_FIXTURES_HPP_
