#ifndef GRIDPLAN_COMPLIANCE_HPP_
#define GRIDPLAN_COMPLIANCE_HPP_

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gridplan/grid.hpp"

namespace gridplan {

enum class ViolationCode {
  PrimaryLoop,
  UnsuppliedSecondary,
  ClosedCycle,
  NotRedundant,
  DegreeLow,
  DegreeHigh,
};

inline const char* violation_name(ViolationCode c) {
  switch (c) {
    case ViolationCode::PrimaryLoop: return "PRIMARY_LOOP";
    case ViolationCode::UnsuppliedSecondary: return "UNSUPPLIED_SECONDARY";
    case ViolationCode::ClosedCycle: return "CLOSED_CYCLE";
    case ViolationCode::NotRedundant: return "NOT_REDUNDANT";
    case ViolationCode::DegreeLow: return "DEGREE_LOW";
    case ViolationCode::DegreeHigh: return "DEGREE_HIGH";
  }
  return "?";
}

struct Violation {
  ViolationCode code;
  std::string subject;
  std::string message;
};

struct ComplianceReport {
  bool radial = false;
  bool reconfigurable = false;
  bool degree_compliant = false;
  // Redundancy is only evaluated on radial grids; when skipped, reconfigurable
  // is reported false with the radiality violations as the reason.
  bool redundancy_evaluated = false;
  std::vector<Violation> violations;

  bool compliant() const { return radial && reconfigurable && degree_compliant; }
};

namespace detail {

/// Dense node indexing over the grid's sorted node table.
struct NodeIndexer {
  explicit NodeIndexer(const PowerGrid& g) : table(g.nodes()) {}

  int at(const NodeId& id) const {
    auto it = std::lower_bound(table.begin(), table.end(), id,
                               [](const PowerGrid::NodeEntry& e, const NodeId& k) {
                                 return e.first < k;
                               });
    return static_cast<int>(it - table.begin());
  }

  std::span<const PowerGrid::NodeEntry> table;
};

/// Streams (u index, v index, state) per edge without allocating. Sorted
/// edges have nondecreasing u, so u is resolved by a monotone cursor and only
/// v needs a binary search.
template <typename Fn>
inline void for_each_edge_indexed(const PowerGrid& g, Fn&& fn) {
  const auto nodes = g.nodes();
  NodeIndexer idx(g);
  int cursor = 0;
  for (const auto& [e, st] : g.edges()) {
    while (nodes[cursor].first < e.u()) ++cursor;
    fn(cursor, idx.at(e.v()), st);
  }
}

struct UnionFind {
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  // Returns false if x and y were already united (an edge would close a cycle).
  bool unite(int x, int y) {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    parent[y] = x;
    return true;
  }

  std::vector<int> parent;
};

/// One pass over the closed network: cycle edges, component roots, and per
/// component primary membership.
struct RadialScan {
  std::vector<Edge> cycle_edges;           // closed edges that closed a cycle
  std::vector<int> root;                   // closed-component root per node
  std::vector<int> primaries_in_component; // indexed by root
  bool acyclic() const { return cycle_edges.empty(); }
};

inline RadialScan radial_scan(const PowerGrid& g) {
  const int n = static_cast<int>(g.node_count());
  NodeIndexer idx(g);
  UnionFind uf(n);
  RadialScan scan;
  for (const auto& [e, st] : g.edges()) {
    if (st != EdgeState::Close) continue;
    if (!uf.unite(idx.at(e.u()), idx.at(e.v()))) scan.cycle_edges.push_back(e);
  }
  scan.root.resize(n);
  scan.primaries_in_component.assign(n, 0);
  for (int i = 0; i < n; ++i) scan.root[i] = uf.find(i);
  for (int i = 0; i < n; ++i) {
    if (g.nodes()[i].second == NodeKind::Primary) ++scan.primaries_in_component[scan.root[i]];
  }
  return scan;
}

inline bool radial_from_scan(const PowerGrid& g, const RadialScan& scan) {
  if (!scan.acyclic()) return false;
  const auto nodes = g.nodes();
  for (size_t i = 0; i < nodes.size(); ++i) {
    int p = scan.primaries_in_component[scan.root[i]];
    if (nodes[i].second == NodeKind::Primary) {
      if (p > 1) return false;
    } else if (p != 1) {
      return false;
    }
  }
  return true;
}

inline std::vector<std::vector<int>> open_adjacency(const PowerGrid& g, const NodeIndexer& idx) {
  std::vector<std::vector<int>> adj(g.node_count());
  for (const auto& [e, st] : g.edges()) {
    int u = idx.at(e.u());
    int v = idx.at(e.v());
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  return adj;
}

/// Open-network reachability from `s` through secondary internals only;
/// primaries are collectable endpoints, never expanded.
inline void reachable_primaries(const PowerGrid& g, const std::vector<std::vector<int>>& adj,
                                int s, std::vector<char>& visited, std::vector<int>& out) {
  visited.assign(g.node_count(), 0);
  out.clear();
  std::vector<int> stack = {s};
  visited[s] = 1;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    for (int o : adj[x]) {
      if (g.nodes()[o].second == NodeKind::Primary) {
        if (!visited[o]) {
          visited[o] = 1;
          out.push_back(o);
        }
      } else if (!visited[o]) {
        visited[o] = 1;
        stack.push_back(o);
      }
    }
  }
}

}  // namespace detail

/// Radiality by traversal: the closed network is acyclic, no two primaries
/// share a closed component, and every secondary's closed component holds
/// exactly one primary. Union-find over the closed edges.
inline bool is_radial(const PowerGrid& g) {
  const auto nodes = g.nodes();
  const int n = static_cast<int>(nodes.size());
  std::vector<int> buf(2 * n, 0);  // [0,n): union-find parent, [n,2n): primaries per root
  int* parent = buf.data();
  int* prim = buf.data() + n;
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [parent](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  bool acyclic = true;
  detail::for_each_edge_indexed(g, [&](int u, int v, EdgeState st) {
    if (st != EdgeState::Close) return;
    int ru = find(u);
    int rv = find(v);
    if (ru == rv) {
      acyclic = false;
    } else {
      parent[rv] = ru;
    }
  });
  if (!acyclic) return false;
  for (int i = 0; i < n; ++i) {
    if (nodes[i].second == NodeKind::Primary) ++prim[find(i)];
  }
  for (int i = 0; i < n; ++i) {
    int p = prim[find(i)];
    if (nodes[i].second == NodeKind::Primary ? p > 1 : p != 1) return false;
  }
  return true;
}

/// Radiality by edge count: no two primaries connected in the closed network,
/// every secondary reaches a primary there, and exactly |V| - |P| closed
/// edges. Kept independent of is_radial (BFS over adjacency, not union-find)
/// so the two formulations genuinely cross-check each other.
inline bool is_radial_by_count(const PowerGrid& g) {
  const auto nodes = g.nodes();
  const int n = static_cast<int>(nodes.size());
  const int m = static_cast<int>(g.edge_count());
  // One buffer: degree/offset scratch, CSR neighbours, owner marks, BFS stack.
  std::vector<int> buf(static_cast<size_t>(3 * n + 1 + 2 * m), 0);
  int* offset = buf.data();            // n + 1
  int* neighbours = offset + n + 1;    // 2m
  int* owner = neighbours + 2 * m;     // n
  int* stack = owner + n;              // n
  int closed = 0;
  detail::for_each_edge_indexed(g, [&](int u, int v, EdgeState st) {
    if (st != EdgeState::Close) return;
    ++closed;
    ++offset[u + 1];
    ++offset[v + 1];
  });
  // offset[i+1] currently holds deg(i); prefix sums give CSR offsets.
  for (int i = 0; i < n; ++i) offset[i + 1] += offset[i];
  {
    std::vector<int> cursor(offset, offset + n);
    detail::for_each_edge_indexed(g, [&](int u, int v, EdgeState st) {
      if (st != EdgeState::Close) return;
      neighbours[cursor[u]++] = v;
      neighbours[cursor[v]++] = u;
    });
  }
  for (int i = 0; i < n; ++i) owner[i] = -1;
  int primaries = 0;
  for (int p = 0; p < n; ++p) {
    if (nodes[p].second != NodeKind::Primary) continue;
    ++primaries;
    if (owner[p] != -1) return false;  // an earlier primary already reached p
    owner[p] = p;
    int top = 0;
    stack[top++] = p;
    while (top > 0) {
      int x = stack[--top];
      for (int k = offset[x]; k < offset[x + 1]; ++k) {
        int o = neighbours[k];
        if (owner[o] == -1) {
          owner[o] = p;
          stack[top++] = o;
        } else if (owner[o] != p) {
          return false;  // two primaries meet in the closed network
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (nodes[i].second == NodeKind::Secondary && owner[i] == -1) return false;
  }
  return closed == n - primaries;
}

/// The unique primary in s's closed component.
inline NodeId assigned_primary(const PowerGrid& g, const NodeId& s) {
  if (!g.has_node(s)) throw Error(Errc::unknown_node, "no node '" + s.str() + "'");
  auto scan = detail::radial_scan(g);
  if (!detail::radial_from_scan(g, scan)) {
    throw Error(Errc::not_radial, "assigned_primary requires a radial grid");
  }
  detail::NodeIndexer idx(g);
  int root = scan.root[idx.at(s)];
  for (size_t i = 0; i < g.node_count(); ++i) {
    if (g.nodes()[i].second == NodeKind::Primary && scan.root[i] == root) {
      return g.nodes()[i].first;
    }
  }
  throw Error(Errc::not_radial, "'" + s.str() + "' has no assigned primary");
}

/// True iff s has an open-network path, through secondary internals only, to
/// some primary other than its assigned one.
inline bool is_redundantly_connected(const PowerGrid& g, const NodeId& s) {
  if (!g.has_node(s)) throw Error(Errc::unknown_node, "no node '" + s.str() + "'");
  if (g.node_kind(s) != NodeKind::Secondary) {
    throw Error(Errc::not_applicable, "'" + s.str() + "' is not a secondary node");
  }
  auto scan = detail::radial_scan(g);
  if (!detail::radial_from_scan(g, scan)) {
    throw Error(Errc::not_radial, "is_redundantly_connected requires a radial grid");
  }
  detail::NodeIndexer idx(g);
  const int si = idx.at(s);
  const int home = scan.root[si];
  auto adj = detail::open_adjacency(g, idx);
  std::vector<char> visited;
  std::vector<int> prim;
  detail::reachable_primaries(g, adj, si, visited, prim);
  for (int p : prim) {
    if (scan.root[p] != home) return true;  // a primary outside s's closed tree
  }
  return false;
}

/// All secondaries redundantly connected (vacuously true without secondaries).
inline bool is_reconfigurable(const PowerGrid& g) {
  auto scan = detail::radial_scan(g);
  if (!detail::radial_from_scan(g, scan)) {
    throw Error(Errc::not_radial, "is_reconfigurable requires a radial grid");
  }
  detail::NodeIndexer idx(g);
  auto adj = detail::open_adjacency(g, idx);
  std::vector<char> visited;
  std::vector<int> prim;
  for (int i = 0; i < static_cast<int>(g.node_count()); ++i) {
    if (g.nodes()[i].second != NodeKind::Secondary) continue;
    detail::reachable_primaries(g, adj, i, visited, prim);
    bool ok = false;
    for (int p : prim) ok |= scan.root[p] != scan.root[i];
    if (!ok) return false;
  }
  return true;
}

/// Every secondary has total degree (open and close edges) in [2,3].
inline bool is_degree_compliant(const PowerGrid& g) {
  detail::NodeIndexer idx(g);
  std::vector<int> deg(g.node_count(), 0);
  for (const auto& [e, st] : g.edges()) {
    ++deg[idx.at(e.u())];
    ++deg[idx.at(e.v())];
  }
  for (size_t i = 0; i < g.node_count(); ++i) {
    if (g.nodes()[i].second != NodeKind::Secondary) continue;
    if (deg[i] < 2 || deg[i] > 3) return false;
  }
  return true;
}

/// Allocation-light composite used by search loops; agrees with
/// check_compliance(g).compliant() by construction and by test.
inline bool is_compliant(const PowerGrid& g) {
  auto scan = detail::radial_scan(g);
  if (!detail::radial_from_scan(g, scan)) return false;
  detail::NodeIndexer idx(g);
  auto adj = detail::open_adjacency(g, idx);
  std::vector<int> deg(g.node_count(), 0);
  for (size_t i = 0; i < g.node_count(); ++i) deg[i] = static_cast<int>(adj[i].size());
  std::vector<char> visited;
  std::vector<int> prim;
  for (size_t i = 0; i < g.node_count(); ++i) {
    if (g.nodes()[i].second != NodeKind::Secondary) continue;
    if (deg[i] < 2 || deg[i] > 3) return false;
    detail::reachable_primaries(g, adj, static_cast<int>(i), visited, prim);
    bool ok = false;
    for (int p : prim) ok |= scan.root[p] != scan.root[i];
    if (!ok) return false;
  }
  return true;
}

/// Itemized verdicts for all three properties at once.
inline ComplianceReport check_compliance(const PowerGrid& g) {
  ComplianceReport report;
  detail::NodeIndexer idx(g);
  auto scan = detail::radial_scan(g);

  for (const Edge& e : scan.cycle_edges) {
    report.violations.push_back({ViolationCode::ClosedCycle, e.u().str() + "," + e.v().str(),
                                 "closed edge closes a cycle"});
  }
  // Components with more than one primary, and secondaries with none.
  std::vector<std::vector<int>> comp_primaries(g.node_count());
  for (size_t i = 0; i < g.node_count(); ++i) {
    if (g.nodes()[i].second == NodeKind::Primary) {
      comp_primaries[scan.root[i]].push_back(static_cast<int>(i));
    }
  }
  for (const auto& ps : comp_primaries) {
    if (ps.size() < 2) continue;
    std::string subject;
    for (int p : ps) {
      if (!subject.empty()) subject += ",";
      subject += g.nodes()[p].first.str();
    }
    report.violations.push_back({ViolationCode::PrimaryLoop, subject,
                                 "primaries share a closed component"});
  }
  for (size_t i = 0; i < g.node_count(); ++i) {
    if (g.nodes()[i].second != NodeKind::Secondary) continue;
    if (scan.primaries_in_component[scan.root[i]] == 0) {
      report.violations.push_back({ViolationCode::UnsuppliedSecondary, g.nodes()[i].first.str(),
                                   "no primary in its closed component"});
    }
  }
  report.radial = detail::radial_from_scan(g, scan);

  if (report.radial) {
    report.redundancy_evaluated = true;
    report.reconfigurable = true;
    auto adj = detail::open_adjacency(g, idx);
    std::vector<char> visited;
    std::vector<int> prim;
    for (size_t i = 0; i < g.node_count(); ++i) {
      if (g.nodes()[i].second != NodeKind::Secondary) continue;
      detail::reachable_primaries(g, adj, static_cast<int>(i), visited, prim);
      bool ok = false;
      for (int p : prim) ok |= scan.root[p] != scan.root[i];
      if (!ok) {
        report.reconfigurable = false;
        report.violations.push_back({ViolationCode::NotRedundant, g.nodes()[i].first.str(),
                                     "no secondary-internal path to a second primary"});
      }
    }
  }

  report.degree_compliant = true;
  std::vector<int> deg(g.node_count(), 0);
  for (const auto& [e, st] : g.edges()) {
    ++deg[idx.at(e.u())];
    ++deg[idx.at(e.v())];
  }
  for (size_t i = 0; i < g.node_count(); ++i) {
    if (g.nodes()[i].second != NodeKind::Secondary) continue;
    if (deg[i] < 2) {
      report.degree_compliant = false;
      report.violations.push_back({ViolationCode::DegreeLow, g.nodes()[i].first.str(),
                                   "degree " + std::to_string(deg[i]) + " < 2"});
    } else if (deg[i] > 3) {
      report.degree_compliant = false;
      report.violations.push_back({ViolationCode::DegreeHigh, g.nodes()[i].first.str(),
                                   "degree " + std::to_string(deg[i]) + " > 3"});
    }
  }
  return report;
}

}  // namespace gridplan

#endif  // GRIDPLAN_COMPLIANCE_HPP_
