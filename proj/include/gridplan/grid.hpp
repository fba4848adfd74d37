#ifndef GRIDPLAN_GRID_HPP_
#define GRIDPLAN_GRID_HPP_

#include <algorithm>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gridplan/error.hpp"

namespace gridplan {

/// Station identifier: nonempty, [a-z0-9_], first char a letter.
/// The strict total order is byte-lexicographic on the identifier.
class NodeId {
 public:
  NodeId() = default;
  explicit NodeId(std::string name) : name_(std::move(name)) {
    if (!valid(name_)) {
      throw Error(Errc::invalid_identifier, "bad node identifier '" + name_ + "'");
    }
  }

  static bool valid(const std::string& s) {
    if (s.empty() || s[0] < 'a' || s[0] > 'z') return false;
    for (char c : s) {
      if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_')) return false;
    }
    return true;
  }

  const std::string& str() const { return name_; }

  friend auto operator<=>(const NodeId&, const NodeId&) = default;

 private:
  std::string name_;
};

enum class NodeKind { Primary, Secondary };
enum class EdgeState { Open, Close };

inline EdgeState opposite(EdgeState s) {
  return s == EdgeState::Open ? EdgeState::Close : EdgeState::Open;
}

/// Unordered node pair stored in canonical orientation u < v. Self-loops rejected.
class Edge {
 public:
  Edge() = default;
  Edge(NodeId a, NodeId b) {
    if (a == b) throw Error(Errc::self_loop, "self-loop on '" + a.str() + "'");
    if (b < a) std::swap(a, b);
    u_ = std::move(a);
    v_ = std::move(b);
  }

  const NodeId& u() const { return u_; }
  const NodeId& v() const { return v_; }
  bool touches(const NodeId& x) const { return u_ == x || v_ == x; }
  const NodeId& other(const NodeId& x) const { return u_ == x ? v_ : u_; }

  friend auto operator<=>(const Edge&, const Edge&) = default;

 private:
  NodeId u_, v_;
};

enum class ActionKind { Add, Remove, Switch };

/// One grid edit. Add/Remove carry a canonical edge; Switch carries a secondary
/// pivot x plus the two neighbours: (x,from) goes open, (x,to) goes close.
/// The strict total order (kind, then fields) is the canonical enumeration order.
struct Action {
  ActionKind kind = ActionKind::Add;
  NodeId x, y, z;  // Add/Remove: edge (x,y), z empty. Switch: pivot x, from y, to z.

  static Action add(const Edge& e) { return {ActionKind::Add, e.u(), e.v(), NodeId()}; }
  static Action remove(const Edge& e) { return {ActionKind::Remove, e.u(), e.v(), NodeId()}; }
  static Action switch_at(NodeId pivot, NodeId from, NodeId to) {
    if (pivot == from || pivot == to || from == to) {
      throw Error(Errc::invalid_identifier, "switch endpoints must be pairwise distinct");
    }
    return {ActionKind::Switch, std::move(pivot), std::move(from), std::move(to)};
  }

  Edge edge() const { return Edge(x, y); }                 // Add/Remove
  Edge opened_edge() const { return Edge(x, y); }          // Switch
  Edge closed_edge() const { return Edge(x, z); }          // Switch

  friend auto operator<=>(const Action&, const Action&) = default;
};

/// Compatible set of concurrent actions, kept sorted in canonical order.
using ActionSet = std::vector<Action>;

/// Timed sequence of action sets; step t holds the actions of A_t.
struct Plan {
  std::vector<ActionSet> steps;

  int length() const { return static_cast<int>(steps.size()); }
  friend bool operator==(const Plan&, const Plan&) = default;
};

inline std::vector<Edge> affected_edges(const Action& a) {
  if (a.kind == ActionKind::Switch) return {a.opened_edge(), a.closed_edge()};
  return {a.edge()};
}

/// True iff the affected edge sets of a1 and a2 are disjoint.
inline bool compatible(const Action& a1, const Action& a2) {
  Edge e1[2], e2[2];
  int n1 = 1, n2 = 1;
  if (a1.kind == ActionKind::Switch) {
    e1[0] = a1.opened_edge();
    e1[1] = a1.closed_edge();
    n1 = 2;
  } else {
    e1[0] = a1.edge();
  }
  if (a2.kind == ActionKind::Switch) {
    e2[0] = a2.opened_edge();
    e2[1] = a2.closed_edge();
    n2 = 2;
  } else {
    e2[0] = a2.edge();
  }
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      if (e1[i] == e2[j]) return false;
    }
  }
  return true;
}

inline bool compatible_set(std::span<const Action> actions) {
  for (size_t i = 0; i < actions.size(); ++i) {
    for (size_t j = i + 1; j < actions.size(); ++j) {
      if (!compatible(actions[i], actions[j])) return false;
    }
  }
  return true;
}

/// Labeled undirected power grid. Immutable value: transitions return fresh
/// grids; the node table is shared between successors, so copies are cheap.
class PowerGrid {
 public:
  using NodeEntry = std::pair<NodeId, NodeKind>;
  using EdgeEntry = std::pair<Edge, EdgeState>;
  using NodeTable = std::vector<NodeEntry>;

  PowerGrid() : nodes_(empty_table()) {}

  /// Builds from pre-validated parts: `nodes` sorted by id with at least one
  /// primary, `edges` sorted by edge with endpoints in `nodes`, no duplicates.
  static PowerGrid from_parts(std::shared_ptr<const NodeTable> nodes,
                              std::vector<EdgeEntry> edges) {
    PowerGrid g;
    g.nodes_ = std::move(nodes);
    g.edges_ = std::move(edges);
    return g;
  }

  std::span<const NodeEntry> nodes() const { return *nodes_; }
  std::span<const EdgeEntry> edges() const { return edges_; }
  const std::shared_ptr<const NodeTable>& node_table() const { return nodes_; }

  size_t node_count() const { return nodes_->size(); }
  size_t edge_count() const { return edges_.size(); }

  size_t primary_count() const {
    size_t n = 0;
    for (const auto& [id, kind] : *nodes_) n += kind == NodeKind::Primary;
    return n;
  }

  bool has_node(const NodeId& id) const { return node_kind(id).has_value(); }

  std::optional<NodeKind> node_kind(const NodeId& id) const {
    auto it = std::lower_bound(nodes_->begin(), nodes_->end(), id,
                               [](const NodeEntry& e, const NodeId& k) { return e.first < k; });
    if (it == nodes_->end() || it->first != id) return std::nullopt;
    return it->second;
  }

  bool has_edge(const Edge& e) const { return edge_state(e).has_value(); }

  std::optional<EdgeState> edge_state(const Edge& e) const {
    auto it = find_edge(e);
    if (it == edges_.end() || it->first != e) return std::nullopt;
    return it->second;
  }

  /// Number of incident edges of any state.
  int degree(const NodeId& x) const {
    if (!has_node(x)) throw Error(Errc::unknown_node, "no node '" + x.str() + "'");
    int d = 0;
    for (const auto& [e, st] : edges_) d += e.touches(x);
    return d;
  }

  /// Canonical hash over the sorted (edge, state) pairs; keys transposition
  /// tables in the planner. Equality stays structural.
  uint64_t content_hash() const {
    uint64_t h = 1469598103934665603ULL;  // FNV-1a
    auto mix = [&h](const std::string& s) {
      for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
      }
      h ^= 0xff;
      h *= 1099511628211ULL;
    };
    for (const auto& [e, st] : edges_) {
      mix(e.u().str());
      mix(e.v().str());
      h ^= st == EdgeState::Close ? 2u : 1u;
      h *= 1099511628211ULL;
    }
    return h;
  }

  friend bool operator==(const PowerGrid& a, const PowerGrid& b) {
    if (a.edges_ != b.edges_) return false;
    return a.nodes_ == b.nodes_ || *a.nodes_ == *b.nodes_;
  }

  PowerGrid with_edges(std::vector<EdgeEntry> edges) const {
    return from_parts(nodes_, std::move(edges));
  }

 private:
  static std::shared_ptr<const NodeTable> empty_table() {
    static const auto empty = std::make_shared<const NodeTable>();
    return empty;
  }

  std::vector<EdgeEntry>::const_iterator find_edge(const Edge& e) const {
    return std::lower_bound(edges_.begin(), edges_.end(), e,
                            [](const EdgeEntry& ee, const Edge& k) { return ee.first < k; });
  }

  std::shared_ptr<const NodeTable> nodes_;
  std::vector<EdgeEntry> edges_;
};

/// Incremental construction with invariant checks at build():
/// endpoints exist, simple graph, at least one primary.
class GridBuilder {
 public:
  GridBuilder& add_node(NodeId id, NodeKind kind) {
    nodes_.emplace_back(std::move(id), kind);
    return *this;
  }

  GridBuilder& add_edge(Edge e, EdgeState state) {
    edges_.emplace_back(std::move(e), state);
    return *this;
  }

  GridBuilder& add_edge(const std::string& a, const std::string& b, EdgeState state) {
    return add_edge(Edge(NodeId(a), NodeId(b)), state);
  }

  PowerGrid build() {
    std::sort(nodes_.begin(), nodes_.end());
    nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
    for (size_t i = 1; i < nodes_.size(); ++i) {
      if (nodes_[i].first == nodes_[i - 1].first) {
        throw Error(Errc::invalid_identifier,
                    "node '" + nodes_[i].first.str() + "' declared with two kinds");
      }
    }
    bool any_primary = false;
    for (const auto& [id, kind] : nodes_) any_primary |= kind == NodeKind::Primary;
    if (!any_primary) throw Error(Errc::compliance, "grid has no primary node");

    std::sort(edges_.begin(), edges_.end());
    auto table = std::make_shared<PowerGrid::NodeTable>(nodes_);
    auto known = [&table](const NodeId& id) {
      auto it = std::lower_bound(table->begin(), table->end(), id,
                                 [](const PowerGrid::NodeEntry& e, const NodeId& k) {
                                   return e.first < k;
                                 });
      return it != table->end() && it->first == id;
    };
    for (size_t i = 0; i < edges_.size(); ++i) {
      const Edge& e = edges_[i].first;
      if (!known(e.u()) || !known(e.v())) {
        throw Error(Errc::unknown_node,
                    "edge (" + e.u().str() + "," + e.v().str() + ") has an undeclared endpoint");
      }
      if (i > 0 && edges_[i].first == edges_[i - 1].first) {
        throw Error(Errc::duplicate_edge,
                    "edge (" + e.u().str() + "," + e.v().str() + ") declared twice");
      }
    }
    return PowerGrid::from_parts(std::move(table), std::move(edges_));
  }

 private:
  std::vector<PowerGrid::NodeEntry> nodes_;
  std::vector<PowerGrid::EdgeEntry> edges_;
};

/// True iff `a` can fire on `g`: add wants the edge absent, remove wants it
/// present and open, switch wants a secondary pivot with (x,y) close and
/// (x,z) open.
inline bool applicable(const PowerGrid& g, const Action& a) {
  switch (a.kind) {
    case ActionKind::Add:
      return g.has_node(a.x) && g.has_node(a.y) && !g.has_edge(a.edge());
    case ActionKind::Remove:
      return g.edge_state(a.edge()) == EdgeState::Open;
    case ActionKind::Switch:
      return g.node_kind(a.x) == NodeKind::Secondary &&
             g.edge_state(Edge(a.x, a.y)) == EdgeState::Close &&
             g.edge_state(Edge(a.x, a.z)) == EdgeState::Open;
  }
  return false;
}

namespace detail {

inline std::string action_text(const Action& a);

inline void apply_unchecked(std::vector<PowerGrid::EdgeEntry>& edges, const Action& a) {
  auto locate = [&edges](const Edge& e) {
    return std::lower_bound(edges.begin(), edges.end(), e,
                            [](const PowerGrid::EdgeEntry& ee, const Edge& k) {
                              return ee.first < k;
                            });
  };
  switch (a.kind) {
    case ActionKind::Add: {
      Edge e = a.edge();
      edges.insert(locate(e), {e, EdgeState::Open});
      break;
    }
    case ActionKind::Remove:
      edges.erase(locate(a.edge()));
      break;
    case ActionKind::Switch:
      locate(a.opened_edge())->second = EdgeState::Open;
      locate(a.closed_edge())->second = EdgeState::Close;
      break;
  }
}

}  // namespace detail

/// Applies one action; the input grid is untouched, a new value is returned.
inline PowerGrid apply_action(const PowerGrid& g, const Action& a) {
  if (!applicable(g, a)) {
    throw Error(Errc::not_applicable, detail::action_text(a) + " is not applicable");
  }
  std::vector<PowerGrid::EdgeEntry> edges(g.edges().begin(), g.edges().end());
  detail::apply_unchecked(edges, a);
  return g.with_edges(std::move(edges));
}

/// Applies a non-interfering set; equals folding apply_action in any order.
inline PowerGrid apply_action_set(const PowerGrid& g, std::span<const Action> actions) {
  for (size_t i = 0; i < actions.size(); ++i) {
    for (size_t j = i + 1; j < actions.size(); ++j) {
      if (!compatible(actions[i], actions[j])) {
        throw Error(Errc::interference, detail::action_text(actions[i]) + " interferes with " +
                                            detail::action_text(actions[j]));
      }
    }
    if (!applicable(g, actions[i])) {
      throw Error(Errc::not_applicable, detail::action_text(actions[i]) + " is not applicable");
    }
  }
  std::vector<PowerGrid::EdgeEntry> edges(g.edges().begin(), g.edges().end());
  for (const Action& a : actions) detail::apply_unchecked(edges, a);
  return g.with_edges(std::move(edges));
}

inline int degree(const PowerGrid& g, const NodeId& x) { return g.degree(x); }

namespace detail {

inline std::string action_text(const Action& a) {
  switch (a.kind) {
    case ActionKind::Add:
      return "add(" + a.x.str() + "," + a.y.str() + ")";
    case ActionKind::Remove:
      return "remove(" + a.x.str() + "," + a.y.str() + ")";
    case ActionKind::Switch:
      return "switch(" + a.x.str() + "," + a.y.str() + "," + a.z.str() + ")";
  }
  return "?";
}

}  // namespace detail

}  // namespace gridplan

#endif  // GRIDPLAN_GRID_HPP_
