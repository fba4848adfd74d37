#ifndef GRIDPLAN_IO_HPP_
#define GRIDPLAN_IO_HPP_

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gridplan/compliance.hpp"
#include "gridplan/grid.hpp"

namespace gridplan {

/// An LPP instance: start and target grids over the same stations, with the
/// buildable (B) and removable (R) edge sets derived from their difference.
struct Instance {
  PowerGrid start;
  PowerGrid target;
  std::vector<Edge> buildable;  // E_T \ E, sorted
  std::vector<Edge> removable;  // E \ E_T, sorted

  bool in_buildable(const Edge& e) const {
    return std::binary_search(buildable.begin(), buildable.end(), e);
  }
  bool in_removable(const Edge& e) const {
    return std::binary_search(removable.begin(), removable.end(), e);
  }

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// (E_T \ E, E \ E_T) with canonical edges; node sets must agree.
inline std::pair<std::vector<Edge>, std::vector<Edge>> derive_diff(const PowerGrid& start,
                                                                   const PowerGrid& target) {
  if (!(start.node_table() == target.node_table() ||
        *start.node_table() == *target.node_table())) {
    throw Error(Errc::node_set_mismatch, "start and target declare different stations");
  }
  std::vector<Edge> start_edges, target_edges;
  start_edges.reserve(start.edge_count());
  target_edges.reserve(target.edge_count());
  for (const auto& [e, st] : start.edges()) start_edges.push_back(e);
  for (const auto& [e, st] : target.edges()) target_edges.push_back(e);
  std::vector<Edge> buildable, removable;
  std::set_difference(target_edges.begin(), target_edges.end(), start_edges.begin(),
                      start_edges.end(), std::back_inserter(buildable));
  std::set_difference(start_edges.begin(), start_edges.end(), target_edges.begin(),
                      target_edges.end(), std::back_inserter(removable));
  return {std::move(buildable), std::move(removable)};
}

inline std::string compliance_summary(const ComplianceReport& report) {
  std::string s;
  for (const auto& v : report.violations) {
    if (!s.empty()) s += "; ";
    s += std::string(violation_name(v.code)) + "(" + v.subject + ")";
  }
  return s.empty() ? "ok" : s;
}

/// Assembles and validates an instance. Unless `permissive`, both grids must
/// pass check_compliance.
inline Instance make_instance(PowerGrid start, PowerGrid target, bool permissive = false) {
  auto [buildable, removable] = derive_diff(start, target);
  if (!permissive) {
    auto rs = check_compliance(start);
    if (!rs.compliant()) {
      throw Error(Errc::compliance, "start grid is not compliant: " + compliance_summary(rs));
    }
    auto rt = check_compliance(target);
    if (!rt.compliant()) {
      throw Error(Errc::compliance, "target grid is not compliant: " + compliance_summary(rt));
    }
  }
  return Instance{std::move(start), std::move(target), std::move(buildable),
                  std::move(removable)};
}

namespace detail {

struct Term {
  std::string name;         // functor or identifier; empty for integers
  bool is_int = false;
  long long value = 0;
  std::vector<Term> args;
};

struct Fact {
  Term term;
  int line = 0;
};

class FactScanner {
 public:
  explicit FactScanner(const std::string& text) : text_(text) {}

  std::vector<Fact> scan() {
    std::vector<Fact> facts;
    for (;;) {
      skip_blank();
      if (pos_ >= text_.size()) break;
      int at = line_;
      Term t = term();
      skip_blank();
      if (pos_ >= text_.size() || text_[pos_] != '.') {
        throw Error(Errc::syntax, "expected '.' after fact", at);
      }
      ++pos_;
      facts.push_back({std::move(t), at});
    }
    return facts;
  }

 private:
  void skip_blank() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  Term term() {
    skip_blank();
    if (pos_ >= text_.size()) throw Error(Errc::syntax, "unexpected end of input", line_);
    char c = text_[pos_];
    Term t;
    if (c == '-' || (c >= '0' && c <= '9')) {
      size_t begin = pos_;
      if (c == '-') ++pos_;
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
      if (pos_ == begin + (c == '-' ? 1u : 0u)) {
        throw Error(Errc::syntax, "malformed integer", line_);
      }
      t.is_int = true;
      t.value = std::stoll(text_.substr(begin, pos_ - begin));
      return t;
    }
    if (!((c >= 'a' && c <= 'z') || c == '_')) {
      throw Error(Errc::syntax, std::string("unexpected character '") + c + "'", line_);
    }
    size_t begin = pos_;
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if ((d >= 'a' && d <= 'z') || (d >= '0' && d <= '9') || d == '_') {
        ++pos_;
      } else {
        break;
      }
    }
    t.name = text_.substr(begin, pos_ - begin);
    skip_blank();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      for (;;) {
        t.args.push_back(term());
        skip_blank();
        if (pos_ < text_.size() && text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        break;
      }
      skip_blank();
      if (pos_ >= text_.size() || text_[pos_] != ')') {
        throw Error(Errc::syntax, "expected ')'", line_);
      }
      ++pos_;
    }
    return t;
  }

  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;
};

inline const Term& ident_arg(const Fact& f, size_t i) {
  const Term& t = f.term.args[i];
  if (t.is_int || !t.args.empty()) {
    throw Error(Errc::syntax, "expected an identifier argument in " + f.term.name, f.line);
  }
  return t;
}

inline NodeId node_arg(const Fact& f, size_t i) {
  const Term& t = ident_arg(f, i);
  if (!NodeId::valid(t.name)) {
    throw Error(Errc::syntax, "bad node identifier '" + t.name + "'", f.line);
  }
  return NodeId(t.name);
}

inline EdgeState state_arg(const Fact& f, size_t i) {
  const Term& t = ident_arg(f, i);
  if (t.name == "open") return EdgeState::Open;
  if (t.name == "close") return EdgeState::Close;
  throw Error(Errc::syntax, "edge state must be open or close, got '" + t.name + "'", f.line);
}

/// Reads the (x, y) arguments of an edge fact, enforcing §-style canonical
/// orientation x < y.
inline Edge edge_args(const Fact& f, size_t i) {
  NodeId x = node_arg(f, i);
  NodeId y = node_arg(f, i + 1);
  if (!(x < y)) {
    throw Error(Errc::non_canonical_edge,
                "edge (" + x.str() + "," + y.str() + ") is not in canonical order", f.line);
  }
  return Edge(std::move(x), std::move(y));
}

struct ParsedFacts {
  std::vector<std::pair<NodeId, int>> nodes;                    // id, line
  std::vector<std::pair<NodeId, int>> primaries;                // id, line
  std::vector<std::tuple<Edge, EdgeState, int>> start_edges;    // edge, state, line
  std::vector<std::tuple<Edge, EdgeState, int>> target_edges;
  std::vector<std::pair<Edge, int>> buildable;
  std::vector<std::pair<Edge, int>> must_remove;
  bool has_target_facts = false;
};

inline ParsedFacts collect_facts(const std::string& text, bool instance_predicates) {
  ParsedFacts out;
  for (const Fact& f : FactScanner(text).scan()) {
    const std::string& name = f.term.name;
    size_t arity = f.term.args.size();
    if (name == "node" && arity == 1) {
      out.nodes.emplace_back(node_arg(f, 0), f.line);
    } else if (name == "node_attr" && arity == 2) {
      const Term& attr = ident_arg(f, 1);
      if (attr.name != "is_primary" && attr.name != "primary") {
        throw Error(Errc::syntax, "unknown node attribute '" + attr.name + "'", f.line);
      }
      out.primaries.emplace_back(node_arg(f, 0), f.line);
    } else if (name == "start" && arity == 3) {
      out.start_edges.emplace_back(edge_args(f, 0), state_arg(f, 2), f.line);
    } else if (instance_predicates && name == "target" && arity == 3) {
      out.has_target_facts = true;
      out.target_edges.emplace_back(edge_args(f, 0), state_arg(f, 2), f.line);
    } else if (instance_predicates && name == "buildable" && arity == 2) {
      out.buildable.emplace_back(edge_args(f, 0), f.line);
    } else if (instance_predicates && name == "must_remove" && arity == 2) {
      out.must_remove.emplace_back(edge_args(f, 0), f.line);
    } else {
      throw Error(Errc::syntax, "unexpected fact " + name + "/" + std::to_string(arity), f.line);
    }
  }
  return out;
}

inline PowerGrid grid_from_facts(const ParsedFacts& facts,
                                 const std::vector<std::tuple<Edge, EdgeState, int>>& edges) {
  std::vector<PowerGrid::NodeEntry> entries;
  entries.reserve(facts.nodes.size());
  for (const auto& [id, line] : facts.nodes) entries.emplace_back(id, NodeKind::Secondary);
  std::sort(entries.begin(), entries.end());
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
  auto find = [&entries](const NodeId& id) {
    auto it = std::lower_bound(entries.begin(), entries.end(), id,
                               [](const PowerGrid::NodeEntry& e, const NodeId& k) {
                                 return e.first < k;
                               });
    return it != entries.end() && it->first == id ? &*it : nullptr;
  };
  for (const auto& [id, line] : facts.primaries) {
    auto* entry = find(id);
    if (!entry) throw Error(Errc::unknown_node, "node_attr for undeclared '" + id.str() + "'", line);
    entry->second = NodeKind::Primary;
  }

  std::vector<PowerGrid::EdgeEntry> edge_entries;
  edge_entries.reserve(edges.size());
  for (const auto& [e, st, line] : edges) {
    if (!find(e.u()) || !find(e.v())) {
      throw Error(Errc::unknown_node,
                  "edge (" + e.u().str() + "," + e.v().str() + ") references an undeclared node",
                  line);
    }
    edge_entries.emplace_back(e, st);
  }
  std::sort(edge_entries.begin(), edge_entries.end());
  for (size_t i = 1; i < edge_entries.size(); ++i) {
    if (edge_entries[i].first == edge_entries[i - 1].first) {
      const Edge& e = edge_entries[i].first;
      throw Error(Errc::duplicate_edge,
                  "edge (" + e.u().str() + "," + e.v().str() + ") declared twice");
    }
  }
  bool any_primary = false;
  for (const auto& [id, kind] : entries) any_primary |= kind == NodeKind::Primary;
  if (!any_primary) throw Error(Errc::compliance, "grid declares no primary node");
  return PowerGrid::from_parts(std::make_shared<PowerGrid::NodeTable>(std::move(entries)),
                               std::move(edge_entries));
}

}  // namespace detail

/// Parses a grid-only fact file (node/1, node_attr/2, start/3).
inline PowerGrid parse_grid(const std::string& text) {
  auto facts = detail::collect_facts(text, /*instance_predicates=*/false);
  return detail::grid_from_facts(facts, facts.start_edges);
}

/// Parses a full instance file. Explicit buildable/2 and must_remove/2 facts,
/// when present, must match the derived diff exactly.
inline Instance parse_instance(const std::string& text, bool permissive = false) {
  auto facts = detail::collect_facts(text, /*instance_predicates=*/true);
  PowerGrid start = detail::grid_from_facts(facts, facts.start_edges);
  PowerGrid target_raw = detail::grid_from_facts(facts, facts.target_edges);
  // Share one node table between the two grids.
  PowerGrid target = PowerGrid::from_parts(
      start.node_table(), std::vector<PowerGrid::EdgeEntry>(target_raw.edges().begin(),
                                                            target_raw.edges().end()));
  for (const auto* declared : {&facts.buildable, &facts.must_remove}) {
    for (const auto& [e, line] : *declared) {
      if (!start.has_node(e.u()) || !start.has_node(e.v())) {
        throw Error(Errc::unknown_node,
                    "edge (" + e.u().str() + "," + e.v().str() +
                        ") references an undeclared node",
                    line);
      }
    }
  }
  auto [buildable, removable] = derive_diff(start, target);
  if (!facts.buildable.empty()) {
    std::vector<Edge> declared;
    for (const auto& [e, line] : facts.buildable) declared.push_back(e);
    std::sort(declared.begin(), declared.end());
    declared.erase(std::unique(declared.begin(), declared.end()), declared.end());
    if (declared != buildable) {
      throw Error(Errc::diff_mismatch, "buildable facts disagree with target \\ start");
    }
  }
  if (!facts.must_remove.empty()) {
    std::vector<Edge> declared;
    for (const auto& [e, line] : facts.must_remove) declared.push_back(e);
    std::sort(declared.begin(), declared.end());
    declared.erase(std::unique(declared.begin(), declared.end()), declared.end());
    if (declared != removable) {
      throw Error(Errc::diff_mismatch, "must_remove facts disagree with start \\ target");
    }
  }
  return make_instance(std::move(start), std::move(target), permissive);
}

namespace detail {

inline std::string edge_fact(const char* pred, const Edge& e, std::optional<EdgeState> st) {
  std::string s = std::string(pred) + "(" + e.u().str() + "," + e.v().str();
  if (st) s += std::string(",") + (*st == EdgeState::Open ? "open" : "close");
  return s + ").";
}

inline void serialize_node_block(const PowerGrid& g, std::string& out) {
  bool first = true;
  for (const auto& [id, kind] : g.nodes()) {
    if (!first) out += " ";
    out += "node(" + id.str() + ").";
    first = false;
  }
  out += "\n";
  first = true;
  for (const auto& [id, kind] : g.nodes()) {
    if (kind != NodeKind::Primary) continue;
    if (!first) out += " ";
    out += "node_attr(" + id.str() + ",is_primary).";
    first = false;
  }
  if (!first) out += "\n";
}

}  // namespace detail

/// Grid-only serialization: nodes, node attributes, start/3 facts.
inline std::string serialize_grid(const PowerGrid& g) {
  std::string out;
  detail::serialize_node_block(g, out);
  for (const auto& [e, st] : g.edges()) out += detail::edge_fact("start", e, st) + "\n";
  return out;
}

/// Deterministic instance serialization; the block order and per-line layout
/// are the wire format (nodes, attributes, start, target, buildable,
/// must_remove; every block sorted by the node order).
inline std::string serialize_instance(const Instance& inst) {
  std::string out;
  detail::serialize_node_block(inst.start, out);
  for (const auto& [e, st] : inst.start.edges()) out += detail::edge_fact("start", e, st) + "\n";
  for (const auto& [e, st] : inst.target.edges()) out += detail::edge_fact("target", e, st) + "\n";
  for (const Edge& e : inst.buildable) out += detail::edge_fact("buildable", e, std::nullopt) + "\n";
  for (const Edge& e : inst.removable) out += detail::edge_fact("must_remove", e, std::nullopt) + "\n";
  return out;
}

inline std::string serialize_action(const Action& a) { return detail::action_text(a); }

/// One `action(T,<term>).` fact per action, steps in order.
inline std::string serialize_plan(const Plan& plan) {
  std::string out;
  for (size_t t = 0; t < plan.steps.size(); ++t) {
    if (plan.steps[t].empty()) {
      throw Error(Errc::empty_step, "step " + std::to_string(t) + " is empty");
    }
    ActionSet sorted = plan.steps[t];
    std::sort(sorted.begin(), sorted.end());
    for (const Action& a : sorted) {
      out += "action(" + std::to_string(t) + "," + serialize_action(a) + ").\n";
    }
  }
  return out;
}

inline Plan parse_plan(const std::string& text) {
  std::vector<std::pair<long long, Action>> entries;
  for (const detail::Fact& f : detail::FactScanner(text).scan()) {
    if (f.term.name != "action" || f.term.args.size() != 2) {
      throw Error(Errc::syntax,
                  "expected action/2 facts, got " + f.term.name + "/" +
                      std::to_string(f.term.args.size()),
                  f.line);
    }
    const detail::Term& ts = f.term.args[0];
    if (!ts.is_int || ts.value < 0) {
      throw Error(Errc::syntax, "action time must be a nonnegative integer", f.line);
    }
    const detail::Term& body = f.term.args[1];
    detail::Fact body_fact{body, f.line};
    Action a;
    if (body.name == "add" && body.args.size() == 2) {
      a = Action::add(detail::edge_args(body_fact, 0));
    } else if (body.name == "remove" && body.args.size() == 2) {
      a = Action::remove(detail::edge_args(body_fact, 0));
    } else if (body.name == "switch" && body.args.size() == 3) {
      NodeId pivot = detail::node_arg(body_fact, 0);
      NodeId from = detail::node_arg(body_fact, 1);
      NodeId to = detail::node_arg(body_fact, 2);
      if (pivot == from || pivot == to || from == to) {
        throw Error(Errc::syntax, "switch arguments must be pairwise distinct", f.line);
      }
      a = Action::switch_at(std::move(pivot), std::move(from), std::move(to));
    } else {
      throw Error(Errc::syntax,
                  "unknown action term " + body.name + "/" + std::to_string(body.args.size()),
                  f.line);
    }
    entries.emplace_back(ts.value, a);
  }
  long long max_t = -1;
  for (const auto& [t, a] : entries) max_t = std::max(max_t, t);
  Plan plan;
  plan.steps.resize(static_cast<size_t>(max_t + 1));
  for (auto& [t, a] : entries) plan.steps[static_cast<size_t>(t)].push_back(a);
  for (size_t t = 0; t < plan.steps.size(); ++t) {
    auto& step = plan.steps[t];
    if (step.empty()) {
      throw Error(Errc::non_contiguous_time,
                  "no action at time " + std::to_string(t) + " but later times exist");
    }
    std::sort(step.begin(), step.end());
    step.erase(std::unique(step.begin(), step.end()), step.end());
  }
  return plan;
}

/// DOT rendering: primaries as boxes, secondaries as circles, closed edges
/// solid, open edges dashed.
inline std::string export_dot(const PowerGrid& g) {
  std::string out = "graph grid {\n";
  for (const auto& [id, kind] : g.nodes()) {
    out += "  \"" + id.str() + "\" [shape=" +
           (kind == NodeKind::Primary ? "box" : "circle") + "];\n";
  }
  for (const auto& [e, st] : g.edges()) {
    out += "  \"" + e.u().str() + "\" -- \"" + e.v().str() + "\" [style=" +
           (st == EdgeState::Close ? "solid" : "dashed") + "];\n";
  }
  out += "}\n";
  return out;
}

/// Generator sidecar metadata, carried as a leading comment line.
struct InstanceMeta {
  int g = 0;
  double alpha = 0.0;
  uint64_t seed = 0;
};

inline std::string meta_comment(const InstanceMeta& meta) {
  std::ostringstream os;
  os << "% meta g=" << meta.g << " alpha=" << meta.alpha << " seed=" << meta.seed << "\n";
  return os.str();
}

inline std::optional<InstanceMeta> parse_instance_meta(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok != "%") continue;
    ls >> tok;
    if (tok != "meta") continue;
    InstanceMeta meta;
    bool have_g = false;
    while (ls >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      std::string key = tok.substr(0, eq);
      std::string val = tok.substr(eq + 1);
      if (key == "g") {
        meta.g = std::stoi(val);
        have_g = true;
      } else if (key == "alpha") {
        meta.alpha = std::stod(val);
      } else if (key == "seed") {
        meta.seed = std::stoull(val);
      }
    }
    if (have_g) return meta;
  }
  return std::nullopt;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::syntax, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::syntax, "cannot write '" + path + "'");
  out << content;
}

}  // namespace gridplan

#endif  // GRIDPLAN_IO_HPP_
