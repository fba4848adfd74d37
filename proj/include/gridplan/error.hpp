#ifndef GRIDPLAN_ERROR_HPP_
#define GRIDPLAN_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace gridplan {

enum class Errc {
  invalid_identifier,
  self_loop,
  unknown_node,
  not_applicable,
  interference,
  not_radial,
  syntax,
  non_canonical_edge,
  duplicate_edge,
  diff_mismatch,
  node_set_mismatch,
  compliance,
  empty_step,
  non_contiguous_time,
  invalid_window,
  generation_failed,
  dead_end,
  cap_exceeded,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_identifier: return "InvalidIdentifier";
    case Errc::self_loop: return "SelfLoop";
    case Errc::unknown_node: return "UnknownNode";
    case Errc::not_applicable: return "NotApplicable";
    case Errc::interference: return "Interference";
    case Errc::not_radial: return "NotRadial";
    case Errc::syntax: return "SyntaxError";
    case Errc::non_canonical_edge: return "NonCanonicalEdge";
    case Errc::duplicate_edge: return "DuplicateEdge";
    case Errc::diff_mismatch: return "DiffMismatch";
    case Errc::node_set_mismatch: return "NodeSetMismatch";
    case Errc::compliance: return "ComplianceError";
    case Errc::empty_step: return "EmptyStep";
    case Errc::non_contiguous_time: return "NonContiguousTime";
    case Errc::invalid_window: return "InvalidWindow";
    case Errc::generation_failed: return "GenerationFailed";
    case Errc::dead_end: return "DeadEnd";
    case Errc::cap_exceeded: return "CapExceeded";
  }
  return "Unknown";
}

/// Library-wide error. `line` is set by the parser (1-based), -1 otherwise.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message, int line = -1)
      : std::runtime_error(std::string(errc_name(code)) +
                           (line >= 0 ? " at line " + std::to_string(line) : "") + ": " +
                           message),
        code_(code),
        line_(line) {}

  Errc code() const { return code_; }
  int line() const { return line_; }

 private:
  Errc code_;
  int line_;
};

}  // namespace gridplan

#endif  // GRIDPLAN_ERROR_HPP_
