// Per-syscall disposition policy. Text format, one rule per line:
//
//   priority  syscall|*  action[:errno]
//
// Lowest priority number wins; `trace` rules log and fall through to the
// next match. A wildcard `allow` rule is always present as the final
// fallback. Parsing is strict: unknown syscalls or actions fail the load.
#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vmplsim/abi.hpp"
#include "vmplsim/types.hpp"

namespace vmplsim {

enum class FilterAction : std::uint8_t {
  Allow,        // take the default pipeline for this syscall
  Deny,         // short-circuit with -errno, no switches
  SelfHandle,   // force proxy-local handling, fall back to sync forward
  ForwardSync,  // GHCB-style synchronous forward
  ForwardAsync, // shared-slot asynchronous forward
  Trace,        // log and fall through
};

constexpr const char* name(FilterAction a) {
  switch (a) {
    case FilterAction::Allow: return "allow";
    case FilterAction::Deny: return "deny";
    case FilterAction::SelfHandle: return "self_handle";
    case FilterAction::ForwardSync: return "forward_sync";
    case FilterAction::ForwardAsync: return "forward_async";
    case FilterAction::Trace: return "trace";
  }
  return "?";
}

struct FilterRule {
  int priority = 0;
  std::optional<std::uint64_t> nr;  // nullopt = wildcard
  FilterAction action = FilterAction::Allow;
  std::int64_t errno_value = sys::EPERM_;

  bool matches(std::uint64_t syscall_nr) const { return !nr || *nr == syscall_nr; }
};

class FilterPolicy {
 public:
  // The default policy: everything takes the natural pipeline.
  FilterPolicy() = default;

  explicit FilterPolicy(std::vector<FilterRule> rules) : rules_(std::move(rules)) { sort(); }

  static FilterPolicy parse(std::istream& in) {
    std::vector<FilterRule> rules;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string_view sv(line);
      auto hash = sv.find('#');
      if (hash != std::string_view::npos) sv = sv.substr(0, hash);
      std::istringstream ls{std::string(sv)};
      std::string prio_tok, nr_tok, action_tok, extra;
      if (!(ls >> prio_tok)) continue;  // blank line
      if (!(ls >> nr_tok >> action_tok) || (ls >> extra))
        throw parse_error(lineno, "expected `priority syscall action`");
      FilterRule r;
      try {
        r.priority = std::stoi(prio_tok);
      } catch (...) {
        throw parse_error(lineno, "bad priority: " + prio_tok);
      }
      if (nr_tok != "*") {
        if (auto n = sys::number_of(nr_tok)) {
          r.nr = *n;
        } else {
          try {
            r.nr = std::stoull(nr_tok);
          } catch (...) {
            throw parse_error(lineno, "unknown syscall: " + nr_tok);
          }
        }
      }
      std::string action = action_tok, errno_tok;
      if (auto colon = action_tok.find(':'); colon != std::string::npos) {
        action = action_tok.substr(0, colon);
        errno_tok = action_tok.substr(colon + 1);
      }
      if (action == "allow") r.action = FilterAction::Allow;
      else if (action == "deny") r.action = FilterAction::Deny;
      else if (action == "self_handle") r.action = FilterAction::SelfHandle;
      else if (action == "forward_sync") r.action = FilterAction::ForwardSync;
      else if (action == "forward_async") r.action = FilterAction::ForwardAsync;
      else if (action == "trace") r.action = FilterAction::Trace;
      else throw parse_error(lineno, "unknown action: " + action);
      if (!errno_tok.empty()) {
        if (r.action != FilterAction::Deny)
          throw parse_error(lineno, "errno only valid on deny");
        auto it = sys::errno_table().find(errno_tok);
        if (it != sys::errno_table().end()) {
          r.errno_value = it->second;
        } else {
          try {
            r.errno_value = std::stoll(errno_tok);
          } catch (...) {
            throw parse_error(lineno, "unknown errno: " + errno_tok);
          }
        }
      }
      rules.push_back(r);
    }
    return FilterPolicy(std::move(rules));
  }

  static FilterPolicy parse(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  static FilterPolicy from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SimError(Err::ParseError, "cannot open policy file: " + path);
    return parse(in);
  }

  // Matching rules in priority order, always terminated by the implicit
  // wildcard allow, so a terminal action always exists.
  std::vector<FilterRule> match(std::uint64_t nr) const {
    std::vector<FilterRule> out;
    for (const FilterRule& r : rules_)
      if (r.matches(nr)) out.push_back(r);
    out.push_back(FilterRule{});  // default: allow
    return out;
  }

  const std::vector<FilterRule>& rules() const { return rules_; }

 private:
  static SimError parse_error(int lineno, const std::string& msg) {
    return SimError(Err::ParseError, "policy line " + std::to_string(lineno) + ": " + msg);
  }

  void sort() {
    std::stable_sort(rules_.begin(), rules_.end(),
                     [](const FilterRule& a, const FilterRule& b) { return a.priority < b.priority; });
  }

  std::vector<FilterRule> rules_;
};

}  // namespace vmplsim
