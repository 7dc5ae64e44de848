// Append-only event log. Every observable action of a run lands here in a
// stable one-line-per-event text form, which reports and golden tests count
// against. Line format: `seq  kind  ctx  vmpl  detail`.
#pragma once

#include <cstdint>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "vmplsim/types.hpp"

namespace vmplsim {

enum class EventKind : std::uint8_t {
  Init,
  TcbState,
  EnterUser,
  CtxSave,
  CtxRestore,
  VmplSwitch,
  Trap,
  Route,
  OsSyscall,
  Fault,
  Grant,
  PoolGrant,
  PoolRefill,
  SyscallTrace,
  TraceHook,
  Breakpoint,
  Timer,
  SegV,
  ChannelBoot,
  ThreadExit,
};

constexpr const char* name(EventKind k) {
  switch (k) {
    case EventKind::Init: return "Init";
    case EventKind::TcbState: return "TcbState";
    case EventKind::EnterUser: return "EnterUser";
    case EventKind::CtxSave: return "CtxSave";
    case EventKind::CtxRestore: return "CtxRestore";
    case EventKind::VmplSwitch: return "VmplSwitch";
    case EventKind::Trap: return "Trap";
    case EventKind::Route: return "Route";
    case EventKind::OsSyscall: return "OsSyscall";
    case EventKind::Fault: return "Fault";
    case EventKind::Grant: return "Grant";
    case EventKind::PoolGrant: return "PoolGrant";
    case EventKind::PoolRefill: return "PoolRefill";
    case EventKind::SyscallTrace: return "SyscallTrace";
    case EventKind::TraceHook: return "TraceHook";
    case EventKind::Breakpoint: return "Breakpoint";
    case EventKind::Timer: return "Timer";
    case EventKind::SegV: return "SegV";
    case EventKind::ChannelBoot: return "ChannelBoot";
    case EventKind::ThreadExit: return "ThreadExit";
  }
  return "?";
}

struct Event {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Init;
  int ctx = 0;  // vcpu index, or the service context id
  int vmpl = 0;
  std::string detail;

  std::string line() const {
    char head[32];
    std::snprintf(head, sizeof head, "%06llu ", static_cast<unsigned long long>(seq));
    std::string s(head);
    s += name(kind);
    s += ' ';
    s += std::to_string(ctx);
    s += ' ';
    s += std::to_string(vmpl);
    if (!detail.empty()) {
      s += ' ';
      s += detail;
    }
    return s;
  }

  // True if the detail contains the given `key=value` token.
  bool has_token(const std::string& token) const {
    std::size_t pos = detail.find(token);
    while (pos != std::string::npos) {
      bool left_ok = pos == 0 || detail[pos - 1] == ' ';
      std::size_t end = pos + token.size();
      bool right_ok = end == detail.size() || detail[end] == ' ';
      if (left_ok && right_ok) return true;
      pos = detail.find(token, pos + 1);
    }
    return false;
  }
};

class EventLog {
 public:
  void append(EventKind kind, int ctx, int vmpl, std::string detail) {
    events_.push_back(Event{next_seq_++, kind, ctx, vmpl, std::move(detail)});
  }

  const std::vector<Event>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }

  std::size_t count(EventKind kind) const {
    std::size_t n = 0;
    for (const Event& e : events_)
      if (e.kind == kind) ++n;
    return n;
  }

  std::size_t count_if(const std::function<bool(const Event&)>& pred) const {
    std::size_t n = 0;
    for (const Event& e : events_)
      if (pred(e)) ++n;
    return n;
  }

  std::size_t count(EventKind kind, const std::string& token) const {
    return count_if([&](const Event& e) { return e.kind == kind && e.has_token(token); });
  }

  void render(std::ostream& os) const {
    for (const Event& e : events_) os << e.line() << '\n';
  }

  std::string str() const {
    std::ostringstream os;
    render(os);
    return os.str();
  }

 private:
  std::uint64_t next_seq_ = 1;
  std::vector<Event> events_;
};

}  // namespace vmplsim
