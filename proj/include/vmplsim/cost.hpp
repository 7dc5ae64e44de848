// Cycle cost model for routing trade-offs. The three page-fault figures are
// measured end-to-end delays and already include the switches on their
// path; the syscall-route figures are tunable defaults that only promise
// the qualitative ordering ghcb >> hotcall > native.
#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "vmplsim/types.hpp"

namespace vmplsim {

struct CostModel {
  std::uint64_t pf_base = 13026;
  std::uint64_t pf_vmpl_super = 29627;
  std::uint64_t pf_vmpl_user = 29936;
  std::uint64_t ghcb_forward = 12000;
  std::uint64_t hotcall_forward = 3000;
  std::uint64_t vmpl_switch = 2000;
  std::uint64_t native_syscall = 800;

  // The MSR protocol is the bootstrap path; modeled at twice the GHCB cost.
  std::uint64_t msr_forward() const { return ghcb_forward * 2; }

  void apply_override(const std::string& key, std::uint64_t value) {
    if (key == "pf_base") pf_base = value;
    else if (key == "pf_vmpl_super") pf_vmpl_super = value;
    else if (key == "pf_vmpl_user") pf_vmpl_user = value;
    else if (key == "ghcb_forward") ghcb_forward = value;
    else if (key == "hotcall_forward") hotcall_forward = value;
    else if (key == "vmpl_switch") vmpl_switch = value;
    else if (key == "native_syscall") native_syscall = value;
    else throw SimError(Err::ParseError, "unknown cost key: " + key);
  }

  double pf_ratio_super() const { return static_cast<double>(pf_vmpl_super) / pf_base; }
  double pf_ratio_user() const { return static_cast<double>(pf_vmpl_user) / pf_base; }
};

// Route and fault tallies extracted from an event log. Cycle totals are a
// pure linear function of these counts.
struct Counts {
  std::uint64_t route_self = 0;
  std::uint64_t route_deny = 0;
  std::uint64_t route_sync = 0;
  std::uint64_t route_sync_msr = 0;  // subset of route_sync taken pre-registration
  std::uint64_t route_async = 0;
  std::uint64_t route_vdso = 0;
  std::uint64_t route_native = 0;
  std::uint64_t vmpl_switches = 0;
  std::uint64_t vmpl_switches_fault = 0;  // subset on fault-forwarding paths
  std::uint64_t faults_native = 0;
  std::uint64_t faults_proxy = 0;
  std::uint64_t faults_os_user = 0;
  std::uint64_t faults_os_super = 0;

  Counts scaled(std::uint64_t k) const {
    Counts c = *this;
    c.route_self *= k;
    c.route_deny *= k;
    c.route_sync *= k;
    c.route_sync_msr *= k;
    c.route_async *= k;
    c.route_vdso *= k;
    c.route_native *= k;
    c.vmpl_switches *= k;
    c.vmpl_switches_fault *= k;
    c.faults_native *= k;
    c.faults_proxy *= k;
    c.faults_os_user *= k;
    c.faults_os_super *= k;
    return c;
  }
};

struct CycleBreakdown {
  std::uint64_t syscall_cycles = 0;
  std::uint64_t fault_cycles = 0;
  std::uint64_t switch_cycles = 0;
  std::uint64_t total = 0;
};

// total = sum(route count * route cost). Self-handled and denied syscalls
// price one kernel-entry unit (the trap into the proxy); vdso reads price
// nothing. Fault routes use their end-to-end figures, so the switches on a
// fault path are not charged a second time. Proxy-resolved faults price the
// baseline fault path (no guest OS round trip).
inline CycleBreakdown cost_account(const Counts& c, const CostModel& m) {
  CycleBreakdown b;
  b.syscall_cycles = (c.route_self + c.route_deny + c.route_native) * m.native_syscall +
                     (c.route_sync - c.route_sync_msr) * m.ghcb_forward +
                     c.route_sync_msr * m.msr_forward() + c.route_async * m.hotcall_forward;
  b.fault_cycles = (c.faults_native + c.faults_proxy) * m.pf_base +
                   c.faults_os_user * m.pf_vmpl_user + c.faults_os_super * m.pf_vmpl_super;
  b.switch_cycles = (c.vmpl_switches - c.vmpl_switches_fault) * m.vmpl_switch;
  b.total = b.syscall_cycles + b.fault_cycles + b.switch_cycles;
  return b;
}

}  // namespace vmplsim
