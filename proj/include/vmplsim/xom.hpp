// Execute-only-memory policy: builds exec-only RMP masks over code regions
// and probes them. The cross-layer variant separates user and super execute
// so neither side can run the other's code, independent of the PTE U/S bit.
#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "vmplsim/mmu.hpp"
#include "vmplsim/rmp.hpp"
#include "vmplsim/types.hpp"

namespace vmplsim {

enum class ExecLevel : std::uint8_t { UserOnly, SuperOnly };

struct XomPolicy {
  VaRange region;
  ExecLevel exec_level = ExecLevel::UserOnly;
  Vmpl target_vmpl = Vmpl::V1;

  PermMask mask() const {
    return exec_level == ExecLevel::UserOnly ? PermMask::xom_user() : PermMask::xom_super();
  }
};

// Revokes read and write on every page of the region at the target VMPL,
// leaving only the designated execute bit. Page granularity; regions that
// stray outside code VMAs are rejected rather than split.
inline void apply_xom(const XomPolicy& policy, const AddressSpace& space, RmpTable& rmp) {
  if (!policy.region.aligned() || policy.region.empty())
    throw SimError(Err::Misaligned, "xom region");
  for (std::uint64_t va = policy.region.begin; va < policy.region.end; va += kPageSize) {
    const Vma* vma = space.find_vma(va);
    if (vma == nullptr || vma->kind != VmaKind::Code)
      throw SimError(Err::NotCodeVma, "va " + std::to_string(va));
  }
  for (std::uint64_t va = policy.region.begin; va < policy.region.end; va += kPageSize) {
    const Pte* pte = space.pte(va);
    if (pte == nullptr || !pte->present)
      throw SimError(Err::NotAssigned, "xom page unmapped at " + std::to_string(va));
    rmp.set_permissions(Vmpl::V0, pte->pfn, policy.target_vmpl, policy.mask());
  }
}

// Enhanced-SMEP analog over a whole address space: supervisor code VMAs
// become exec-super-only and user code VMAs exec-user-only at the given
// VMPL. Enforcement lives in the RMP, so it holds even when the page
// table's U/S bit is left permissive.
inline void apply_cross_layer(const AddressSpace& space, RmpTable& rmp, Vmpl vmpl) {
  for (const Vma& vma : space.vmas()) {
    if (vma.kind != VmaKind::Code) continue;
    XomPolicy p{vma.range, vma.prot.user ? ExecLevel::UserOnly : ExecLevel::SuperOnly, vmpl};
    apply_xom(p, space, rmp);
  }
}

struct ProbeOutcome {
  bool allow = false;
  FaultKind deny_kind = FaultKind::NotPresent;
};

struct ProbePage {
  std::uint64_t va = 0;
  ProbeOutcome read, write, fetch_user, fetch_super;
};

// Attack-simulation audit: issues all four access types against every page
// of a region at one VMPL and reports the outcomes. Read-only with respect
// to PTE and RMP state.
struct ProbeReport {
  VaRange region;
  Vmpl vmpl = Vmpl::V1;
  std::vector<ProbePage> pages;

  static const char* cell(const ProbeOutcome& o) { return o.allow ? "allow" : "deny"; }

  std::string matrix() const {
    std::ostringstream os;
    os << "va read write fetch_user fetch_super\n";
    char buf[32];
    for (const ProbePage& p : pages) {
      std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(p.va));
      os << buf << ' ' << cell(p.read) << ' ' << cell(p.write) << ' ' << cell(p.fetch_user) << ' '
         << cell(p.fetch_super) << '\n';
    }
    return os.str();
  }
};

inline ProbeReport probe_xom(const AddressSpace& space, const RmpTable& rmp, VaRange region,
                             Vmpl vmpl) {
  if (!region.aligned()) throw SimError(Err::Misaligned, "probe region");
  ProbeReport report;
  report.region = region;
  report.vmpl = vmpl;
  auto probe = [&](std::uint64_t va, AccessType a, Cpl cpl) {
    WalkResult w = translate_and_check(space, rmp, va, a, cpl, vmpl);
    if (const Fault* f = std::get_if<Fault>(&w)) return ProbeOutcome{false, f->kind};
    return ProbeOutcome{true, FaultKind::NotPresent};
  };
  for (std::uint64_t va = region.begin; va < region.end; va += kPageSize) {
    ProbePage p;
    p.va = va;
    p.read = probe(va, AccessType::Read, Cpl::User);
    p.write = probe(va, AccessType::Write, Cpl::User);
    p.fetch_user = probe(va, AccessType::FetchUser, Cpl::User);
    p.fetch_super = probe(va, AccessType::FetchSuper, Cpl::Super);
    report.pages.push_back(p);
  }
  return report;
}

}  // namespace vmplsim
