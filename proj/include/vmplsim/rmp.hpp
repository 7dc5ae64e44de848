// Reverse Mapping Table model: per-physical-page ownership plus one
// permission mask per VMPL, consulted on every nested walk.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "vmplsim/types.hpp"

namespace vmplsim {

enum class PageOwner : std::uint8_t { Unassigned, Guest, Shared };

constexpr const char* name(PageOwner o) {
  switch (o) {
    case PageOwner::Unassigned: return "unassigned";
    case PageOwner::Guest: return "guest";
    case PageOwner::Shared: return "shared";
  }
  return "?";
}

// Denied access, reported as a value. Carries everything needed to
// attribute the violation in event logs and fault frames.
struct RmpViolation {
  std::uint64_t pfn = 0;
  Vmpl vmpl = Vmpl::V0;
  AccessType access = AccessType::Read;
};

struct RmpEntry {
  std::uint64_t pfn = 0;
  PageOwner owner = PageOwner::Unassigned;
  std::array<PermMask, 4> perms{};
  // Standing management delegation installed by VMPL0: the supervisor of
  // this level may adjust this page's mask for its own level.
  std::optional<Vmpl> delegated_to;
};

class RmpTable {
 public:
  explicit RmpTable(std::uint64_t page_count) : entries_(page_count) {
    for (std::uint64_t i = 0; i < page_count; ++i) entries_[i].pfn = i;
  }

  std::uint64_t page_count() const { return entries_.size(); }

  const RmpEntry& entry(std::uint64_t pfn) const {
    bounds_check(pfn);
    return entries_[pfn];
  }

  // A page has exactly one owner; re-assignment requires revoke first.
  // Fresh entries deny everything to VMPL1..3 and give VMPL0 the full mask.
  void assign(std::uint64_t pfn, PageOwner owner = PageOwner::Guest) {
    bounds_check(pfn);
    RmpEntry& e = entries_[pfn];
    if (e.owner != PageOwner::Unassigned)
      throw SimError(Err::AlreadyAssigned, "pfn " + std::to_string(pfn));
    e.owner = owner;
    e.perms = {PermMask::full(), PermMask::none(), PermMask::none(), PermMask::none()};
    e.delegated_to.reset();
  }

  void revoke(std::uint64_t pfn) {
    bounds_check(pfn);
    RmpEntry& e = entries_[pfn];
    if (e.owner == PageOwner::Unassigned)
      throw SimError(Err::NotAssigned, "pfn " + std::to_string(pfn));
    e.owner = PageOwner::Unassigned;
    e.perms = {};
    e.delegated_to.reset();
  }

  // Shared pages (the GHCB class) bypass the per-VMPL mask entirely.
  void mark_shared(std::uint64_t pfn) {
    bounds_check(pfn);
    entries_[pfn].owner = PageOwner::Shared;
    entries_[pfn].perms = {};
    entries_[pfn].delegated_to.reset();
  }

  // Grant-subset rule: a level may hand a lower level at most the rights it
  // holds itself on that page. VMPL0's mask is immutable.
  void set_permissions(Vmpl requestor, std::uint64_t pfn, Vmpl target, PermMask mask) {
    bounds_check(pfn);
    RmpEntry& e = entries_[pfn];
    if (e.owner != PageOwner::Guest)
      throw SimError(Err::NotAssigned, "pfn " + std::to_string(pfn));
    if (target == Vmpl::V0)
      throw SimError(Err::Vmpl0Immutable, "pfn " + std::to_string(pfn));
    if (!more_privileged(requestor, target))
      throw SimError(Err::PrivilegeViolation,
                     "requestor vmpl" + std::to_string(level(requestor)) +
                         " >= target vmpl" + std::to_string(level(target)));
    if (!mask.subset_of(e.perms[static_cast<std::size_t>(level(requestor))]))
      throw SimError(Err::PrivilegeViolation,
                     "mask " + mask.str() + " exceeds requestor's " +
                         e.perms[static_cast<std::size_t>(level(requestor))].str());
    e.perms[static_cast<std::size_t>(level(target))] = mask;
  }

  void delegate(std::uint64_t pfn, Vmpl to) {
    bounds_check(pfn);
    if (entries_[pfn].owner != PageOwner::Guest)
      throw SimError(Err::NotAssigned, "pfn " + std::to_string(pfn));
    entries_[pfn].delegated_to = to;
  }

  // Exercise a standing delegation: acts with VMPL0 authority but only on
  // the delegate's own level and only on pages delegated to it.
  void set_permissions_delegated(std::uint64_t pfn, Vmpl by, PermMask mask) {
    bounds_check(pfn);
    RmpEntry& e = entries_[pfn];
    if (e.owner != PageOwner::Guest)
      throw SimError(Err::NotAssigned, "pfn " + std::to_string(pfn));
    if (!e.delegated_to || *e.delegated_to != by)
      throw SimError(Err::NotDelegated, "pfn " + std::to_string(pfn));
    if (by == Vmpl::V0) throw SimError(Err::Vmpl0Immutable, "delegate cannot be vmpl0");
    e.perms[static_cast<std::size_t>(level(by))] = mask;
  }

  // The access-check predicate consulted on every nested walk. Pure; a
  // denial is a value, not an error. Unassigned and out-of-range pages
  // always deny.
  std::optional<RmpViolation> check(std::uint64_t pfn, Vmpl vmpl, AccessType access) const {
    if (pfn >= entries_.size()) return RmpViolation{pfn, vmpl, access};
    const RmpEntry& e = entries_[pfn];
    if (e.owner == PageOwner::Shared) return std::nullopt;
    if (e.owner != PageOwner::Guest) return RmpViolation{pfn, vmpl, access};
    if (!e.perms[static_cast<std::size_t>(level(vmpl))].allows(access))
      return RmpViolation{pfn, vmpl, access};
    return std::nullopt;
  }

  PermMask perms(std::uint64_t pfn, Vmpl vmpl) const {
    bounds_check(pfn);
    return entries_[pfn].perms[static_cast<std::size_t>(level(vmpl))];
  }

  // Debug dump, one assigned page per line: `pfn owner vmpl0..vmpl3`.
  void dump(std::ostream& os) const {
    for (const RmpEntry& e : entries_) {
      if (e.owner == PageOwner::Unassigned) continue;
      os << e.pfn << ' ' << name(e.owner);
      for (const PermMask& m : e.perms) os << ' ' << m.str();
      os << '\n';
    }
  }

 private:
  void bounds_check(std::uint64_t pfn) const {
    if (pfn >= entries_.size())
      throw SimError(Err::OutOfBounds,
                     "pfn " + std::to_string(pfn) + " >= " + std::to_string(entries_.size()));
  }

  std::vector<RmpEntry> entries_;
};

}  // namespace vmplsim
