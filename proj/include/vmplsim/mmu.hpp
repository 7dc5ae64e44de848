// Per-process guest page tables and the nested permission walk. The walk
// runs the classic PTE checks first and consults the RMP last, mirroring
// nested paging: a page the guest walk rejects never reaches the RMP stage.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "vmplsim/rmp.hpp"
#include "vmplsim/types.hpp"

namespace vmplsim {

struct Pte {
  bool present = false;
  bool writable = false;
  bool user = false;
  bool nx = false;
  bool cow = false;  // implies present && !writable
  std::uint64_t pfn = 0;
};

enum class VmaKind : std::uint8_t { Code, Data, Stack, Anon, Vdso, File };

constexpr const char* name(VmaKind k) {
  switch (k) {
    case VmaKind::Code: return "code";
    case VmaKind::Data: return "data";
    case VmaKind::Stack: return "stack";
    case VmaKind::Anon: return "anon";
    case VmaKind::Vdso: return "vdso";
    case VmaKind::File: return "file";
  }
  return "?";
}

// Default protection for pages mapped inside a VMA.
struct Prot {
  bool writable = false;
  bool user = true;
  bool nx = true;
};

struct Vma {
  VaRange range;
  VmaKind kind = VmaKind::Anon;
  Prot prot;
};

enum class FaultKind : std::uint8_t {
  NotPresent,
  WriteProtection,
  UserSupervisor,
  NoExecute,
  RmpViolation,
};

constexpr const char* name(FaultKind k) {
  switch (k) {
    case FaultKind::NotPresent: return "not_present";
    case FaultKind::WriteProtection: return "write_protection";
    case FaultKind::UserSupervisor: return "user_supervisor";
    case FaultKind::NoExecute: return "no_execute";
    case FaultKind::RmpViolation: return "rmp_violation";
  }
  return "?";
}

struct Fault {
  FaultKind kind = FaultKind::NotPresent;
  std::uint64_t va = 0;
  AccessType access = AccessType::Read;
  Vmpl vmpl = Vmpl::V0;
  std::uint64_t pfn = 0;  // resolved pfn, meaningful for RmpViolation
};

class AddressSpace {
 public:
  AddressSpace() = default;
  explicit AddressSpace(int pid) : pid_(pid) {}

  int pid() const { return pid_; }

  const std::vector<Vma>& vmas() const { return vmas_; }

  const Vma& add_vma(VaRange range, VmaKind kind, Prot prot) {
    if (!range.aligned() || range.empty())
      throw SimError(Err::Misaligned, "vma " + std::to_string(range.begin));
    for (const Vma& v : vmas_)
      if (v.range.overlaps(range))
        throw SimError(Err::ValidationError, "overlapping vma at " + std::to_string(range.begin));
    auto it = vmas_.begin();
    while (it != vmas_.end() && it->range.begin < range.begin) ++it;
    return *vmas_.insert(it, Vma{range, kind, prot});
  }

  const Vma* find_vma(std::uint64_t va) const {
    for (const Vma& v : vmas_)
      if (v.range.contains(va)) return &v;
    return nullptr;
  }

  Vma* find_vma(std::uint64_t va) {
    for (Vma& v : vmas_)
      if (v.range.contains(va)) return &v;
    return nullptr;
  }

  // Removes the given range from the VMA list, splitting or trimming VMAs
  // that straddle it. PTEs are not touched; callers unmap first.
  void remove_vma_range(VaRange range) {
    if (!range.aligned()) throw SimError(Err::Misaligned, "vma range");
    std::vector<Vma> next;
    for (const Vma& v : vmas_) {
      if (!v.range.overlaps(range)) {
        next.push_back(v);
        continue;
      }
      if (v.range.begin < range.begin)
        next.push_back(Vma{{v.range.begin, range.begin}, v.kind, v.prot});
      if (v.range.end > range.end) next.push_back(Vma{{range.end, v.range.end}, v.kind, v.prot});
    }
    vmas_ = std::move(next);
  }

  // Grow a VMA in place (the brk path). The extension must not collide.
  void grow_vma(std::uint64_t begin, std::uint64_t new_end) {
    for (Vma& v : vmas_) {
      if (v.range.begin != begin) continue;
      if (new_end < v.range.begin) throw SimError(Err::ValidationError, "shrink below base");
      for (const Vma& o : vmas_)
        if (&o != &v && o.range.overlaps({v.range.begin, new_end}))
          throw SimError(Err::ValidationError, "vma growth collides");
      v.range.end = new_end;
      return;
    }
    throw SimError(Err::NoVma, "no vma at " + std::to_string(begin));
  }

  const Pte* pte(std::uint64_t va) const {
    auto it = map_.find(vpn_of(va));
    return it == map_.end() ? nullptr : &it->second;
  }

  void map(std::uint64_t va, std::uint64_t pfn, Pte flags) {
    if (!page_aligned(va)) throw SimError(Err::Misaligned, "va " + std::to_string(va));
    if (!find_vma(va)) throw SimError(Err::NoVma, "va " + std::to_string(va));
    flags.present = true;
    flags.pfn = pfn;
    if (flags.cow) flags.writable = false;
    map_[vpn_of(va)] = flags;
  }

  void unmap(VaRange range) {
    if (!range.aligned()) throw SimError(Err::Misaligned, "unmap range");
    for (std::uint64_t va = range.begin; va < range.end; va += kPageSize) map_.erase(vpn_of(va));
  }

  void protect(VaRange range, Prot prot) {
    if (!range.aligned()) throw SimError(Err::Misaligned, "protect range");
    for (std::uint64_t va = range.begin; va < range.end; va += kPageSize) {
      if (!find_vma(va)) throw SimError(Err::NoVma, "va " + std::to_string(va));
      auto it = map_.find(vpn_of(va));
      if (it == map_.end()) continue;
      it->second.writable = prot.writable && !it->second.cow;
      it->second.user = prot.user;
      it->second.nx = prot.nx;
    }
  }

  // Present PTEs inside the range, ascending by address. Lazily allocated
  // regions that were never touched yield nothing.
  std::vector<std::pair<std::uint64_t, Pte>> walk_region(VaRange range) const {
    if (!range.aligned()) throw SimError(Err::Misaligned, "walk range");
    std::vector<std::pair<std::uint64_t, Pte>> out;
    for (auto it = map_.lower_bound(vpn_of(range.begin)); it != map_.end(); ++it) {
      std::uint64_t va = it->first << kPageShift;
      if (va >= range.end) break;
      if (it->second.present) out.emplace_back(va, it->second);
    }
    return out;
  }

  std::size_t present_count() const { return map_.size(); }

 private:
  int pid_ = 0;
  std::map<std::uint64_t, Pte> map_;  // vpn -> pte
  std::vector<Vma> vmas_;             // sorted, non-overlapping
};

using WalkResult = std::variant<std::uint64_t, Fault>;

// The nested walk. Check order is fixed and total:
//   1. present  2. write needs writable and not COW  3. user CPL needs the
//   user bit  4. fetch needs !nx  5. RMP mask at the accessing VMPL.
// The first failing predicate names the fault; fetches are refined into
// user/super by the CPL before the RMP stage. Pure: neither the space nor
// the RMP is mutated.
inline WalkResult translate_and_check(const AddressSpace& space, const RmpTable& rmp,
                                      std::uint64_t va, AccessType access, Cpl cpl, Vmpl vmpl) {
  const Pte* pte = space.pte(va);
  if (pte == nullptr || !pte->present)
    return Fault{FaultKind::NotPresent, va, access, vmpl, 0};
  if (access == AccessType::Write && (!pte->writable || pte->cow))
    return Fault{FaultKind::WriteProtection, va, access, vmpl, pte->pfn};
  if (cpl == Cpl::User && !pte->user)
    return Fault{FaultKind::UserSupervisor, va, access, vmpl, pte->pfn};
  if (is_fetch(access) && pte->nx)
    return Fault{FaultKind::NoExecute, va, access, vmpl, pte->pfn};
  AccessType refined = access;
  if (is_fetch(access))
    refined = cpl == Cpl::User ? AccessType::FetchUser : AccessType::FetchSuper;
  if (rmp.check(pte->pfn, vmpl, refined))
    return Fault{FaultKind::RmpViolation, va, refined, vmpl, pte->pfn};
  return pte->pfn;
}

}  // namespace vmplsim
