// Core domain types shared by every vmplsim component: privilege levels,
// access kinds, per-level permission masks, and the error taxonomy.
#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace vmplsim {

inline constexpr std::uint64_t kPageSize = 4096;
inline constexpr std::uint64_t kPageShift = 12;

constexpr std::uint64_t page_floor(std::uint64_t va) { return va & ~(kPageSize - 1); }
constexpr bool page_aligned(std::uint64_t va) { return (va & (kPageSize - 1)) == 0; }
constexpr std::uint64_t vpn_of(std::uint64_t va) { return va >> kPageShift; }

// Virtual machine privilege level. Numerically smaller is more privileged;
// VMPL0 is the guest OS, VMPL1..3 host confined execution.
enum class Vmpl : std::uint8_t { V0 = 0, V1 = 1, V2 = 2, V3 = 3 };

constexpr int level(Vmpl v) { return static_cast<int>(v); }
constexpr bool more_privileged(Vmpl a, Vmpl b) { return level(a) < level(b); }

inline Vmpl vmpl_from_int(int n) {
  if (n < 0 || n > 3) throw std::out_of_range("vmpl out of range: " + std::to_string(n));
  return static_cast<Vmpl>(n);
}

enum class Cpl : std::uint8_t { User, Super };

// One access against a physical page. Fetch is split by the CPL of the
// fetching context; callers never pick the split themselves.
enum class AccessType : std::uint8_t { Read, Write, FetchUser, FetchSuper };

constexpr bool is_fetch(AccessType a) {
  return a == AccessType::FetchUser || a == AccessType::FetchSuper;
}

constexpr const char* name(AccessType a) {
  switch (a) {
    case AccessType::Read: return "read";
    case AccessType::Write: return "write";
    case AccessType::FetchUser: return "fetch_user";
    case AccessType::FetchSuper: return "fetch_super";
  }
  return "?";
}

// Per-VMPL permission mask of one physical page. The four bits are fully
// independent: read/write are orthogonal, and user/super execute are
// separate bits rather than a single NX.
struct PermMask {
  bool read = false;
  bool write = false;
  bool exec_user = false;
  bool exec_super = false;

  static constexpr PermMask none() { return {}; }
  static constexpr PermMask full() { return {true, true, true, true}; }
  static constexpr PermMask rw() { return {true, true, false, false}; }
  static constexpr PermMask xom_user() { return {false, false, true, false}; }
  static constexpr PermMask xom_super() { return {false, false, false, true}; }

  // bit0=read, bit1=write, bit2=exec_user, bit3=exec_super
  static constexpr PermMask from_bits(unsigned bits) {
    return {(bits & 1u) != 0, (bits & 2u) != 0, (bits & 4u) != 0, (bits & 8u) != 0};
  }
  constexpr unsigned to_bits() const {
    return (read ? 1u : 0u) | (write ? 2u : 0u) | (exec_user ? 4u : 0u) | (exec_super ? 8u : 0u);
  }

  constexpr bool allows(AccessType a) const {
    switch (a) {
      case AccessType::Read: return read;
      case AccessType::Write: return write;
      case AccessType::FetchUser: return exec_user;
      case AccessType::FetchSuper: return exec_super;
    }
    return false;
  }

  constexpr bool subset_of(PermMask o) const { return (to_bits() & ~o.to_bits()) == 0; }

  constexpr PermMask united(PermMask o) const { return from_bits(to_bits() | o.to_bits()); }

  constexpr bool operator==(const PermMask&) const = default;

  // "rwux" with '-' for absent bits; u = user execute, x = super execute.
  std::string str() const {
    std::string s = "----";
    if (read) s[0] = 'r';
    if (write) s[1] = 'w';
    if (exec_user) s[2] = 'u';
    if (exec_super) s[3] = 'x';
    return s;
  }
};

// A half-open, page-aligned virtual address range.
struct VaRange {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;

  constexpr std::uint64_t pages() const { return (end - begin) >> kPageShift; }
  constexpr bool contains(std::uint64_t va) const { return va >= begin && va < end; }
  constexpr bool contains(const VaRange& r) const { return r.begin >= begin && r.end <= end; }
  constexpr bool overlaps(const VaRange& r) const { return begin < r.end && r.begin < end; }
  constexpr bool empty() const { return begin >= end; }
  constexpr bool aligned() const { return page_aligned(begin) && page_aligned(end); }
  constexpr bool operator==(const VaRange&) const = default;
};

enum class Err {
  OutOfBounds,
  AlreadyAssigned,
  NotAssigned,
  PrivilegeViolation,
  Vmpl0Immutable,
  NotDelegated,
  Misaligned,
  NoVma,
  NotRunnable,
  AlreadyRegistered,
  SlotBusy,
  BadState,
  BadVmpl,
  ConfigInvalid,
  NotCodeVma,
  OutOfMemory,
  ParseError,
  ValidationError,
  Deadlock,
};

constexpr const char* name(Err e) {
  switch (e) {
    case Err::OutOfBounds: return "OutOfBounds";
    case Err::AlreadyAssigned: return "AlreadyAssigned";
    case Err::NotAssigned: return "NotAssigned";
    case Err::PrivilegeViolation: return "PrivilegeViolation";
    case Err::Vmpl0Immutable: return "Vmpl0Immutable";
    case Err::NotDelegated: return "NotDelegated";
    case Err::Misaligned: return "Misaligned";
    case Err::NoVma: return "NoVma";
    case Err::NotRunnable: return "NotRunnable";
    case Err::AlreadyRegistered: return "AlreadyRegistered";
    case Err::SlotBusy: return "SlotBusy";
    case Err::BadState: return "BadState";
    case Err::BadVmpl: return "BadVmpl";
    case Err::ConfigInvalid: return "ConfigInvalid";
    case Err::NotCodeVma: return "NotCodeVma";
    case Err::OutOfMemory: return "OutOfMemory";
    case Err::ParseError: return "ParseError";
    case Err::ValidationError: return "ValidationError";
    case Err::Deadlock: return "Deadlock";
  }
  return "?";
}

// Contract violations (bad arguments, bad state, bad config) surface as
// exceptions. Modeled outcomes of the simulation -- faults, violations,
// routing results -- are ordinary return values, never exceptions.
class SimError : public std::runtime_error {
 public:
  SimError(Err code, const std::string& msg)
      : std::runtime_error(std::string(name(code)) + ": " + msg), code_(code) {}

  Err code() const { return code_; }

 private:
  Err code_;
};

}  // namespace vmplsim
