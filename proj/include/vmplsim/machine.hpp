// The vCPU model: one VMSA per VMPL, the VMPL switch primitive, and a small
// abstract instruction machine that drives confined programs and raises
// trap frames. Registers are an abstract fixed file, not an ISA encoding;
// reg 0 carries the syscall number on entry and the return value on resume,
// regs 1..6 carry syscall arguments.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vmplsim/abi.hpp"
#include "vmplsim/event_log.hpp"
#include "vmplsim/memory.hpp"
#include "vmplsim/mmu.hpp"
#include "vmplsim/types.hpp"

namespace vmplsim {

inline constexpr std::size_t kNumRegs = 8;
inline constexpr std::size_t kRegRet = 0;
inline constexpr std::size_t kRegArg0 = 1;  // args occupy regs 1..6
inline constexpr std::size_t kRegScratch = 7;

struct Vmsa {
  std::array<std::uint64_t, kNumRegs> regs{};
  std::uint64_t ip = 0;
  std::uint64_t sp = 0;
  Cpl cpl = Cpl::User;
  std::vector<std::uint64_t> debug_regs;
  bool runnable = false;

  // Sequencer state for the alloc/touch/free macro-op.
  bool in_macro = false;
  std::uint64_t macro_phase = 0;
  std::uint64_t macro_base = 0;

  bool operator==(const Vmsa&) const = default;
};

struct Vcpu {
  int id = 0;
  std::array<Vmsa, 4> vmsa;
  Vmpl current = Vmpl::V0;
  std::optional<int> pinned_tid;
};

// Workload instructions. Programs are finite sequences; Halt terminates.
struct ReadOp { std::uint64_t va = 0; };
struct WriteOp { std::uint64_t va = 0; std::uint8_t value = 0; };
struct ExecOp { std::uint64_t va = 0; };  // explicit fetch probe
struct SyscallOp {
  std::uint64_t nr = 0;
  std::array<std::uint64_t, 6> args{};
};
struct BreakpointOp {};
struct HaltOp {};
// Macro-op for anonymous-memory workloads: mmap n pages, touch each once,
// munmap. Expands to real syscalls and writes as it steps.
struct AllocTouchFreeOp { std::uint64_t pages = 1; };

using Instruction =
    std::variant<ReadOp, WriteOp, ExecOp, SyscallOp, BreakpointOp, HaltOp, AllocTouchFreeOp>;
using Program = std::vector<Instruction>;

enum class TrapCause : std::uint8_t { Syscall, PageFault, Breakpoint, Debug };

constexpr const char* name(TrapCause c) {
  switch (c) {
    case TrapCause::Syscall: return "syscall";
    case TrapCause::PageFault: return "page_fault";
    case TrapCause::Breakpoint: return "breakpoint";
    case TrapCause::Debug: return "debug";
  }
  return "?";
}

// Snapshot delivered on syscall/exception; immutable once produced.
struct TrapFrame {
  TrapCause cause = TrapCause::Syscall;
  int vcpu = 0;
  int tid = -1;
  Vmpl vmpl = Vmpl::V0;
  Cpl cpl = Cpl::User;
  std::uint64_t ip = 0;
  std::array<std::uint64_t, kNumRegs> regs{};
  std::uint64_t nr = 0;
  std::array<std::uint64_t, 6> args{};
  std::optional<Fault> fault;
};

enum class StepStatus : std::uint8_t { Running, Trapped, Halted };

struct StepResult {
  StepStatus status = StepStatus::Running;
  TrapFrame frame;
};

class Machine {
 public:
  explicit Machine(int num_vcpus) {
    vcpus_.resize(static_cast<std::size_t>(num_vcpus));
    for (int i = 0; i < num_vcpus; ++i) {
      vcpus_[static_cast<std::size_t>(i)].id = i;
      // VMPL0 is the guest OS context and is always runnable.
      vcpus_[static_cast<std::size_t>(i)].vmsa[0].runnable = true;
      vcpus_[static_cast<std::size_t>(i)].vmsa[0].cpl = Cpl::Super;
    }
  }

  int num_vcpus() const { return static_cast<int>(vcpus_.size()); }

  Vcpu& vcpu(int i) { return vcpus_.at(static_cast<std::size_t>(i)); }
  const Vcpu& vcpu(int i) const { return vcpus_.at(static_cast<std::size_t>(i)); }

  Vmsa& vmsa(int cpu, Vmpl v) { return vcpu(cpu).vmsa[static_cast<std::size_t>(level(v))]; }
  const Vmsa& vmsa(int cpu, Vmpl v) const {
    return vcpu(cpu).vmsa[static_cast<std::size_t>(level(v))];
  }

  // Total instructions retired across all vCPUs; also the simulated clock.
  std::uint64_t instret() const { return instret_; }

  void load_program(int cpu, Vmpl vmpl, Program program, std::uint64_t entry_ip) {
    Vmsa& v = vmsa(cpu, vmpl);
    v.ip = entry_ip;
    v.runnable = true;
    programs_[key(cpu, vmpl)] = Loaded{std::move(program), entry_ip};
  }

  const Program* program(int cpu, Vmpl vmpl) const {
    auto it = programs_.find(key(cpu, vmpl));
    return it == programs_.end() ? nullptr : &it->second.program;
  }

  // The switch primitive: swaps the active VMSA. The log line carries a
  // reason tag so cost accounting can tell fault-path switches apart.
  void vmpl_switch(int cpu, Vmpl target, EventLog& log, const std::string& reason) {
    Vcpu& c = vcpu(cpu);
    if (!c.vmsa[static_cast<std::size_t>(level(target))].runnable)
      throw SimError(Err::NotRunnable, "vmpl" + std::to_string(level(target)));
    Vmpl from = c.current;
    c.current = target;
    log.append(EventKind::VmplSwitch, cpu, level(target),
               "from=" + std::to_string(level(from)) + " to=" + std::to_string(level(target)) +
                   " reason=" + reason);
  }

  // Scheduling-level change of the active VMSA; not a modeled switch.
  void set_current(int cpu, Vmpl v) { vcpu(cpu).current = v; }

  // Executes one instruction of the current VMSA's program. Memory ops run
  // the nested walk at the VMSA's CPL and the vCPU's VMPL; every abnormal
  // outcome is a Trapped value, never an error. A faulting instruction does
  // not advance the ip, so resolution retries it.
  StepResult step(int cpu, AddressSpace& space, const RmpTable& rmp, PhysMem& mem) {
    Vcpu& c = vcpu(cpu);
    Vmsa& v = c.vmsa[static_cast<std::size_t>(level(c.current))];
    auto pit = programs_.find(key(cpu, c.current));
    if (pit == programs_.end())
      throw SimError(Err::BadState, "no program loaded at vmpl" + std::to_string(level(c.current)));
    const Loaded& loaded = pit->second;

    const Vma* code_vma = space.find_vma(v.ip);
    if (code_vma == nullptr || code_vma->kind != VmaKind::Code)
      throw SimError(Err::NoVma, "ip " + std::to_string(v.ip) + " outside a code vma");

    if (v.ip < loaded.entry || v.ip - loaded.entry >= loaded.program.size())
      return {StepStatus::Halted, {}};
    const Instruction& ins = loaded.program[static_cast<std::size_t>(v.ip - loaded.entry)];

    ++instret_;

    if (const auto* r = std::get_if<ReadOp>(&ins)) {
      WalkResult w = translate_and_check(space, rmp, r->va, AccessType::Read, v.cpl, c.current);
      if (const Fault* f = std::get_if<Fault>(&w)) return trap_fault(cpu, v, *f);
      v.regs[kRegScratch] = mem.read8(std::get<std::uint64_t>(w), r->va % kPageSize);
      ++v.ip;
      return {StepStatus::Running, {}};
    }
    if (const auto* w_op = std::get_if<WriteOp>(&ins)) {
      WalkResult w = translate_and_check(space, rmp, w_op->va, AccessType::Write, v.cpl, c.current);
      if (const Fault* f = std::get_if<Fault>(&w)) return trap_fault(cpu, v, *f);
      mem.write8(std::get<std::uint64_t>(w), w_op->va % kPageSize, w_op->value);
      ++v.ip;
      return {StepStatus::Running, {}};
    }
    if (const auto* x = std::get_if<ExecOp>(&ins)) {
      AccessType fetch = v.cpl == Cpl::User ? AccessType::FetchUser : AccessType::FetchSuper;
      WalkResult w = translate_and_check(space, rmp, x->va, fetch, v.cpl, c.current);
      if (const Fault* f = std::get_if<Fault>(&w)) return trap_fault(cpu, v, *f);
      ++v.ip;
      return {StepStatus::Running, {}};
    }
    if (const auto* s = std::get_if<SyscallOp>(&ins)) return trap_syscall(cpu, v, s->nr, s->args);
    if (std::get_if<BreakpointOp>(&ins)) {
      TrapFrame f = base_frame(cpu, v);
      f.cause = TrapCause::Breakpoint;
      return {StepStatus::Trapped, f};
    }
    if (std::get_if<HaltOp>(&ins)) return {StepStatus::Halted, {}};

    // AllocTouchFree sequencer: mmap trap, one write per page (faultable),
    // munmap trap, then retire.
    const auto& atf = std::get<AllocTouchFreeOp>(ins);
    std::uint64_t len = atf.pages * kPageSize;
    if (!v.in_macro) {
      v.in_macro = true;
      v.macro_phase = 0;
      return trap_syscall(cpu, v, sys::mmap,
                          {0, len, sys::PROT_READ | sys::PROT_WRITE,
                           sys::MAP_PRIVATE | sys::MAP_ANONYMOUS,
                           static_cast<std::uint64_t>(-1), 0});
    }
    if (v.macro_phase >= 1 && v.macro_phase <= atf.pages) {
      std::uint64_t va = v.macro_base + (v.macro_phase - 1) * kPageSize;
      WalkResult w = translate_and_check(space, rmp, va, AccessType::Write, v.cpl, c.current);
      if (const Fault* f = std::get_if<Fault>(&w)) return trap_fault(cpu, v, *f);
      mem.write8(std::get<std::uint64_t>(w), 0, 0xA5);
      ++v.macro_phase;
      return {StepStatus::Running, {}};
    }
    // phase == pages + 1: release
    v.macro_phase = atf.pages + 2;
    return trap_syscall(cpu, v, sys::munmap, {v.macro_base, len, 0, 0, 0, 0});
  }

  // Called by the router after a syscall completes: writes the return value
  // into the origin VMSA's return register and resumes at ip+1 (or advances
  // the macro sequencer instead).
  void complete_syscall(int cpu, std::int64_t ret) {
    Vcpu& c = vcpu(cpu);
    Vmsa& v = c.vmsa[static_cast<std::size_t>(level(c.current))];
    v.regs[kRegRet] = static_cast<std::uint64_t>(ret);
    if (v.in_macro) {
      if (v.macro_phase == 0) {
        if (ret < 0) {  // allocation failed; retire the macro-op
          v.in_macro = false;
          ++v.ip;
          return;
        }
        v.macro_base = static_cast<std::uint64_t>(ret);
        v.macro_phase = 1;
        return;
      }
      v.in_macro = false;
      v.macro_phase = 0;
      ++v.ip;
      return;
    }
    ++v.ip;
  }

  void complete_breakpoint(int cpu) {
    Vcpu& c = vcpu(cpu);
    ++c.vmsa[static_cast<std::size_t>(level(c.current))].ip;
  }

 private:
  struct Loaded {
    Program program;
    std::uint64_t entry = 0;
  };

  static std::uint64_t key(int cpu, Vmpl v) {
    return (static_cast<std::uint64_t>(cpu) << 2) | static_cast<std::uint64_t>(level(v));
  }

  TrapFrame base_frame(int cpu, const Vmsa& v) const {
    TrapFrame f;
    f.vcpu = cpu;
    f.vmpl = vcpus_[static_cast<std::size_t>(cpu)].current;
    f.cpl = v.cpl;
    f.ip = v.ip;
    f.regs = v.regs;
    return f;
  }

  StepResult trap_fault(int cpu, const Vmsa& v, const Fault& fault) {
    TrapFrame f = base_frame(cpu, v);
    f.cause = TrapCause::PageFault;
    f.fault = fault;
    return {StepStatus::Trapped, f};
  }

  StepResult trap_syscall(int cpu, Vmsa& v, std::uint64_t nr,
                          const std::array<std::uint64_t, 6>& args) {
    // Syscall arguments are saved in the VMSA by the trap itself.
    v.regs[kRegRet] = nr;
    for (std::size_t i = 0; i < 6; ++i) v.regs[kRegArg0 + i] = args[i];
    TrapFrame f = base_frame(cpu, v);
    f.cause = TrapCause::Syscall;
    f.nr = nr;
    f.args = args;
    return {StepStatus::Trapped, f};
  }

  std::vector<Vcpu> vcpus_;
  std::map<std::uint64_t, Loaded> programs_;
  std::uint64_t instret_ = 0;
};

}  // namespace vmplsim
