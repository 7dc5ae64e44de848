// The mini-OS syscall surface: Linux x86-64 numbers for the modeled subset,
// errno values, and the interposed virtual-memory syscall set.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>

namespace vmplsim::sys {

inline constexpr std::uint64_t read = 0;
inline constexpr std::uint64_t write = 1;
inline constexpr std::uint64_t open = 2;
inline constexpr std::uint64_t close = 3;
inline constexpr std::uint64_t mmap = 9;
inline constexpr std::uint64_t mprotect = 10;
inline constexpr std::uint64_t munmap = 11;
inline constexpr std::uint64_t brk = 12;
inline constexpr std::uint64_t mremap = 25;
inline constexpr std::uint64_t madvise = 28;
inline constexpr std::uint64_t shmat = 30;
inline constexpr std::uint64_t getpid = 39;
inline constexpr std::uint64_t exit_ = 60;
inline constexpr std::uint64_t shmdt = 67;
inline constexpr std::uint64_t getuid = 102;
inline constexpr std::uint64_t mlock = 149;
inline constexpr std::uint64_t mlockall = 151;
inline constexpr std::uint64_t remap_file_pages = 216;
inline constexpr std::uint64_t clock_gettime = 228;
inline constexpr std::uint64_t exit_group = 231;
inline constexpr std::uint64_t mlock2 = 325;
inline constexpr std::uint64_t pkey_mprotect = 329;

inline const std::map<std::string, std::uint64_t>& name_table() {
  static const std::map<std::string, std::uint64_t> t = {
      {"read", read},
      {"write", write},
      {"open", open},
      {"close", close},
      {"mmap", mmap},
      {"mprotect", mprotect},
      {"munmap", munmap},
      {"brk", brk},
      {"mremap", mremap},
      {"madvise", madvise},
      {"shmat", shmat},
      {"getpid", getpid},
      {"exit", exit_},
      {"shmdt", shmdt},
      {"getuid", getuid},
      {"mlock", mlock},
      {"mlockall", mlockall},
      {"remap_file_pages", remap_file_pages},
      {"clock_gettime", clock_gettime},
      {"exit_group", exit_group},
      {"mlock2", mlock2},
      {"pkey_mprotect", pkey_mprotect},
  };
  return t;
}

inline std::optional<std::uint64_t> number_of(const std::string& name) {
  auto it = name_table().find(name);
  if (it == name_table().end()) return std::nullopt;
  return it->second;
}

inline std::string name_of(std::uint64_t nr) {
  for (const auto& [n, v] : name_table())
    if (v == nr) return n;
  return std::to_string(nr);
}

// Virtual-memory syscalls whose completion triggers the page-table grant
// walk. Membership is fixed; the shm/pkey/remap entries are tracked for
// interposition even though their OS semantics are stubbed.
inline const std::set<std::uint64_t>& interposed_set() {
  static const std::set<std::uint64_t> s = {
      mmap,  mremap, munmap,   brk,    mprotect, pkey_mprotect,    madvise,
      shmat, shmdt,  remap_file_pages, mlock,    mlock2,           mlockall,
  };
  return s;
}

// errno values, returned to confined code as -errno.
inline constexpr std::int64_t EPERM_ = 1;
inline constexpr std::int64_t ENOENT_ = 2;
inline constexpr std::int64_t EBADF_ = 9;
inline constexpr std::int64_t ENOMEM_ = 12;
inline constexpr std::int64_t EACCES_ = 13;
inline constexpr std::int64_t EFAULT_ = 14;
inline constexpr std::int64_t EINVAL_ = 22;
inline constexpr std::int64_t ENOSYS_ = 38;

inline const std::map<std::string, std::int64_t>& errno_table() {
  static const std::map<std::string, std::int64_t> t = {
      {"EPERM", EPERM_},   {"ENOENT", ENOENT_}, {"EBADF", EBADF_},   {"ENOMEM", ENOMEM_},
      {"EACCES", EACCES_}, {"EFAULT", EFAULT_}, {"EINVAL", EINVAL_}, {"ENOSYS", ENOSYS_},
  };
  return t;
}

// mmap argument bits (Linux values).
inline constexpr std::uint64_t PROT_READ = 0x1;
inline constexpr std::uint64_t PROT_WRITE = 0x2;
inline constexpr std::uint64_t PROT_EXEC = 0x4;
inline constexpr std::uint64_t MAP_SHARED = 0x01;
inline constexpr std::uint64_t MAP_PRIVATE = 0x02;
inline constexpr std::uint64_t MAP_ANONYMOUS = 0x20;

}  // namespace vmplsim::sys
