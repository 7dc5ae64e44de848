// Simulated physical memory: a flat array of 4 KiB frames, allocated lazily
// so large configurations stay cheap. Untouched frames read as zero.
#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <memory>
#include <span>
#include <vector>

#include "vmplsim/types.hpp"

namespace vmplsim {

class PhysMem {
 public:
  explicit PhysMem(std::uint64_t pages) : frames_(pages) {}

  std::uint64_t page_count() const { return frames_.size(); }

  std::uint8_t read8(std::uint64_t pfn, std::uint64_t offset) const {
    bounds_check(pfn, offset);
    const Frame* f = frames_[pfn].get();
    return f == nullptr ? 0 : (*f)[offset];
  }

  void write8(std::uint64_t pfn, std::uint64_t offset, std::uint8_t value) {
    bounds_check(pfn, offset);
    frame(pfn)[offset] = value;
  }

  void write_bytes(std::uint64_t pfn, std::uint64_t offset, std::span<const std::uint8_t> bytes) {
    bounds_check(pfn, offset + bytes.size() - (bytes.empty() ? 0 : 1));
    std::memcpy(frame(pfn).data() + offset, bytes.data(), bytes.size());
  }

  void read_bytes(std::uint64_t pfn, std::uint64_t offset, std::span<std::uint8_t> out) const {
    if (out.empty()) return;
    bounds_check(pfn, offset + out.size() - 1);
    const Frame* f = frames_[pfn].get();
    if (f == nullptr) {
      std::memset(out.data(), 0, out.size());
      return;
    }
    std::memcpy(out.data(), f->data() + offset, out.size());
  }

  void copy_page(std::uint64_t dst_pfn, std::uint64_t src_pfn) {
    bounds_check(dst_pfn, 0);
    bounds_check(src_pfn, 0);
    const Frame* src = frames_[src_pfn].get();
    if (src == nullptr) {
      zero_page(dst_pfn);
      return;
    }
    frame(dst_pfn) = *src;
  }

  void zero_page(std::uint64_t pfn) {
    bounds_check(pfn, 0);
    if (frames_[pfn]) frames_[pfn]->fill(0);
  }

  bool pages_equal(std::uint64_t a, std::uint64_t b) const {
    bounds_check(a, 0);
    bounds_check(b, 0);
    for (std::uint64_t i = 0; i < kPageSize; ++i)
      if (read8(a, i) != read8(b, i)) return false;
    return true;
  }

 private:
  using Frame = std::array<std::uint8_t, kPageSize>;

  Frame& frame(std::uint64_t pfn) {
    if (!frames_[pfn]) {
      frames_[pfn] = std::make_unique<Frame>();
      frames_[pfn]->fill(0);
    }
    return *frames_[pfn];
  }

  void bounds_check(std::uint64_t pfn, std::uint64_t offset) const {
    if (pfn >= frames_.size() || offset >= kPageSize)
      throw SimError(Err::OutOfBounds, "pfn " + std::to_string(pfn));
  }

  std::vector<std::unique_ptr<Frame>> frames_;
};

}  // namespace vmplsim
