#pragma once

#include <filesystem>
#include <span>

#include "egonav/core/frame.hpp"

namespace egonav {

// contiguous store of same-size frames addressed by id (= append order)
class FrameStore {
 public:
  FrameStore() = default;

  int append(const Frame& f);
  int count() const { return count_; }
  Frame frame(int id) const;
  std::span<const std::uint8_t> raw(int id) const;

  // flat little-endian pixel dump, kFrameBytes per frame
  void save(const std::filesystem::path& path) const;
  static FrameStore load(const std::filesystem::path& path);

  bool operator==(const FrameStore&) const = default;

 private:
  std::vector<std::uint8_t> bytes_;
  int count_ = 0;
};

}  // namespace egonav
