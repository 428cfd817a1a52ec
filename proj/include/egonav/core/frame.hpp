#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "egonav/common/error.hpp"

namespace egonav {

inline constexpr int kFrameSize = 128;           // square frames
inline constexpr std::size_t kFrameBytes = 128 * 128;
inline constexpr double kFramePeriodS = 0.5;     // 2 fps capture
inline constexpr double kSensorPeriodS = 0.1;    // 10 Hz sensors
inline constexpr int kContextLength = 10;        // context frames per record

// single-channel grayscale frame, row-major
struct Frame {
  int width = kFrameSize;
  int height = kFrameSize;
  std::vector<std::uint8_t> pixels;

  Frame() : pixels(kFrameBytes, 0) {}
  Frame(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {
    check(w > 0 && h > 0, "frame dimensions must be positive, got ", w, "x", h);
  }

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  void set(int x, int y, std::uint8_t v) {
    pixels[static_cast<std::size_t>(y) * width + x] = v;
  }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }

  bool operator==(const Frame&) const = default;
};

void save_pgm(const Frame& f, const std::filesystem::path& path);

}  // namespace egonav
