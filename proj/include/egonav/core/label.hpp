#pragma once

#include <cstdint>

#include "egonav/common/error.hpp"

namespace egonav {

enum class DirClass : int { kLeft = 0, kRight = 1, kFront = 2 };
inline constexpr int kNumClasses = 3;

inline const char* dir_name(DirClass d) {
  switch (d) {
    case DirClass::kLeft: return "left";
    case DirClass::kRight: return "right";
    case DirClass::kFront: return "front";
  }
  return "?";
}

// multi-label direction target; any subset can be active
struct LabelVector {
  bool left = false;
  bool right = false;
  bool front = false;

  bool get(DirClass d) const {
    switch (d) {
      case DirClass::kLeft: return left;
      case DirClass::kRight: return right;
      case DirClass::kFront: return front;
    }
    return false;
  }
  void set(DirClass d, bool v) {
    switch (d) {
      case DirClass::kLeft: left = v; return;
      case DirClass::kRight: right = v; return;
      case DirClass::kFront: front = v; return;
    }
  }
  bool any() const { return left || right || front; }
  bool is_turn() const { return left || right; }
  std::uint8_t bits() const {
    return static_cast<std::uint8_t>((left ? 1 : 0) | (right ? 2 : 0) | (front ? 4 : 0));
  }
  static LabelVector from_bits(std::uint8_t b) {
    check((b & ~0x7u) == 0, "label bits out of range: ", int(b));
    return {(b & 1) != 0, (b & 2) != 0, (b & 4) != 0};
  }
  LabelVector mirrored() const { return {right, left, front}; }

  bool operator==(const LabelVector&) const = default;
};

// per-class scores in [0,1]; independent, need not sum to 1
struct ScoreVector {
  double left = 0.0;
  double right = 0.0;
  double front = 0.0;

  double get(DirClass d) const {
    switch (d) {
      case DirClass::kLeft: return left;
      case DirClass::kRight: return right;
      case DirClass::kFront: return front;
    }
    return 0.0;
  }
  bool operator==(const ScoreVector&) const = default;
};

}  // namespace egonav
