#include "egonav/nn/half.hpp"

#include <bit>
#include <cmath>

#include "egonav/common/error.hpp"

namespace egonav::nn {

std::uint16_t float_to_half_bits(float f) {
  const std::uint32_t x = std::bit_cast<std::uint32_t>(f);
  const auto sign = static_cast<std::uint16_t>((x >> 16) & 0x8000u);
  std::uint32_t abs = x & 0x7fffffffu;
  if (abs >= 0x7f800000u) {  // inf / nan
    return abs > 0x7f800000u ? static_cast<std::uint16_t>(sign | 0x7e00u)
                             : static_cast<std::uint16_t>(sign | 0x7c00u);
  }
  if (abs <= 0x33000000u) return sign;  // <= 2^-25 rounds to zero (tie to even)
  if (abs < 0x38800000u) {
    // subnormal half: build the 10-bit mantissa with round-to-nearest-even
    const int shift = 126 - static_cast<int>(abs >> 23);
    const std::uint32_t mant = (abs & 0x7fffffu) | 0x800000u;
    const std::uint32_t q = mant >> shift;
    const std::uint32_t rem = mant & ((1u << shift) - 1u);
    const std::uint32_t half = 1u << (shift - 1);
    std::uint32_t rounded = q;
    if (rem > half || (rem == half && (q & 1u))) ++rounded;
    return static_cast<std::uint16_t>(sign | rounded);
  }
  // normal: add the rounding bias, letting the carry ripple into the exponent
  abs += 0xFFFu + ((abs >> 13) & 1u);
  const std::uint32_t h = (abs - 0x38000000u) >> 13;
  if (h >= 0x7c00u) return static_cast<std::uint16_t>(sign | 0x7c00u);  // overflow
  return static_cast<std::uint16_t>(sign | h);
}

float half_bits_to_float(std::uint16_t h) {
  const std::uint32_t sign = (static_cast<std::uint32_t>(h) & 0x8000u) << 16;
  const std::uint32_t e = (h >> 10) & 0x1fu;
  const std::uint32_t m = h & 0x3ffu;
  if (e == 0) {
    if (m == 0) return std::bit_cast<float>(sign);
    const float v = std::ldexp(static_cast<float>(m), -24);
    return sign ? -v : v;
  }
  if (e == 31) {
    return std::bit_cast<float>(sign | 0x7f800000u | (m << 13));
  }
  return std::bit_cast<float>(sign | ((e + 112u) << 23) | (m << 13));
}

void quantize_f16(ParamStore<float>& params) {
  for (auto& p : params.items()) {
    auto v = p.value.mutable_values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      check(std::isfinite(v[i]), "quantize_f16: parameter \"", p.name,
            "\" has a non-finite value at index ", i);
      check(std::abs(v[i]) <= kHalfMax, "quantize_f16: parameter \"", p.name,
            "\" value ", v[i], " at index ", i, " overflows binary16 (max ", kHalfMax,
            ")");
      v[i] = half_round_trip(v[i]);
    }
  }
}

}  // namespace egonav::nn
