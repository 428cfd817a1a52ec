#pragma once

#include <cstdint>

#include "egonav/nn/optim.hpp"

namespace egonav::nn {

inline constexpr float kHalfMax = 65504.0f;

// IEEE binary16 conversion, round-to-nearest-even; values beyond +-65504
// round to infinity (callers that forbid overflow check before converting)
std::uint16_t float_to_half_bits(float f);
float half_bits_to_float(std::uint16_t h);

inline float half_round_trip(float f) { return half_bits_to_float(float_to_half_bits(f)); }

// rounds every parameter value to its nearest binary16 and stores the result
// widened back to float; throws naming the parameter if a value overflows
void quantize_f16(ParamStore<float>& params);

}  // namespace egonav::nn
