#pragma once

#include "egonav/common/rng.hpp"
#include "egonav/core/frame.hpp"

namespace egonav {

// Training-time frame augmentation. Six transforms, each applied independently
// with probability `prob`, in the fixed order below. Vacated pixels are 0.
struct AugmentConfig {
  double prob = 0.2;
  double max_translate_px = 25.0;   // per axis, magnitude drawn in [min, max]
  double min_translate_px = 5.0;
  double max_intensity_jitter = 0.2;  // brightness and contrast, +/- fraction
  int min_occlusion_px = 5;
  int max_occlusion_px = 20;
  double max_rotation_deg = 20.0;
  int superpixel_block = 8;
};

Frame augment_frame(const Frame& f, Rng& rng, const AugmentConfig& cfg = {});

// the individual transforms, exposed for direct use and testing
Frame translate_frame(const Frame& f, int dx, int dy);
Frame adjust_brightness_contrast(const Frame& f, double brightness, double contrast);
Frame occlude_square(const Frame& f, int x, int y, int side);
Frame rotate_frame(const Frame& f, double degrees);
Frame add_gaussian_noise(const Frame& f, double sigma, Rng& rng);
Frame add_salt_pepper_noise(const Frame& f, double fraction, Rng& rng);
Frame superpixel_average(const Frame& f, int block);

}  // namespace egonav
