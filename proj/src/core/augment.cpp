#include "egonav/core/augment.hpp"

#include <algorithm>
#include <cmath>

#include "egonav/common/geometry.hpp"

namespace egonav {

namespace {

std::uint8_t to_u8(double v) {
  const long r = std::lround(v);
  return static_cast<std::uint8_t>(std::clamp(r, 0L, 255L));
}

}  // namespace

Frame translate_frame(const Frame& f, int dx, int dy) {
  Frame out(f.width, f.height, 0);
  for (int y = 0; y < f.height; ++y) {
    const int sy = y - dy;
    if (sy < 0 || sy >= f.height) continue;
    for (int x = 0; x < f.width; ++x) {
      const int sx = x - dx;
      if (sx < 0 || sx >= f.width) continue;
      out.set(x, y, f.at(sx, sy));
    }
  }
  return out;
}

// brightness/contrast as fractional offsets: contrast scales about mid-gray,
// brightness scales the result
Frame adjust_brightness_contrast(const Frame& f, double brightness, double contrast) {
  Frame out(f.width, f.height, 0);
  const double fb = 1.0 + brightness;
  const double fc = 1.0 + contrast;
  for (std::size_t i = 0; i < f.pixels.size(); ++i) {
    const double v = (static_cast<double>(f.pixels[i]) - 128.0) * fc + 128.0;
    out.pixels[i] = to_u8(v * fb);
  }
  return out;
}

Frame occlude_square(const Frame& f, int x, int y, int side) {
  check(side > 0, "occlusion side must be positive, got ", side);
  Frame out = f;
  const int x0 = std::max(0, x);
  const int y0 = std::max(0, y);
  const int x1 = std::min(f.width, x + side);
  const int y1 = std::min(f.height, y + side);
  for (int yy = y0; yy < y1; ++yy) {
    for (int xx = x0; xx < x1; ++xx) out.set(xx, yy, 0);
  }
  return out;
}

Frame rotate_frame(const Frame& f, double degrees) {
  Frame out(f.width, f.height, 0);
  const double a = deg_to_rad(degrees);
  const double ca = std::cos(a);
  const double sa = std::sin(a);
  const double cx = (f.width - 1) * 0.5;
  const double cy = (f.height - 1) * 0.5;
  for (int y = 0; y < f.height; ++y) {
    for (int x = 0; x < f.width; ++x) {
      // inverse-rotate the destination pixel into the source
      const double rx = x - cx;
      const double ry = y - cy;
      const double sx = ca * rx + sa * ry + cx;
      const double sy = -sa * rx + ca * ry + cy;
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      if (x0 < -1 || x0 >= f.width || y0 < -1 || y0 >= f.height) continue;
      const double wx = sx - x0;
      const double wy = sy - y0;
      auto sample = [&](int xs, int ys) -> double {
        return f.in_bounds(xs, ys) ? f.at(xs, ys) : 0.0;
      };
      const double v = (1 - wx) * (1 - wy) * sample(x0, y0) +
                       wx * (1 - wy) * sample(x0 + 1, y0) +
                       (1 - wx) * wy * sample(x0, y0 + 1) +
                       wx * wy * sample(x0 + 1, y0 + 1);
      out.set(x, y, to_u8(v));
    }
  }
  return out;
}

Frame add_gaussian_noise(const Frame& f, double sigma, Rng& rng) {
  Frame out(f.width, f.height, 0);
  for (std::size_t i = 0; i < f.pixels.size(); ++i) {
    out.pixels[i] = to_u8(f.pixels[i] + rng.normal(0.0, sigma));
  }
  return out;
}

Frame add_salt_pepper_noise(const Frame& f, double fraction, Rng& rng) {
  Frame out = f;
  for (std::size_t i = 0; i < f.pixels.size(); ++i) {
    if (rng.bernoulli(fraction)) out.pixels[i] = rng.bernoulli(0.5) ? 255 : 0;
  }
  return out;
}

Frame superpixel_average(const Frame& f, int block) {
  check(block > 0, "superpixel block must be positive, got ", block);
  Frame out = f;
  for (int by = 0; by < f.height; by += block) {
    for (int bx = 0; bx < f.width; bx += block) {
      const int y1 = std::min(f.height, by + block);
      const int x1 = std::min(f.width, bx + block);
      double sum = 0.0;
      int n = 0;
      for (int y = by; y < y1; ++y) {
        for (int x = bx; x < x1; ++x) {
          sum += f.at(x, y);
          ++n;
        }
      }
      const std::uint8_t mean = to_u8(sum / n);
      for (int y = by; y < y1; ++y) {
        for (int x = bx; x < x1; ++x) out.set(x, y, mean);
      }
    }
  }
  return out;
}

Frame augment_frame(const Frame& f, Rng& rng, const AugmentConfig& cfg) {
  Frame out = f;
  if (rng.bernoulli(cfg.prob)) {
    auto draw_shift = [&] {
      const double mag = rng.uniform(cfg.min_translate_px, cfg.max_translate_px);
      return static_cast<int>(std::lround(rng.bernoulli(0.5) ? mag : -mag));
    };
    const int dx = draw_shift();
    const int dy = draw_shift();
    out = translate_frame(out, dx, dy);
  }
  if (rng.bernoulli(cfg.prob)) {
    const double b = rng.uniform(-cfg.max_intensity_jitter, cfg.max_intensity_jitter);
    const double c = rng.uniform(-cfg.max_intensity_jitter, cfg.max_intensity_jitter);
    out = adjust_brightness_contrast(out, b, c);
  }
  if (rng.bernoulli(cfg.prob)) {
    const int count = 1 + static_cast<int>(rng.uniform_index(3));
    for (int i = 0; i < count; ++i) {
      const int side = cfg.min_occlusion_px +
                       static_cast<int>(rng.uniform_index(
                           cfg.max_occlusion_px - cfg.min_occlusion_px + 1));
      const int x = static_cast<int>(rng.uniform_index(out.width - side + 1));
      const int y = static_cast<int>(rng.uniform_index(out.height - side + 1));
      out = occlude_square(out, x, y, side);
    }
  }
  if (rng.bernoulli(cfg.prob)) {
    out = rotate_frame(out, rng.uniform(-cfg.max_rotation_deg, cfg.max_rotation_deg));
  }
  if (rng.bernoulli(cfg.prob)) {
    if (rng.bernoulli(0.5)) {
      out = add_gaussian_noise(out, rng.uniform(2.0, 10.0), rng);
    } else {
      out = add_salt_pepper_noise(out, rng.uniform(0.005, 0.03), rng);
    }
  }
  if (rng.bernoulli(cfg.prob)) {
    out = superpixel_average(out, cfg.superpixel_block);
  }
  return out;
}

}  // namespace egonav
