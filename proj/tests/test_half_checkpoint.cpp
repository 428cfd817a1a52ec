#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "egonav/nn/checkpoint.hpp"
#include "egonav/nn/half.hpp"

using namespace egonav;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* stem) {
  auto dir = fs::temp_directory_path() / "egonav_test";
  fs::create_directories(dir);
  return dir / stem;
}

}  // namespace

TEST_CASE("half conversion reproduces known bit patterns") {
  CHECK(nn::float_to_half_bits(0.0f) == 0x0000);
  CHECK(nn::float_to_half_bits(-0.0f) == 0x8000);
  CHECK(nn::float_to_half_bits(1.0f) == 0x3C00);
  CHECK(nn::float_to_half_bits(-2.0f) == 0xC000);
  CHECK(nn::float_to_half_bits(65504.0f) == 0x7BFF);
  // 1/3 rounds to 0x3555, which reads back as 0.333251953125
  CHECK(nn::float_to_half_bits(1.0f / 3.0f) == 0x3555);
  CHECK(nn::half_bits_to_float(0x3555) == 0.333251953125f);
  // smallest subnormal
  CHECK(nn::half_bits_to_float(0x0001) == doctest::Approx(5.960464477539063e-8));
  CHECK(nn::float_to_half_bits(5.960464477539063e-8f) == 0x0001);
}

TEST_CASE("half rounding is to nearest even") {
  // 1 + 1/2048 sits exactly between 1.0 and the next half (1 + 1/1024): ties to even
  CHECK(nn::float_to_half_bits(1.0f + 1.0f / 2048.0f) == 0x3C00);
  // 1 + 3/2048 is between 1+1/1024 and 1+2/1024: ties to even (0x3C02)
  CHECK(nn::float_to_half_bits(1.0f + 3.0f / 2048.0f) == 0x3C02);
  // just above the midpoint rounds up
  CHECK(nn::float_to_half_bits(std::nextafter(1.0f + 1.0f / 2048.0f, 2.0f)) == 0x3C01);
}

TEST_CASE("half round trip is idempotent and within half epsilon") {
  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const float f = (float)rng.uniform(-80.0, 80.0);
    const float once = nn::half_round_trip(f);
    CHECK(nn::half_round_trip(once) == once);
    // relative error bound for normal binary16 is 2^-11
    if (std::abs(f) > 1e-4f) CHECK(std::abs(once - f) <= std::abs(f) * 0x1.0p-11f + 1e-9f);
  }
  CHECK(std::isinf(nn::half_bits_to_float(nn::float_to_half_bits(1e6f))));
}

TEST_CASE("quantize_f16 rewrites parameters and rejects overflow") {
  nn::ParamStore<float> store(3);
  auto w = store.create("w", {4}, nn::Init::kZero);
  w.mutable_values()[0] = 1.0f / 3.0f;
  w.mutable_values()[1] = -0.1f;
  w.mutable_values()[2] = 1000.25f;
  w.mutable_values()[3] = 0.0f;
  nn::quantize_f16(store);
  CHECK(w.values()[0] == 0.333251953125f);
  CHECK(w.values()[1] == nn::half_round_trip(-0.1f));
  CHECK(w.values()[3] == 0.0f);
  // already-quantized values stay fixed
  const float v2 = w.values()[2];
  nn::quantize_f16(store);
  CHECK(w.values()[2] == v2);

  nn::ParamStore<float> bad(3);
  auto b = bad.create("head.w", {1}, nn::Init::kZero);
  b.mutable_values()[0] = 70000.0f;
  CHECK_THROWS_WITH_AS(nn::quantize_f16(bad), doctest::Contains("head.w"), Error);
}

TEST_CASE("checkpoint round trip preserves every bit in f32") {
  nn::ParamStore<float> store(11);
  store.create("a.w", {3, 4}, nn::Init::kUniformFanIn);
  store.create("a.b", {3}, nn::Init::kUniformFanIn);
  store.create("deep.block.w", {2, 2, 3, 3}, nn::Init::kUniformFanIn);
  const auto path = temp_file("roundtrip.ckpt");
  nn::save_checkpoint(store, path);

  nn::ParamStore<float> other(99);  // different init, loading must overwrite
  other.create("a.w", {3, 4}, nn::Init::kUniformFanIn);
  other.create("a.b", {3}, nn::Init::kUniformFanIn);
  other.create("deep.block.w", {2, 2, 3, 3}, nn::Init::kUniformFanIn);
  nn::load_checkpoint_into(other, path);
  for (std::size_t i = 0; i < store.items().size(); ++i) {
    const auto a = store.items()[i].value.values();
    const auto b = other.items()[i].value.values();
    REQUIRE(a.size() == b.size());
    for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j] == b[j]);
  }

  auto entries = nn::read_checkpoint(path);
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].name == "a.w");
  CHECK(entries[0].dtype == nn::CheckpointDType::kF32);
  CHECK(entries[2].shape == nn::Shape{2, 2, 3, 3});
}

TEST_CASE("f16 checkpoints store rounded values and transcode losslessly after") {
  nn::ParamStore<float> store(13);
  auto w = store.create("w", {3}, nn::Init::kZero);
  w.mutable_values()[0] = 1.0f / 3.0f;
  w.mutable_values()[1] = 0.7f;
  w.mutable_values()[2] = -4.2f;

  const auto h = temp_file("half.ckpt");
  nn::save_checkpoint(store, h, nn::CheckpointDType::kF16);
  auto entries = nn::read_checkpoint(h);
  CHECK(entries[0].dtype == nn::CheckpointDType::kF16);
  for (int i = 0; i < 3; ++i) {
    CHECK(entries[0].data[i] == nn::half_round_trip(w.values()[i]));
  }
  // half file is smaller than the f32 one
  const auto f = temp_file("full.ckpt");
  nn::save_checkpoint(store, f);
  CHECK(fs::file_size(h) < fs::file_size(f));

  // f16 -> f32 transcode keeps the rounded values exactly
  const auto wide = temp_file("wide.ckpt");
  nn::transcode_checkpoint(h, wide, nn::CheckpointDType::kF32);
  auto wide_entries = nn::read_checkpoint(wide);
  CHECK(wide_entries[0].dtype == nn::CheckpointDType::kF32);
  for (int i = 0; i < 3; ++i) CHECK(wide_entries[0].data[i] == entries[0].data[i]);

  // and a second f16 pass is a fixed point
  const auto again = temp_file("again.ckpt");
  nn::transcode_checkpoint(wide, again, nn::CheckpointDType::kF16);
  auto again_entries = nn::read_checkpoint(again);
  for (int i = 0; i < 3; ++i) CHECK(again_entries[0].data[i] == entries[0].data[i]);
}

TEST_CASE("checkpoint loading validates structure") {
  nn::ParamStore<float> store(17);
  store.create("w", {2}, nn::Init::kUniformFanIn);
  const auto path = temp_file("victim.ckpt");
  nn::save_checkpoint(store, path);

  nn::ParamStore<float> wrong_name(17);
  wrong_name.create("other", {2}, nn::Init::kZero);
  CHECK_THROWS_WITH_AS(nn::load_checkpoint_into(wrong_name, path),
                       doctest::Contains("no parameter"), Error);

  nn::ParamStore<float> wrong_shape(17);
  wrong_shape.create("w", {3}, nn::Init::kZero);
  CHECK_THROWS_WITH_AS(nn::load_checkpoint_into(wrong_shape, path),
                       doctest::Contains("\"w\""), Error);

  nn::ParamStore<float> wrong_count(17);
  wrong_count.create("w", {2}, nn::Init::kZero);
  wrong_count.create("extra", {1}, nn::Init::kZero);
  CHECK_THROWS_WITH_AS(nn::load_checkpoint_into(wrong_count, path),
                       doctest::Contains(" has 1"), Error);

  // magic mismatch
  const auto junk = temp_file("junk.ckpt");
  std::ofstream(junk, std::ios::binary) << "not a checkpoint at all";
  CHECK_THROWS_AS((void)nn::read_checkpoint(junk), Error);

  // truncation mid-payload
  const auto cut = temp_file("cut.ckpt");
  {
    std::ifstream in(path, std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), {});
    std::ofstream out(cut, std::ios::binary);
    out.write(bytes.data(), (std::streamsize)(bytes.size() - 3));
  }
  CHECK_THROWS_AS((void)nn::read_checkpoint(cut), Error);

  CHECK_THROWS_AS((void)nn::read_checkpoint(temp_file("missing.ckpt")), Error);
}
