#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "egonav/nn/half.hpp"
#include "egonav/nn/optim.hpp"

namespace egonav::nn {

enum class CheckpointDType : std::uint8_t { kF32 = 0, kF16 = 1 };

struct CheckpointEntry {
  std::string name;
  CheckpointDType dtype = CheckpointDType::kF32;
  Shape shape;
  std::vector<float> data;  // f16 payloads arrive widened
};

// file layout (little endian):
//   magic "ENCP", u32 version, u32 param count, then per parameter:
//   u32 name length, name bytes, u8 dtype, u32 rank, u32 dims[rank], raw data
void save_checkpoint(const ParamStore<float>& params,
                     const std::filesystem::path& path,
                     CheckpointDType dtype = CheckpointDType::kF32);

std::vector<CheckpointEntry> read_checkpoint(const std::filesystem::path& path);

// loads into an existing store; names, shapes, and count must match exactly
void load_checkpoint_into(ParamStore<float>& params,
                          const std::filesystem::path& path);

// rewrites a checkpoint in the other precision without needing the model
void transcode_checkpoint(const std::filesystem::path& in,
                          const std::filesystem::path& out, CheckpointDType dtype);

}  // namespace egonav::nn
