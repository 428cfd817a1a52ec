#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "egonav/core/record.hpp"

namespace egonav {

// Minority-class oversampling: every record whose label has LEFT or RIGHT set
// appears twice, everything else once, then the whole pool is shuffled by seed.
// The index form reports positions into `records` plus a duplicate ordinal
// (0 for the first occurrence, 1 for the copy) so callers can key augmentation
// streams per occurrence.
struct SampleRef {
  std::size_t index = 0;
  int dup = 0;
  bool operator==(const SampleRef&) const = default;
};

std::vector<SampleRef> oversample_minority_refs(std::span<const Record> records,
                                                std::uint64_t seed);
std::vector<Record> oversample_minority(const std::vector<Record>& records,
                                        std::uint64_t seed);

}  // namespace egonav
