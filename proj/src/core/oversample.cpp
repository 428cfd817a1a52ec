#include "egonav/core/oversample.hpp"

#include "egonav/common/rng.hpp"

namespace egonav {

std::vector<SampleRef> oversample_minority_refs(std::span<const Record> records,
                                                std::uint64_t seed) {
  std::vector<SampleRef> refs;
  refs.reserve(records.size() * 2);
  for (std::size_t i = 0; i < records.size(); ++i) {
    refs.push_back({i, 0});
    if (records[i].label.is_turn()) refs.push_back({i, 1});
  }
  Rng rng(seed);
  rng.shuffle(refs);
  return refs;
}

std::vector<Record> oversample_minority(const std::vector<Record>& records,
                                        std::uint64_t seed) {
  const auto refs = oversample_minority_refs(records, seed);
  std::vector<Record> out;
  out.reserve(refs.size());
  for (const auto& ref : refs) out.push_back(records[ref.index]);
  return out;
}

}  // namespace egonav
