#include "egonav/core/frame_store.hpp"

#include "egonav/common/io.hpp"

namespace egonav {

int FrameStore::append(const Frame& f) {
  check(f.width == kFrameSize && f.height == kFrameSize, "frame store expects ",
        kFrameSize, "x", kFrameSize, " frames, got ", f.width, "x", f.height);
  bytes_.insert(bytes_.end(), f.pixels.begin(), f.pixels.end());
  return count_++;
}

Frame FrameStore::frame(int id) const {
  const auto r = raw(id);
  Frame f;
  f.pixels.assign(r.begin(), r.end());
  return f;
}

std::span<const std::uint8_t> FrameStore::raw(int id) const {
  check(id >= 0 && id < count_, "frame id ", id, " out of range [0, ", count_, ")");
  return {bytes_.data() + static_cast<std::size_t>(id) * kFrameBytes, kFrameBytes};
}

void FrameStore::save(const std::filesystem::path& path) const {
  write_binary_file(path, bytes_);
}

FrameStore FrameStore::load(const std::filesystem::path& path) {
  FrameStore s;
  s.bytes_ = read_binary_file(path);
  check(s.bytes_.size() % kFrameBytes == 0, "frame file ", path.string(), " has ",
        s.bytes_.size(), " bytes, not a multiple of ", kFrameBytes);
  s.count_ = static_cast<int>(s.bytes_.size() / kFrameBytes);
  return s;
}

}  // namespace egonav
