#include "egonav/nn/checkpoint.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "egonav/common/error.hpp"

namespace egonav::nn {

namespace {

constexpr char kMagic[4] = {'E', 'N', 'C', 'P'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    check(out_.good(), "cannot write ", path.string());
    path_ = path.string();
  }
  template <class T>
  void put(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void put_bytes(const void* p, std::size_t n) {
    out_.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n));
  }
  void finish() {
    out_.flush();
    check(out_.good(), "short write to ", path_);
  }

 private:
  std::ofstream out_;
  std::string path_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    check(in_.good(), "cannot open checkpoint ", path.string());
    path_ = path.string();
  }
  template <class T>
  T get(const char* what) {
    T v;
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_.good()) {
      fail("checkpoint ", path_, ": truncated at offset ", offset_, " reading ", what);
    }
    offset_ += sizeof(T);
    return v;
  }
  void get_bytes(void* p, std::size_t n, const char* what) {
    in_.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in_.good()) {
      fail("checkpoint ", path_, ": truncated at offset ", offset_, " reading ", what);
    }
    offset_ += n;
  }
  bool at_eof() {
    in_.peek();
    return in_.eof();
  }
  const std::string& path() const { return path_; }

 private:
  std::ifstream in_;
  std::string path_;
  std::size_t offset_ = 0;
};

void write_entries(const std::vector<CheckpointEntry>& entries,
                   const std::filesystem::path& path, CheckpointDType dtype) {
  Writer w(path);
  w.put_bytes(kMagic, 4);
  w.put(kVersion);
  w.put(static_cast<std::uint32_t>(entries.size()));
  for (const auto& e : entries) {
    w.put(static_cast<std::uint32_t>(e.name.size()));
    w.put_bytes(e.name.data(), e.name.size());
    w.put(static_cast<std::uint8_t>(dtype));
    w.put(static_cast<std::uint32_t>(e.shape.size()));
    for (int d : e.shape) w.put(static_cast<std::uint32_t>(d));
    if (dtype == CheckpointDType::kF32) {
      w.put_bytes(e.data.data(), e.data.size() * sizeof(float));
    } else {
      std::vector<std::uint16_t> packed(e.data.size());
      for (std::size_t i = 0; i < e.data.size(); ++i) {
        check(std::isfinite(e.data[i]) && std::abs(e.data[i]) <= kHalfMax,
              "checkpoint: parameter \"", e.name, "\" value ", e.data[i],
              " overflows binary16");
        packed[i] = float_to_half_bits(e.data[i]);
      }
      w.put_bytes(packed.data(), packed.size() * sizeof(std::uint16_t));
    }
  }
  w.finish();
}

}  // namespace

void save_checkpoint(const ParamStore<float>& params,
                     const std::filesystem::path& path, CheckpointDType dtype) {
  std::vector<CheckpointEntry> entries;
  entries.reserve(params.items().size());
  for (const auto& p : params.items()) {
    CheckpointEntry e;
    e.name = p.name;
    e.shape = p.value.shape();
    const auto v = p.value.values();
    e.data.assign(v.begin(), v.end());
    entries.push_back(std::move(e));
  }
  write_entries(entries, path, dtype);
}

std::vector<CheckpointEntry> read_checkpoint(const std::filesystem::path& path) {
  Reader r(path);
  char magic[4];
  r.get_bytes(magic, 4, "magic");
  check(std::memcmp(magic, kMagic, 4) == 0, "checkpoint ", r.path(),
        ": bad magic, not a checkpoint file");
  const auto version = r.get<std::uint32_t>("version");
  check(version == kVersion, "checkpoint ", r.path(), ": unsupported version ",
        version);
  const auto count = r.get<std::uint32_t>("param count");
  check(count <= 100000, "checkpoint ", r.path(), ": implausible param count ", count);
  std::vector<CheckpointEntry> entries;
  entries.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    CheckpointEntry e;
    const auto name_len = r.get<std::uint32_t>("name length");
    check(name_len > 0 && name_len <= 4096, "checkpoint ", r.path(),
          ": bad name length ", name_len);
    e.name.resize(name_len);
    r.get_bytes(e.name.data(), name_len, "name");
    const auto dtype = r.get<std::uint8_t>("dtype");
    check(dtype <= 1, "checkpoint ", r.path(), ": unknown dtype ", int(dtype),
          " for \"", e.name, "\"");
    e.dtype = static_cast<CheckpointDType>(dtype);
    const auto rank = r.get<std::uint32_t>("rank");
    check(rank <= 8, "checkpoint ", r.path(), ": implausible rank ", rank);
    std::size_t numel = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      const auto dim = r.get<std::uint32_t>("dim");
      check(dim > 0 && dim <= (1u << 24), "checkpoint ", r.path(), ": bad dim ", dim);
      e.shape.push_back(static_cast<int>(dim));
      numel *= dim;
    }
    e.data.resize(numel);
    if (e.dtype == CheckpointDType::kF32) {
      r.get_bytes(e.data.data(), numel * sizeof(float), "data");
    } else {
      std::vector<std::uint16_t> packed(numel);
      r.get_bytes(packed.data(), numel * sizeof(std::uint16_t), "data");
      for (std::size_t j = 0; j < numel; ++j) e.data[j] = half_bits_to_float(packed[j]);
    }
    entries.push_back(std::move(e));
  }
  check(r.at_eof(), "checkpoint ", r.path(), ": trailing bytes after last parameter");
  return entries;
}

void load_checkpoint_into(ParamStore<float>& params,
                          const std::filesystem::path& path) {
  const auto entries = read_checkpoint(path);
  check(entries.size() == params.items().size(), "checkpoint ", path.string(), " has ",
        entries.size(), " parameters, model expects ", params.items().size());
  for (const auto& e : entries) {
    auto* p = params.find(e.name);
    check(p != nullptr, "checkpoint ", path.string(), ": model has no parameter \"",
          e.name, "\"");
    check(p->value.shape() == e.shape, "checkpoint ", path.string(), ": parameter \"",
          e.name, "\" has shape ", shape_str(e.shape), ", model expects ",
          shape_str(p->value.shape()));
    auto v = p->value.mutable_values();
    std::copy(e.data.begin(), e.data.end(), v.begin());
  }
}

void transcode_checkpoint(const std::filesystem::path& in,
                          const std::filesystem::path& out, CheckpointDType dtype) {
  write_entries(read_checkpoint(in), out, dtype);
}

}  // namespace egonav::nn
