#include "egonav/core/record.hpp"

#include <bit>
#include <cstring>

#include "egonav/common/error.hpp"

namespace egonav {

std::array<std::int32_t, kContextLength> context_for_frame(std::int32_t frame_id) {
  check(frame_id >= 0, "frame_id must be non-negative, got ", frame_id);
  std::array<std::int32_t, kContextLength> out{};
  for (int i = 0; i < kContextLength; ++i) {
    const std::int32_t id = frame_id - kContextLength + i;
    out[i] = id < 0 ? 0 : id;
  }
  return out;
}

nlohmann::json record_to_json(const Record& r) {
  nlohmann::json j;
  j["frame_id"] = r.frame_id;
  j["context_ids"] = r.context_ids;
  j["label"] = {{"left", r.label.left}, {"right", r.label.right}, {"front", r.label.front}};
  if (r.gps) j["gps"] = {{"lat", r.gps->lat}, {"lng", r.gps->lon}};
  if (r.intent_step) j["intent_step"] = *r.intent_step;
  j["scene_id"] = r.scene_id;
  j["t"] = r.t;
  return j;
}

Record record_from_json(const nlohmann::json& j) {
  Record r;
  r.frame_id = j.at("frame_id").get<std::int32_t>();
  const auto& ctx = j.at("context_ids");
  check(ctx.is_array() && ctx.size() == kContextLength, "context_ids must have ",
        kContextLength, " entries, got ", ctx.size());
  for (int i = 0; i < kContextLength; ++i) r.context_ids[i] = ctx[i].get<std::int32_t>();
  const auto& lab = j.at("label");
  r.label = {lab.at("left").get<bool>(), lab.at("right").get<bool>(),
             lab.at("front").get<bool>()};
  if (j.contains("gps") && !j["gps"].is_null()) {
    r.gps = GpsFix{j["gps"].at("lat").get<double>(), j["gps"].at("lng").get<double>()};
  }
  if (j.contains("intent_step") && !j["intent_step"].is_null()) {
    r.intent_step = j["intent_step"].get<std::int32_t>();
  }
  r.scene_id = j.at("scene_id").get<std::string>();
  r.t = j.at("t").get<double>();
  return r;
}

namespace {

constexpr std::uint16_t kRecordMagic = 0x4E52;  // "RN"
constexpr std::uint8_t kRecordVersion = 1;

template <class T>
void put(std::vector<std::uint8_t>& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  static_assert(std::endian::native == std::endian::little);
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <class T>
  T get(const char* what) {
    static_assert(std::is_trivially_copyable_v<T>);
    if (pos_ + sizeof(T) > bytes_.size()) {
      fail("record decode error at offset ", pos_, ": truncated while reading ", what);
    }
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string get_string(std::size_t n, const char* what) {
    if (pos_ + n > bytes_.size()) {
      fail("record decode error at offset ", pos_, ": truncated while reading ", what);
    }
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  std::size_t pos() const { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_record(const Record& r) {
  std::vector<std::uint8_t> out;
  out.reserve(96 + r.scene_id.size());
  put(out, kRecordMagic);
  put(out, kRecordVersion);
  put(out, r.frame_id);
  for (std::int32_t id : r.context_ids) put(out, id);
  put(out, r.label.bits());
  const std::uint8_t flags =
      static_cast<std::uint8_t>((r.gps ? 1 : 0) | (r.intent_step ? 2 : 0));
  put(out, flags);
  if (r.gps) {
    put(out, r.gps->lat);
    put(out, r.gps->lon);
  }
  if (r.intent_step) put(out, *r.intent_step);
  put(out, static_cast<std::uint32_t>(r.scene_id.size()));
  out.insert(out.end(), r.scene_id.begin(), r.scene_id.end());
  put(out, r.t);
  return out;
}

Record decode_record(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  const auto magic = in.get<std::uint16_t>("magic");
  if (magic != kRecordMagic) {
    fail("record decode error at offset 0: bad magic 0x", std::hex, magic);
  }
  const auto version = in.get<std::uint8_t>("version");
  if (version != kRecordVersion) {
    fail("record decode error at offset 2: unsupported version ", int(version));
  }
  Record r;
  r.frame_id = in.get<std::int32_t>("frame_id");
  for (auto& id : r.context_ids) id = in.get<std::int32_t>("context_ids");
  const std::size_t label_at = in.pos();
  const auto label_bits = in.get<std::uint8_t>("label");
  if ((label_bits & ~0x7u) != 0) {
    fail("record decode error at offset ", label_at, ": label bits out of range");
  }
  r.label = LabelVector::from_bits(label_bits);
  const std::size_t flags_at = in.pos();
  const auto flags = in.get<std::uint8_t>("flags");
  if ((flags & ~0x3u) != 0) {
    fail("record decode error at offset ", flags_at, ": unknown flags");
  }
  if (flags & 1) {
    GpsFix gps;
    gps.lat = in.get<double>("gps.lat");
    gps.lon = in.get<double>("gps.lng");
    r.gps = gps;
  }
  if (flags & 2) r.intent_step = in.get<std::int32_t>("intent_step");
  const auto name_len = in.get<std::uint32_t>("scene_id length");
  if (name_len > 4096) {
    fail("record decode error at offset ", in.pos() - 4, ": scene_id length ", name_len,
         " is implausible");
  }
  r.scene_id = in.get_string(name_len, "scene_id");
  r.t = in.get<double>("t");
  return r;
}

}  // namespace egonav
