#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "egonav/core/frame.hpp"
#include "egonav/core/label.hpp"
#include "egonav/core/sensor.hpp"
#include "egonav/intent/intent.hpp"
#include "egonav/models/models.hpp"

namespace egonav::runtime {

inline constexpr double kScoreThreshold = 0.5;
inline constexpr int kCommandHysteresis = 2;

// classes scoring above threshold; nothing above -> treat as FRONT
LabelVector active_set(const ScoreVector& scores,
                       double threshold = kScoreThreshold);

// spoken phrase for an active set
std::string command_text(const LabelVector& set);

// debouncer: a command goes out once the same active set has held for
// `depth` consecutive frames and differs from whatever was last spoken
class CommandGate {
 public:
  explicit CommandGate(int depth = kCommandHysteresis,
                       double threshold = kScoreThreshold);

  std::optional<std::string> push(const ScoreVector& scores);
  void reset();

 private:
  int depth_;
  double threshold_;
  int pending_bits_ = -1;
  int count_ = 0;
  int emitted_bits_ = -1;
};

struct LatencySummary {
  std::size_t calls = 0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  double max_ms = 0.0;
};

// owns the warm-up ring buffer for a single 2 Hz stream; early frames repeat
// the oldest frame seen, mirroring how training context is padded
class StreamRunner {
 public:
  StreamRunner(std::shared_ptr<models::Model<float>> model,
               std::optional<intent::Route> route);

  ScoreVector step(const Frame& frame,
                   const std::optional<GpsFix>& gps = std::nullopt);

  const std::vector<double>& latencies_ms() const { return latencies_ms_; }
  LatencySummary latency_summary() const;

 private:
  std::shared_ptr<models::Model<float>> model_;
  std::optional<intent::Route> route_;
  std::vector<Frame> window_;  // oldest first, at most context_length + 1
  std::vector<double> latencies_ms_;
};

}  // namespace egonav::runtime
