#pragma once

#include <set>
#include <vector>

#include "egonav/core/label.hpp"

namespace egonav::labeling {

inline constexpr double kSmoothWindowS = 0.3;   // centered moving average
inline constexpr double kTurnIntervalS = 0.5;   // heading delta lookahead
inline constexpr double kTurnThresholdDeg = 5.0;
inline constexpr double kLabelHorizonS = 1.0;   // label reflects t + 1 s
inline constexpr double kExpandBeforeS = 1.0;   // intersection label window
inline constexpr double kExpandAfterS = 2.0;

struct HeadingSample {
  double t = 0.0;
  double heading = 0.0;  // degrees [0, 360), clockwise from north
};
using HeadingSeries = std::vector<HeadingSample>;

// a turn the walker actually executed, with the directions that were available
struct TurnEvent {
  double t_start = 0.0;
  double t_end = 0.0;
  DirClass direction = DirClass::kFront;    // kLeft or kRight
  std::set<DirClass> alternatives;          // includes `direction`

  bool valid() const {
    return t_end >= t_start && direction != DirClass::kFront &&
           alternatives.count(direction) > 0;
  }
};

// signed shortest rotation from `h_from` to `h_to`, degrees in (-180, 180];
// positive is clockwise, which reads as a RIGHT turn
double circular_delta(double h_from, double h_to);

// centered circular moving average over `window` seconds (truncated at the
// series ends); timestamps are preserved
HeadingSeries smooth_heading(const HeadingSeries& series, double window = kSmoothWindowS);

// heading(t + interval) - heading(t), nearest-sample lookup; throws when either
// endpoint falls outside the series
double turn_angle(const HeadingSeries& series, double t,
                  double interval = kTurnIntervalS);

// |angle| < threshold -> FRONT, otherwise LEFT or RIGHT by sign (exact
// threshold counts as FRONT)
LabelVector classify_angle(double angle_deg, double threshold = kTurnThresholdDeg);

// label for time t describing the maneuver at t + horizon
LabelVector future_label(const HeadingSeries& series, double t,
                         double horizon = kLabelHorizonS,
                         double interval = kTurnIntervalS,
                         double threshold = kTurnThresholdDeg);

// indoor multi-label expansion: for each event, every frame time within
// [t_start - kExpandBeforeS, t_start + kExpandAfterS) gets the event's
// alternatives OR-ed into its label
std::vector<LabelVector> expand_intersection_labels(
    const std::vector<LabelVector>& labels, const std::vector<double>& times,
    const std::vector<TurnEvent>& events);

}  // namespace egonav::labeling
