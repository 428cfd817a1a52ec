#include "egonav/labeling/labeling.hpp"

#include <algorithm>
#include <cmath>

#include "egonav/common/error.hpp"
#include "egonav/common/geometry.hpp"

namespace egonav::labeling {

double circular_delta(double h_from, double h_to) {
  double d = std::fmod(h_to - h_from + 540.0, 360.0);
  if (d < 0.0) d += 360.0;  // fmod keeps the sign of the dividend
  d -= 180.0;
  return d == -180.0 ? 180.0 : d;
}

HeadingSeries smooth_heading(const HeadingSeries& series, double window) {
  check(window >= 0.0, "smoothing window must be non-negative, got ", window);
  for (std::size_t i = 1; i < series.size(); ++i) {
    check(series[i].t > series[i - 1].t, "heading series times must increase, got ",
          series[i - 1].t, " then ", series[i].t);
  }
  const double half = window / 2.0 + 1e-9;
  HeadingSeries out(series.size());
  std::size_t lo = 0;
  std::size_t hi = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    while (series[i].t - series[lo].t > half) ++lo;
    while (hi < series.size() && series[hi].t - series[i].t <= half) ++hi;
    double sum_sin = 0.0;
    double sum_cos = 0.0;
    for (std::size_t j = lo; j < hi; ++j) {
      const double r = deg_to_rad(series[j].heading);
      sum_sin += std::sin(r);
      sum_cos += std::cos(r);
    }
    out[i] = {series[i].t, wrap_heading(rad_to_deg(std::atan2(sum_sin, sum_cos)))};
  }
  return out;
}

namespace {

// nearest sample by time; assumes coverage was checked by the caller
double heading_at(const HeadingSeries& series, double t) {
  const auto it = std::lower_bound(
      series.begin(), series.end(), t,
      [](const HeadingSample& s, double v) { return s.t < v; });
  if (it == series.begin()) return it->heading;
  if (it == series.end()) return (it - 1)->heading;
  const double after = it->t - t;
  const double before = t - (it - 1)->t;
  return before <= after ? (it - 1)->heading : it->heading;  // tie -> earlier
}

void check_covered(const HeadingSeries& series, double t, const char* what) {
  // allow up to half a nominal sample spacing of slack at the ends
  const double slack = 0.05 + 1e-9;
  if (t < series.front().t - slack || t > series.back().t + slack) {
    fail("turn_angle: ", what, " t=", t, " outside heading series [",
         series.front().t, ", ", series.back().t, "]");
  }
}

}  // namespace

double turn_angle(const HeadingSeries& series, double t, double interval) {
  check(!series.empty(), "turn_angle: empty heading series");
  check(interval > 0.0, "turn_angle: interval must be positive, got ", interval);
  check_covered(series, t, "start");
  check_covered(series, t + interval, "end");
  return circular_delta(heading_at(series, t), heading_at(series, t + interval));
}

LabelVector classify_angle(double angle_deg, double threshold) {
  LabelVector label;
  if (angle_deg > threshold) {
    label.right = true;
  } else if (angle_deg < -threshold) {
    label.left = true;
  } else {
    label.front = true;
  }
  return label;
}

LabelVector future_label(const HeadingSeries& series, double t, double horizon,
                         double interval, double threshold) {
  return classify_angle(turn_angle(series, t + horizon, interval), threshold);
}

std::vector<LabelVector> expand_intersection_labels(
    const std::vector<LabelVector>& labels, const std::vector<double>& times,
    const std::vector<TurnEvent>& events) {
  check(labels.size() == times.size(), "expand_intersection_labels: ", labels.size(),
        " labels vs ", times.size(), " times");
  std::vector<LabelVector> out = labels;
  for (const auto& ev : events) {
    check(ev.valid(), "expand_intersection_labels: invalid event at t=", ev.t_start);
    const double lo = ev.t_start - kExpandBeforeS;
    const double hi = ev.t_start + kExpandAfterS;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] >= lo && times[i] < hi) {
        for (DirClass d : ev.alternatives) out[i].set(d, true);
      }
    }
  }
  return out;
}

}  // namespace egonav::labeling
