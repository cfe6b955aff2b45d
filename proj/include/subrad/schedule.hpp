#pragma once

#include <cmath>
#include <vector>

#include "subrad/common.hpp"

// Piecewise-linear protocol for the quantization-axis angle theta(t) and
// the Zeeman splitting Delta(t). The axis rotates in the yz-plane; theta
// is the angle between the axis and the chain direction (+y), so theta =
// pi/2 is the perpendicular starting configuration.

namespace subrad {

struct ScheduleSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  double theta_start = 0.0;
  double theta_end = 0.0;
  double delta = 0.0;  // Zeeman splitting, units of gamma

  bool flat() const { return theta_start == theta_end; }
  double duration() const { return t_end - t_start; }
};

class FieldSchedule {
 public:
  static FieldSchedule constant(double theta, double delta, double t_end,
                                double t_start = 0.0) {
    FieldSchedule s;
    s.segments_.push_back({t_start, t_end, theta, theta, delta});
    s.validate();
    return s;
  }

  // Linear ramp from the current angle over the given duration.
  FieldSchedule& ramp_to(double theta, double duration, double delta) {
    const auto& last = segments_.back();
    segments_.push_back(
        {last.t_end, last.t_end + duration, last.theta_end, theta, delta});
    validate();
    return *this;
  }

  // Hold the current angle until t_end.
  FieldSchedule& hold_until(double t_end, double delta) {
    const auto& last = segments_.back();
    segments_.push_back(
        {last.t_end, t_end, last.theta_end, last.theta_end, delta});
    validate();
    return *this;
  }

  const std::vector<ScheduleSegment>& segments() const { return segments_; }
  double t_start() const { return segments_.front().t_start; }
  double t_end() const { return segments_.back().t_end; }

  double theta_at(double t) const {
    const ScheduleSegment& s = segment_at(t);
    if (s.flat()) return s.theta_start;
    const double x = (t - s.t_start) / s.duration();
    return s.theta_start + x * (s.theta_end - s.theta_start);
  }

  double delta_at(double t) const { return segment_at(t).delta; }

 private:
  const ScheduleSegment& segment_at(double t) const {
    if (t <= segments_.front().t_start) return segments_.front();
    for (const auto& s : segments_)
      if (t <= s.t_end) return s;
    return segments_.back();
  }

  void validate() const {
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      const auto& s = segments_[i];
      if (!(s.t_end > s.t_start))
        throw std::invalid_argument("FieldSchedule: segment times must increase");
      if (i > 0) {
        if (s.t_start != segments_[i - 1].t_end)
          throw std::invalid_argument("FieldSchedule: segments must be contiguous");
        if (s.theta_start != segments_[i - 1].theta_end)
          throw std::invalid_argument("FieldSchedule: theta must be continuous");
      }
    }
  }

  std::vector<ScheduleSegment> segments_;
};

// Quantization axis for a scheduled angle: rotation in the yz-plane, with
// theta measured from the chain direction (+y). theta = pi/2 gives +z.
inline Vec3 axis_for_theta(double theta) {
  return Vec3(0.0, std::cos(theta), std::sin(theta));
}

}  // namespace subrad
