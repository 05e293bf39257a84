#pragma once

#include <span>
#include <vector>

namespace nilcount {

// Slope of log(envelope) against log(x), where the envelope is the maximum of
// |y| over windows of equal width in log2(x). Used for both transform decay
// and count discrepancy, whose raw values pass through zeros.
struct EnvelopeFit {
  enum class Status { ok, undefined, zero };
  Status status = Status::undefined;
  double slope = 0;
  double intercept = 0;
  double window_width = 0;  // in log2 units
  int windows = 0;          // windows with a positive maximum
  std::vector<double> window_x, window_max;
};

EnvelopeFit fit_envelope(std::span<const double> x, std::span<const double> y, int min_windows = 8);

}  // namespace nilcount
