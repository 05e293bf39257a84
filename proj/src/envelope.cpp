#include "nilcount/envelope.hpp"

#include <cmath>
#include <limits>

#include "nilcount/error.hpp"

namespace nilcount {

EnvelopeFit fit_envelope(std::span<const double> x, std::span<const double> y, int min_windows) {
  if (x.size() != y.size()) fail(Errc::dimension_mismatch, "envelope fit needs matching x and y");
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !std::isfinite(y[i])) fail(Errc::domain, "envelope fit needs x > 0 and finite y");
    if (i > 0 && !(x[i] > x[i - 1])) fail(Errc::domain, "envelope fit needs strictly increasing x");
  }
  EnvelopeFit fit;
  if (x.size() < 2) return fit;
  bool all_zero = true;
  for (double v : y) all_zero = all_zero && v == 0;
  if (all_zero) {
    fit.status = EnvelopeFit::Status::zero;
    fit.slope = -std::numeric_limits<double>::infinity();
    return fit;
  }

  const double lo = std::log2(x.front()), span = std::log2(x.back()) - lo;
  int k = 1;
  while (span * k < min_windows) ++k;
  fit.window_width = 1.0 / k;
  const int count = std::max(1, static_cast<int>(std::ceil(span * k - 1e-12)));
  std::vector<double> best(count, 0.0), at(count, 0.0);
  for (size_t i = 0; i < x.size(); ++i) {
    const int w = std::min(count - 1, static_cast<int>((std::log2(x[i]) - lo) * k));
    if (std::abs(y[i]) > best[w]) {
      best[w] = std::abs(y[i]);
      at[w] = x[i];
    }
  }
  for (int w = 0; w < count; ++w)
    if (best[w] > 0) {
      fit.window_x.push_back(at[w]);
      fit.window_max.push_back(best[w]);
    }
  fit.windows = static_cast<int>(fit.window_x.size());
  if (fit.windows < 2) return fit;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < fit.windows; ++i) {
    const double lx = std::log(fit.window_x[i]), ly = std::log(fit.window_max[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = fit.windows;
  const double den = n * sxx - sx * sx;
  if (!(den > 0)) return fit;
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.status = EnvelopeFit::Status::ok;
  return fit;
}

}  // namespace nilcount
