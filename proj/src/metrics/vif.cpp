#include <cmath>

#include "srfid/common/error.hpp"
#include "srfid/imgcore/filter.hpp"
#include "srfid/metrics/metrics.hpp"
#include "window.hpp"

namespace srfid::metrics {

namespace {

constexpr double kNoiseVariance = 2.0;  // sigma_n^2 of the HVS channel
constexpr double kEps = 1e-10;
constexpr int kScales = 4;

}  // namespace

// Per scale k = 1..4 the Gaussian window has N = 2^(5-k) + 1 taps and
// std N / 5. From the second scale on, both images are low-passed with that
// window and decimated by 2 before the local statistics are taken.
// Filtering reflects at the borders so every scale keeps its full extent.
MetricValue vif(const img::LumaPlane& ref, const img::LumaPlane& dist) {
  if (ref.width() != dist.width() || ref.height() != dist.height()) {
    throw ArgumentError("vif: dimension mismatch");
  }
  if (ref.width() < 32 || ref.height() < 32) throw ArgumentError("vif needs images of at least 32x32");

  using namespace detail;
  Grid x = from_plane(ref);
  Grid y = from_plane(dist);
  double num = 0.0;
  double den = 0.0;

  for (int scale = 1; scale <= kScales; ++scale) {
    const int taps = (1 << (kScales + 1 - scale)) + 1;
    const auto win = img::gaussian_kernel(taps / 5.0, taps / 2);
    if (scale > 1) {
      x = downsample2(filter_same(x, win));
      y = downsample2(filter_same(y, win));
    }
    const Grid mu1 = filter_same(x, win);
    const Grid mu2 = filter_same(y, win);
    const Grid e11 = filter_same(multiply(x, x), win);
    const Grid e22 = filter_same(multiply(y, y), win);
    const Grid e12 = filter_same(multiply(x, y), win);

    for (std::size_t i = 0; i < mu1.v.size(); ++i) {
      double s1 = std::max(0.0, e11.v[i] - mu1.v[i] * mu1.v[i]);
      const double s2 = std::max(0.0, e22.v[i] - mu2.v[i] * mu2.v[i]);
      const double s12 = e12.v[i] - mu1.v[i] * mu2.v[i];

      double g = s12 / (s1 + kEps);
      double sv = s2 - g * s12;
      if (s1 < kEps) {
        g = 0.0;
        sv = s2;
        s1 = 0.0;
      }
      if (s2 < kEps) {
        g = 0.0;
        sv = 0.0;
      }
      if (g < 0.0) {
        sv = s2;
        g = 0.0;
      }
      if (sv <= kEps) sv = kEps;

      num += std::log10(1.0 + g * g * s1 / (sv + kNoiseVariance));
      den += std::log10(1.0 + s1 / kNoiseVariance);
    }
  }
  if (den == 0.0) throw DegenerateInputError("vif: reference has no variance (constant image)");
  return {"vif", num / den, Orientation::higher_is_better, false};
}

}  // namespace srfid::metrics
