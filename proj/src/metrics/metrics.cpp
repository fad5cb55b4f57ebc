#include "srfid/metrics/metrics.hpp"

#include <cmath>
#include <limits>

#include "srfid/common/error.hpp"
#include "srfid/imgcore/filter.hpp"
#include "window.hpp"

namespace srfid::metrics {

namespace detail {

Grid from_plane(const img::LumaPlane& p) {
  return Grid{p.width(), p.height(), std::vector<double>(p.data().begin(), p.data().end())};
}

Grid multiply(const Grid& a, const Grid& b) {
  Grid out{a.width, a.height, std::vector<double>(a.v.size())};
  for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
  return out;
}

Grid filter_valid(const Grid& g, std::span<const double> k) {
  const int n = static_cast<int>(k.size());
  const int ow = g.width - n + 1;
  const int oh = g.height - n + 1;
  Grid tmp{ow, g.height, std::vector<double>(static_cast<std::size_t>(ow) * g.height)};
  for (int y = 0; y < g.height; ++y) {
    const double* row = g.v.data() + static_cast<std::size_t>(y) * g.width;
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += k[i] * row[x + i];
      tmp.v[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  Grid out{ow, oh, std::vector<double>(static_cast<std::size_t>(ow) * oh)};
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += k[j] * tmp.v[static_cast<std::size_t>(y + j) * ow + x];
      out.v[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

Grid filter_same(const Grid& g, std::span<const double> k) {
  const int r = static_cast<int>(k.size() / 2);
  Grid tmp{g.width, g.height, std::vector<double>(g.v.size())};
  for (int y = 0; y < g.height; ++y) {
    const double* row = g.v.data() + static_cast<std::size_t>(y) * g.width;
    for (int x = 0; x < g.width; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * row[img::reflect_index(x + i, g.width)];
      tmp.v[static_cast<std::size_t>(y) * g.width + x] = acc;
    }
  }
  Grid out{g.width, g.height, std::vector<double>(g.v.size())};
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      double acc = 0.0;
      for (int j = -r; j <= r; ++j) {
        acc += k[j + r] * tmp.v[static_cast<std::size_t>(img::reflect_index(y + j, g.height)) * g.width + x];
      }
      out.v[static_cast<std::size_t>(y) * g.width + x] = acc;
    }
  }
  return out;
}

Grid downsample2(const Grid& g) {
  const int w = (g.width + 1) / 2;
  const int h = (g.height + 1) / 2;
  Grid out{w, h, std::vector<double>(static_cast<std::size_t>(w) * h)};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.v[static_cast<std::size_t>(y) * w + x] = g.at(2 * x, 2 * y);
  return out;
}

}  // namespace detail

namespace {

void require_same_dims(const img::LumaPlane& a, const img::LumaPlane& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ArgumentError(std::string(what) + ": dimension mismatch (" + std::to_string(a.width()) + "x" +
                        std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                        std::to_string(b.height()) + ")");
  }
}

}  // namespace

std::string_view to_string(MetricKind kind) noexcept {
  switch (kind) {
    case MetricKind::psnr: return "psnr";
    case MetricKind::ssim: return "ssim";
    case MetricKind::vif: return "vif";
  }
  return "?";
}

MetricKind parse_metric(std::string_view name) {
  for (MetricKind k : {MetricKind::psnr, MetricKind::ssim, MetricKind::vif}) {
    if (to_string(k) == name) return k;
  }
  throw ArgumentError("unknown metric '" + std::string(name) + "' (psnr|ssim|vif)");
}

std::vector<MetricKind> parse_metric_list(std::string_view list) {
  std::vector<MetricKind> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    const auto token = list.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (!token.empty()) out.push_back(parse_metric(token));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw ArgumentError("empty metric list");
  return out;
}

double mse(const img::LumaPlane& a, const img::LumaPlane& b) {
  require_same_dims(a, b, "mse");
  const auto x = a.data();
  const auto y = b.data();
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc / static_cast<double>(x.size());
}

MetricValue psnr(const img::LumaPlane& a, const img::LumaPlane& b) {
  const double e = mse(a, b);
  MetricValue out{"psnr", 0.0, Orientation::higher_is_better, false};
  if (e == 0.0) {
    out.value = std::numeric_limits<double>::infinity();
    out.infinite = true;
  } else {
    out.value = 10.0 * std::log10(kPeak * kPeak / e);
  }
  return out;
}

MetricValue ssim(const img::LumaPlane& a, const img::LumaPlane& b) {
  require_same_dims(a, b, "ssim");
  constexpr int kWindow = 11;
  if (a.width() < kWindow || a.height() < kWindow) {
    throw ArgumentError("ssim needs images of at least 11x11");
  }
  constexpr double c1 = (0.01 * kPeak) * (0.01 * kPeak);
  constexpr double c2 = (0.03 * kPeak) * (0.03 * kPeak);
  const auto win = img::gaussian_kernel(1.5, kWindow / 2);

  using namespace detail;
  const Grid x = from_plane(a);
  const Grid y = from_plane(b);
  const Grid mx = filter_valid(x, win);
  const Grid my = filter_valid(y, win);
  const Grid sxx = filter_valid(multiply(x, x), win);
  const Grid syy = filter_valid(multiply(y, y), win);
  const Grid sxy = filter_valid(multiply(x, y), win);

  double total = 0.0;
  for (std::size_t i = 0; i < mx.v.size(); ++i) {
    const double mu_x = mx.v[i];
    const double mu_y = my.v[i];
    const double var_x = sxx.v[i] - mu_x * mu_x;
    const double var_y = syy.v[i] - mu_y * mu_y;
    const double cov = sxy.v[i] - mu_x * mu_y;
    total += ((2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)) /
             ((mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2));
  }
  return {"ssim", total / static_cast<double>(mx.v.size()), Orientation::higher_is_better, false};
}

MetricValue compute(MetricKind kind, const img::LumaPlane& ref, const img::LumaPlane& dist) {
  switch (kind) {
    case MetricKind::psnr: return psnr(ref, dist);
    case MetricKind::ssim: return ssim(ref, dist);
    case MetricKind::vif: return vif(ref, dist);
  }
  throw ArgumentError("unknown metric");
}

}  // namespace srfid::metrics
