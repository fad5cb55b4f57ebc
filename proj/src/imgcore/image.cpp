#include "srfid/imgcore/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "srfid/common/error.hpp"

namespace srfid::img {

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw ArgumentError("image dimensions must be >= 1, got " + std::to_string(width) +
                        "x" + std::to_string(height));
  }
}

std::uint8_t quantize(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_dims(width, height);
  if (channels != 1 && channels != 3) {
    throw ArgumentError("channels must be 1 or 3, got " + std::to_string(channels));
  }
  const auto expected = static_cast<std::size_t>(width) * height * channels;
  if (data_.size() != expected) {
    throw ArgumentError("image data has " + std::to_string(data_.size()) +
                        " samples, expected " + std::to_string(expected));
  }
}

ImageBuffer ImageBuffer::filled(int width, int height, int channels, std::uint8_t value) {
  check_dims(width, height);
  return ImageBuffer(width, height, channels,
                     std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height * channels, value));
}

LumaPlane::LumaPlane(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw ArgumentError("plane data size does not match " + std::to_string(width) + "x" +
                        std::to_string(height));
  }
  for (double& v : data_) v = std::clamp(v, 0.0, 255.0);
}

LumaPlane LumaPlane::filled(int width, int height, double value) {
  check_dims(width, height);
  return LumaPlane(width, height, std::vector<double>(static_cast<std::size_t>(width) * height, value));
}

LumaPlane to_luma(const ImageBuffer& img) {
  const auto n = static_cast<std::size_t>(img.width()) * img.height();
  std::vector<double> out(n);
  const auto src = img.data();
  if (img.channels() == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = src[i];
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = 0.299 * src[3 * i] + 0.587 * src[3 * i + 1] + 0.114 * src[3 * i + 2];
    }
  }
  return LumaPlane(img.width(), img.height(), std::move(out));
}

std::vector<LumaPlane> split_channels(const ImageBuffer& img) {
  const auto n = static_cast<std::size_t>(img.width()) * img.height();
  const int c = img.channels();
  std::vector<LumaPlane> planes;
  planes.reserve(c);
  const auto src = img.data();
  for (int ch = 0; ch < c; ++ch) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = src[i * c + ch];
    planes.emplace_back(img.width(), img.height(), std::move(v));
  }
  return planes;
}

ImageBuffer merge_channels(std::span<const LumaPlane> planes) {
  if (planes.size() != 1 && planes.size() != 3) {
    throw ArgumentError("merge_channels needs 1 or 3 planes");
  }
  const int w = planes[0].width();
  const int h = planes[0].height();
  for (const auto& p : planes) {
    if (p.width() != w || p.height() != h) throw ArgumentError("plane dimensions differ");
  }
  const auto n = static_cast<std::size_t>(w) * h;
  const auto c = planes.size();
  std::vector<std::uint8_t> out(n * c);
  for (std::size_t ch = 0; ch < c; ++ch) {
    const auto src = planes[ch].data();
    for (std::size_t i = 0; i < n; ++i) out[i * c + ch] = quantize(src[i]);
  }
  return ImageBuffer(w, h, static_cast<int>(c), std::move(out));
}

ImageBuffer to_rgb(const ImageBuffer& img) {
  if (img.channels() == 3) return img;
  const auto src = img.data();
  std::vector<std::uint8_t> out(src.size() * 3);
  for (std::size_t i = 0; i < src.size(); ++i) {
    out[3 * i] = out[3 * i + 1] = out[3 * i + 2] = src[i];
  }
  return ImageBuffer(img.width(), img.height(), 3, std::move(out));
}

ImageBuffer crop(const ImageBuffer& img, int x0, int y0, int width, int height) {
  if (x0 < 0 || y0 < 0 || width < 1 || height < 1 || x0 + width > img.width() ||
      y0 + height > img.height()) {
    throw ArgumentError("crop rectangle outside image");
  }
  const int c = img.channels();
  std::vector<std::uint8_t> out(static_cast<std::size_t>(width) * height * c);
  const auto src = img.data();
  for (int y = 0; y < height; ++y) {
    const auto* row = src.data() + (static_cast<std::size_t>(y0 + y) * img.width() + x0) * c;
    std::copy(row, row + static_cast<std::size_t>(width) * c,
              out.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(y) * width * c));
  }
  return ImageBuffer(width, height, c, std::move(out));
}

}  // namespace srfid::img
