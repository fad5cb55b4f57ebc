#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace srfid::img {

/// Decoded 8-bit raster, row-major interleaved (R, G, B for 3 channels).
/// Immutable after construction.
class ImageBuffer {
 public:
  /// Throws ArgumentError unless width, height >= 1, channels in {1, 3} and
  /// data.size() == width * height * channels.
  ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> data);

  /// Image filled with one value per channel.
  static ImageBuffer filled(int width, int height, int channels, std::uint8_t value);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::size_t sample_count() const noexcept { return data_.size(); }

  std::uint8_t at(int x, int y, int c = 0) const noexcept {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  int width_;
  int height_;
  int channels_;
  std::vector<std::uint8_t> data_;
};

/// Single-channel floating plane, samples in [0, 255]. Used for luma and
/// for per-channel working copies inside filters and the degradation chain.
class LumaPlane {
 public:
  /// Values are clamped to [0, 255]. Throws ArgumentError on bad dimensions.
  LumaPlane(int width, int height, std::vector<double> data);
  static LumaPlane filled(int width, int height, double value);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::span<const double> data() const noexcept { return data_; }
  std::size_t size() const noexcept { return data_.size(); }

  double at(int x, int y) const noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  friend bool operator==(const LumaPlane&, const LumaPlane&) = default;

 private:
  int width_;
  int height_;
  std::vector<double> data_;
};

/// BT.601 luma: Y = 0.299 R + 0.587 G + 0.114 B; 1-channel input is copied.
LumaPlane to_luma(const ImageBuffer& img);

std::vector<LumaPlane> split_channels(const ImageBuffer& img);
/// Rounds to nearest and clamps; all planes must share dimensions.
ImageBuffer merge_channels(std::span<const LumaPlane> planes);

/// Copies a 1-channel image into 3 identical channels; 3-channel input is returned as is.
ImageBuffer to_rgb(const ImageBuffer& img);

ImageBuffer crop(const ImageBuffer& img, int x0, int y0, int width, int height);

}  // namespace srfid::img
