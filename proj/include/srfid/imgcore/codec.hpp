#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "srfid/imgcore/image.hpp"

namespace srfid::img {

struct ImageFormat {
  enum class Kind { png, jpeg };
  Kind kind = Kind::png;
  int quality = 95;  // jpeg only, 1..100

  static ImageFormat png() { return {Kind::png, 0}; }
  static ImageFormat jpeg(int quality) { return {Kind::jpeg, quality}; }
};

/// Loads a PNG or JPEG. 16-bit PNG samples keep their high byte, alpha is
/// dropped, palettes are expanded. Throws IoError if the file cannot be
/// read and FormatError for unknown or corrupt data.
ImageBuffer load_image(const std::filesystem::path& path);
ImageBuffer decode_image(std::span<const std::uint8_t> bytes);

/// Throws ArgumentError for a JPEG quality outside 1..100 and IoError when
/// the file cannot be written.
void save_image(const ImageBuffer& img, const std::filesystem::path& path, ImageFormat format);
std::vector<std::uint8_t> encode_image(const ImageBuffer& img, ImageFormat format);

}  // namespace srfid::img
