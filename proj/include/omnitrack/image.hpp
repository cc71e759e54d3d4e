#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace omni {

/// Interleaved 8-bit image with 1 (gray) or 3 (RGB) channels.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, std::uint8_t fill = 0);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }

  std::uint8_t* row(int r) { return data_.data() + static_cast<std::size_t>(r) * width_ * channels_; }
  const std::uint8_t* row(int r) const {
    return data_.data() + static_cast<std::size_t>(r) * width_ * channels_;
  }
  std::uint8_t& at(int r, int c, int ch = 0) { return row(r)[c * channels_ + ch]; }
  std::uint8_t at(int r, int c, int ch = 0) const { return row(r)[c * channels_ + ch]; }

  std::vector<std::uint8_t>& data() { return data_; }
  const std::vector<std::uint8_t>& data() const { return data_; }

  bool operator==(const Image&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Decodes gray, gray+alpha, RGB, RGBA or palette PNGs at 8 bits; alpha is
/// dropped and palettes expanded. Throws IoError with the path on failure.
Image read_png(const std::filesystem::path& path);
Image decode_png(std::span<const std::uint8_t> bytes);

/// Deterministic encoding: identical pixels always give identical bytes.
void write_png(const std::filesystem::path& path, const Image& img, int compression = 3);
std::vector<std::uint8_t> encode_png(const Image& img, int compression = 1);

}  // namespace omni
