#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace streetscope {

// 8-bit grayscale frame, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  std::size_t size() const { return data.size(); }

  bool operator==(const GrayImage&) const = default;
};

// Decodes binary PGM (P5, maxval 255) or 8-bit grayscale PNG, dispatching on
// file content. Color, palette, 16-bit and alpha inputs are rejected.
// Throws DecodeError / DimensionError (images below 16x16).
GrayImage load_image(const std::string& path);

// Canonical output format; round-trips load_image bit-exactly.
void write_pgm(const GrayImage& img, const std::string& path);

GrayImage decode_pgm(const std::uint8_t* bytes, std::size_t n);
GrayImage decode_png(const std::uint8_t* bytes, std::size_t n);
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);

}  // namespace streetscope
