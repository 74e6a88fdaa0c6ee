#include "streetscope/image.hpp"

#include <png.h>

#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "streetscope/errors.hpp"

namespace streetscope {

namespace {

constexpr int kMinDim = 16;

void check_dims(int w, int h) {
  if (w < kMinDim || h < kMinDim)
    throw DimensionError("image below 16x16: " + std::to_string(w) + "x" +
                         std::to_string(h));
}

// PGM header tokens are separated by whitespace; '#' starts a comment.
struct PgmScanner {
  const std::uint8_t* p;
  const std::uint8_t* end;

  void skip_space() {
    while (p < end) {
      if (std::isspace(*p)) {
        ++p;
      } else if (*p == '#') {
        while (p < end && *p != '\n') ++p;
      } else {
        break;
      }
    }
  }

  long next_int() {
    skip_space();
    if (p >= end || !std::isdigit(*p)) throw DecodeError("bad PGM header");
    long v = 0;
    while (p < end && std::isdigit(*p)) {
      v = v * 10 + (*p - '0');
      if (v > 1000000000L) throw DecodeError("PGM header value out of range");
      ++p;
    }
    return v;
  }
};

struct PngReadState {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t offset;
};

void png_read_fn(png_structp png, png_bytep out, png_size_t n) {
  auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (st->offset + n > st->size) png_error(png, "png truncated");
  std::memcpy(out, st->data + st->offset, n);
  st->offset += n;
}

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
  (void)msg;
  longjmp(png_jmpbuf(png), 1);
}

void png_warn_fn(png_structp, png_const_charp) {}

}  // namespace

GrayImage decode_pgm(const std::uint8_t* bytes, std::size_t n) {
  if (n < 2 || bytes[0] != 'P' || bytes[1] != '5')
    throw DecodeError("not a binary PGM (P5) file");
  PgmScanner sc{bytes + 2, bytes + n};
  const long w = sc.next_int();
  const long h = sc.next_int();
  const long maxval = sc.next_int();
  if (maxval != 255)
    throw DecodeError("unsupported PGM maxval " + std::to_string(maxval) +
                      " (only 255)");
  if (sc.p >= sc.end || !std::isspace(*sc.p))
    throw DecodeError("bad PGM header");
  ++sc.p;  // exactly one whitespace byte before the raster
  check_dims(static_cast<int>(w), static_cast<int>(h));
  const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (static_cast<std::size_t>(sc.end - sc.p) < need)
    throw DecodeError("PGM raster truncated");
  GrayImage img(static_cast<int>(w), static_cast<int>(h));
  std::memcpy(img.data.data(), sc.p, need);
  return img;
}

GrayImage decode_png(const std::uint8_t* bytes, std::size_t n) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                           png_error_fn, png_warn_fn);
  if (!png) throw DecodeError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw DecodeError("libpng init failed");
  }

  GrayImage img;
  PngReadState st{bytes, n, 0};
  std::vector<png_bytep> rows;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DecodeError("corrupt PNG");
  }

  png_set_read_fn(png, &st, png_read_fn);
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);

  if (color != PNG_COLOR_TYPE_GRAY || depth != 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DecodeError("only 8-bit grayscale PNG is supported");
  }
  if (w < kMinDim || h < kMinDim) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DimensionError("image below 16x16");
  }

  img = GrayImage(static_cast<int>(w), static_cast<int>(h));
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y)
    rows[y] = img.data.data() + static_cast<std::size_t>(y) * w;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

GrayImage load_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0)
    return decode_png(bytes.data(), bytes.size());
  return decode_pgm(bytes.data(), bytes.size());
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  char header[48];
  const int len = std::snprintf(header, sizeof header, "P5\n%d %d\n255\n",
                                img.width, img.height);
  std::vector<std::uint8_t> out;
  out.reserve(len + img.data.size());
  out.insert(out.end(), header, header + len);
  out.insert(out.end(), img.data.begin(), img.data.end());
  return out;
}

void write_pgm(const GrayImage& img, const std::string& path) {
  const auto bytes = encode_pgm(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path);
}

}  // namespace streetscope
