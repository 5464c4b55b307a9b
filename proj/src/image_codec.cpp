#include "netdiffusion/image_codec.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <vector>

#include "netdiffusion/errors.hpp"

namespace netdiff {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Rgb trit_to_pixel(Trit t) {
  switch (t) {
    case 1: return kColorSet;
    case 0: return kColorUnset;
    default: return kColorVacant;
  }
}

int dist2(Rgb a, Rgb b) {
  int dr = int(a.r) - b.r, dg = int(a.g) - b.g, db = int(a.b) - b.b;
  return dr * dr + dg * dg + db * db;
}

}  // namespace

Trit pixel_to_trit(Rgb px) {
  int d_set = dist2(px, kColorSet);
  int d_unset = dist2(px, kColorUnset);
  int d_vacant = dist2(px, kColorVacant);
  int best = std::min({d_set, d_unset, d_vacant});
  int hits = (d_set == best) + (d_unset == best) + (d_vacant == best);
  if (hits > 1) return -1;  // tie
  if (best == d_set) return 1;
  if (best == d_unset) return 0;
  return -1;
}

void matrix_to_image(const NprintMatrix& m, const std::filesystem::path& path) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  FilePtr fp(std::fopen(tmp.c_str(), "wb"));
  if (!fp) throw IoError("cannot open " + tmp.string() + " for writing");

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG write failed: " + tmp.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, layout::kRowBits, layout::kMaxRows, 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<uint8_t> scanline(size_t(layout::kRowBits) * 3);
  for (int r = 0; r < layout::kMaxRows; ++r) {
    auto row = m.row(r);
    for (int c = 0; c < layout::kRowBits; ++c) {
      Rgb px = trit_to_pixel(row[c]);
      scanline[size_t(c) * 3] = px.r;
      scanline[size_t(c) * 3 + 1] = px.g;
      scanline[size_t(c) * 3 + 2] = px.b;
    }
    png_write_row(png, scanline.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  fp.reset();

  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename to " + path.string() + " failed: " + ec.message());
}

NprintMatrix image_to_matrix(const std::filesystem::path& path, bool strict) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path.string());

  uint8_t sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw FormatError(path.string() +
                      ": not a PNG file (lossless RGB PNG required)");
  }

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("PNG read failed: " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  png_uint_32 width = png_get_image_width(png, info);
  png_uint_32 height = png_get_image_height(png, info);
  if (width != layout::kRowBits || height != layout::kMaxRows) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError(path.string() + ": image must be 1088x1024, got " +
                    std::to_string(width) + "x" + std::to_string(height));
  }

  // Normalize palette/gray/16-bit/alpha variants to 8-bit RGB.
  png_byte color_type = png_get_color_type(png, info);
  png_byte bit_depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_GRAY ||
      color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  if (png_get_rowbytes(png, info) != size_t(layout::kRowBits) * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(path.string() + ": could not normalize to 8-bit RGB");
  }

  NprintMatrix m;
  std::vector<uint8_t> scanline(size_t(layout::kRowBits) * 3);
  int bad_pixel_row = -1, bad_pixel_col = -1;
  for (int r = 0; r < layout::kMaxRows; ++r) {
    png_read_row(png, scanline.data(), nullptr);
    auto row = m.row(r);
    for (int c = 0; c < layout::kRowBits; ++c) {
      Rgb px{scanline[size_t(c) * 3], scanline[size_t(c) * 3 + 1],
             scanline[size_t(c) * 3 + 2]};
      if (strict && px != kColorSet && px != kColorUnset && px != kColorVacant) {
        if (bad_pixel_row < 0) {
          bad_pixel_row = r;
          bad_pixel_col = c;
        }
      }
      row[c] = pixel_to_trit(px);
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (bad_pixel_row >= 0) {
    throw DataError(path.string() + ": non-canonical pixel at row " +
                    std::to_string(bad_pixel_row) + ", col " +
                    std::to_string(bad_pixel_col) +
                    " (lossy-damaged image; use lenient mode to quantize)");
  }

  int last = -1;
  for (int r = 0; r < layout::kMaxRows; ++r) {
    for (int c = 0; c < layout::kRowBits; ++c) {
      if (m.at(r, c) != -1) {
        last = r;
        break;
      }
    }
  }
  m.n_real = last + 1;
  return m;
}

}  // namespace netdiff
