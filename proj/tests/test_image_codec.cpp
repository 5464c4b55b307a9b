#include <doctest.h>

#include <filesystem>

#include "craft.hpp"
#include "netdiffusion/errors.hpp"
#include "netdiffusion/image_codec.hpp"

#include <png.h>

#include <cstdio>

using namespace netdiff;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "netdiff_image_tests";
    fs::create_directories(d);
    return d;
  }();
  return dir / name;
}

void write_png(const fs::path& path, int width, int height,
               const std::vector<uint8_t>& rgb) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  REQUIRE(fp);
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  REQUIRE(setjmp(png_jmpbuf(png)) == 0);
  png_init_io(png, fp);
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < height; ++r) {
    png_write_row(png, const_cast<uint8_t*>(rgb.data() + size_t(r) * width * 3));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

}  // namespace

TEST_CASE("nearest-color mapping with ties decoding as vacant") {
  CHECK(pixel_to_trit({0, 255, 0}) == 1);
  CHECK(pixel_to_trit({255, 0, 0}) == 0);
  CHECK(pixel_to_trit({128, 128, 128}) == -1);
  CHECK(pixel_to_trit({10, 250, 10}) == 1);   // near green
  CHECK(pixel_to_trit({250, 10, 10}) == 0);   // near red
  CHECK(pixel_to_trit({120, 120, 120}) == -1);
  // R == G is equidistant between red and green: a tie decodes vacant.
  CHECK(pixel_to_trit({255, 255, 0}) == -1);
}

TEST_CASE("nearest-color oracle over a perturbation grid") {
  // Independent check: brute-force distances against all three anchors.
  const Rgb anchors[3] = {kColorSet, kColorUnset, kColorVacant};
  const Trit values[3] = {1, 0, -1};
  for (int a = 0; a < 3; ++a) {
    for (int dr = -40; dr <= 40; dr += 20) {
      for (int dg = -40; dg <= 40; dg += 20) {
        for (int db = -40; db <= 40; db += 20) {
          int r = std::clamp(int(anchors[a].r) + dr, 0, 255);
          int g = std::clamp(int(anchors[a].g) + dg, 0, 255);
          int b = std::clamp(int(anchors[a].b) + db, 0, 255);
          Rgb px{uint8_t(r), uint8_t(g), uint8_t(b)};
          long best = -1;
          int best_at = -1, best_hits = 0;
          for (int k = 0; k < 3; ++k) {
            long dd = long(px.r - anchors[k].r) * (px.r - anchors[k].r) +
                      long(px.g - anchors[k].g) * (px.g - anchors[k].g) +
                      long(px.b - anchors[k].b) * (px.b - anchors[k].b);
            if (best < 0 || dd < best) {
              best = dd;
              best_at = k;
              best_hits = 1;
            } else if (dd == best) {
              ++best_hits;
            }
          }
          Trit expected = best_hits > 1 ? Trit{-1} : values[best_at];
          CHECK(pixel_to_trit(px) == expected);
        }
      }
    }
  }
}

TEST_CASE("image roundtrip is exact for canonical colors") {
  Rng rng(derive_seed(21, 0x1A6));
  FlowTrace f = craft::random_flow(rng);
  NprintMatrix m = encode_flow(f);
  fs::path path = temp_file("roundtrip.png");
  matrix_to_image(m, path);
  NprintMatrix back = image_to_matrix(path);
  CHECK(back == m);
}

TEST_CASE("pixel histogram equals trit histogram") {
  Rng rng(derive_seed(22, 0x1A6));
  NprintMatrix m = encode_flow(craft::random_flow(rng));
  size_t trit_counts[3] = {0, 0, 0};
  for (int r = 0; r < layout::kMaxRows; ++r) {
    for (Trit t : m.row(r)) ++trit_counts[t + 1];
  }
  fs::path path = temp_file("histogram.png");
  matrix_to_image(m, path);
  NprintMatrix back = image_to_matrix(path);
  size_t back_counts[3] = {0, 0, 0};
  for (int r = 0; r < layout::kMaxRows; ++r) {
    for (Trit t : back.row(r)) ++back_counts[t + 1];
  }
  for (int k = 0; k < 3; ++k) CHECK(trit_counts[k] == back_counts[k]);
}

TEST_CASE("all-padding matrix becomes a uniform gray image") {
  NprintMatrix m;  // n_real = 0
  fs::path path = temp_file("gray.png");
  matrix_to_image(m, path);
  NprintMatrix back = image_to_matrix(path);
  CHECK(back.n_real == 0);
  for (int r = 0; r < layout::kMaxRows; ++r) {
    for (Trit t : back.row(r)) CHECK(t == -1);
  }
}

TEST_CASE("TCP-only flow leaves UDP/ICMP bands uniformly gray") {
  auto flows = craft::streaming_corpus(1, 99);
  NprintMatrix m = encode_flow(flows[0]);
  fs::path path = temp_file("tcp_bands.png");
  matrix_to_image(m, path);
  NprintMatrix back = image_to_matrix(path);
  for (int r = 0; r < layout::kMaxRows; ++r) {
    for (int c = layout::kUdp.offset; c < layout::kRowBits; ++c) {
      CHECK(back.at(r, c) == -1);
    }
  }
}

TEST_CASE("wrong dimensions are a data error") {
  fs::path path = temp_file("small.png");
  std::vector<uint8_t> rgb(512 * 512 * 3, 90);
  write_png(path, 512, 512, rgb);
  CHECK_THROWS_AS(image_to_matrix(path), DataError);
}

TEST_CASE("non-PNG input is a format error") {
  fs::path path = temp_file("not_png.png");
  {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    std::fputs("JFIF-ish bytes, definitely not a PNG", fp);
    std::fclose(fp);
  }
  CHECK_THROWS_AS(image_to_matrix(path), FormatError);
}

TEST_CASE("strict mode rejects noisy pixels; lenient mode quantizes") {
  std::vector<uint8_t> rgb(size_t(layout::kRowBits) * layout::kMaxRows * 3);
  for (size_t i = 0; i < rgb.size(); i += 3) {
    rgb[i] = 128;
    rgb[i + 1] = 128;
    rgb[i + 2] = 128;
  }
  // Row 0, column 0: a slightly-off green as a generator would emit.
  rgb[0] = 10;
  rgb[1] = 250;
  rgb[2] = 10;
  fs::path path = temp_file("noisy.png");
  write_png(path, layout::kRowBits, layout::kMaxRows, rgb);
  CHECK_THROWS_AS(image_to_matrix(path, /*strict=*/true), DataError);
  NprintMatrix m = image_to_matrix(path, /*strict=*/false);
  CHECK(m.at(0, 0) == 1);
  CHECK(m.n_real == 1);
}

TEST_CASE("lenient decoding is idempotent") {
  // decode(encode(decode(x))) == decode(x) for a noisy input.
  std::vector<uint8_t> rgb(size_t(layout::kRowBits) * layout::kMaxRows * 3);
  Rng rng(derive_seed(23, 0x1A6));
  for (size_t i = 0; i < rgb.size(); i += 3) {
    int pick = int(rng.below(3));
    Rgb base = pick == 0 ? kColorSet : pick == 1 ? kColorUnset : kColorVacant;
    rgb[i] = uint8_t(std::clamp(int(base.r) + int(rng.below(21)) - 10, 0, 255));
    rgb[i + 1] =
        uint8_t(std::clamp(int(base.g) + int(rng.below(21)) - 10, 0, 255));
    rgb[i + 2] =
        uint8_t(std::clamp(int(base.b) + int(rng.below(21)) - 10, 0, 255));
  }
  fs::path noisy = temp_file("idempotent_in.png");
  write_png(noisy, layout::kRowBits, layout::kMaxRows, rgb);
  NprintMatrix once = image_to_matrix(noisy, false);
  fs::path clean = temp_file("idempotent_clean.png");
  matrix_to_image(once, clean);
  NprintMatrix twice = image_to_matrix(clean, false);
  // n_real may tighten after quantization; compare cell-by-cell.
  for (int r = 0; r < layout::kMaxRows; ++r) {
    for (int c = 0; c < layout::kRowBits; ++c) {
      CHECK(once.at(r, c) == twice.at(r, c));
    }
  }
}
