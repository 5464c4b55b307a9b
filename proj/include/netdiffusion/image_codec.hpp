#ifndef NETDIFF_IMAGE_CODEC_HPP
#define NETDIFF_IMAGE_CODEC_HPP

#include <filesystem>

#include "netdiffusion/nprint.hpp"

namespace netdiff {

// Canonical trit colors: 1 -> green, 0 -> red, -1 -> gray.
struct Rgb {
  uint8_t r, g, b;
  bool operator==(const Rgb&) const = default;
};
constexpr Rgb kColorSet{0, 255, 0};
constexpr Rgb kColorUnset{255, 0, 0};
constexpr Rgb kColorVacant{128, 128, 128};

// Maps one pixel to the nearest canonical color by Euclidean RGB
// distance; exact ties decode as vacant.
Trit pixel_to_trit(Rgb px);

// Writes the matrix as a 1088x1024 8-bit RGB PNG (row i = packet i,
// column j = bit j). Atomic write.
void matrix_to_image(const NprintMatrix& m, const std::filesystem::path& path);

// Reads a 1088x1024 PNG back into a matrix. In strict mode (default)
// every pixel must be exactly one canonical color, which rejects images
// that passed through a lossy codec; in lenient mode pixels snap to the
// nearest canonical color. n_real is the index past the last non-vacant
// row.
NprintMatrix image_to_matrix(const std::filesystem::path& path,
                             bool strict = true);

}  // namespace netdiff

#endif
