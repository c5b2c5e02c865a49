#pragma once
#include <cmath>
#include <cstddef>
#include <vector>

#include "bandlet/errors.hpp"

namespace bandlet {

inline bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

inline int log2_int(int v) {
  int k = 0;
  while ((1 << k) < v) ++k;
  return k;
}

// square grid sampling [0,1]^2, row-major: pix[y*side + x]
struct Image {
  int side = 0;
  std::vector<double> pix;

  Image() = default;
  explicit Image(int s, double fill = 0.0)
      : side(s), pix(size_t(s) * size_t(s), fill) {}

  double& at(int x, int y) { return pix[size_t(y) * side + x]; }
  double at(int x, int y) const { return pix[size_t(y) * side + x]; }
};

inline void validate_image(const Image& img) {
  if (img.side < 2 || !is_pow2(img.side))
    throw input_error("image side must be a power of two >= 2");
  if (img.pix.size() != size_t(img.side) * size_t(img.side))
    throw input_error("image pixel count does not match side");
  for (double v : img.pix)
    if (!std::isfinite(v)) throw input_error("image contains non-finite pixel");
}

}  // namespace bandlet
