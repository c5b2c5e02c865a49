#pragma once
#include <string>
#include <vector>

#include "bandlet/image.hpp"

namespace bandlet {

// subband orientation: H = detail along x, V = detail along y, D = both
enum class Orientation { H, V, D };

char orientation_char(Orientation o);

// orthogonal conjugate-mirror filter pair with p vanishing moments
struct FilterPair {
  std::string name;
  int vanishing_moments = 0;
  std::vector<double> lowpass;
  std::vector<double> highpass;  // g[k] = (-1)^k h[L-1-k]

  static FilterPair daubechies(int p);  // p in 1..4
};

void validate_filter(const FilterPair& f);

struct Subband {
  int level = 0;  // 1 = finest
  Orientation orient = Orientation::H;
  int side = 0;
  std::vector<double> c;  // c[y*side + x]
};

// separable periodic wavelet decomposition: approx at the coarsest level plus
// three detail subbands per level
struct WaveletPyramid {
  int side = 0;
  int depth = 0;
  std::vector<double> approx;
  std::vector<Subband> details;  // level 1..depth, orientations H,V,D

  int approx_side() const { return side >> depth; }
  Subband& band(int level, Orientation o);
  const Subband& band(int level, Orientation o) const;
  double sumsq() const;
};

void validate_pyramid(const WaveletPyramid& pyr);

int full_depth(int side);

WaveletPyramid dwt2(const Image& img, int depth, const FilterPair& filt);
Image idwt2(const WaveletPyramid& pyr, const FilterPair& filt);

}  // namespace bandlet
