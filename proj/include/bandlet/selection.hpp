#pragma once
#include <map>

#include "bandlet/geometry.hpp"

namespace bandlet {

struct PenalizedCost {
  double residual_sq = 0;  // energy of dropped coefficients
  long long kept = 0;      // model dimension
  double t = 0;

  double total() const { return residual_sq + double(kept) * t * t; }
};

struct ThresholdPick {
  std::vector<int> kept;  // ascending indices with |c| strictly above t
  PenalizedCost cost;
};

// keeps exactly the entries with |c| > t (strict); minimizes
// residual + kept*t^2 over all subsets
ThresholdPick threshold_select(const double* c, int n, double t);
ThresholdPick threshold_select(const std::vector<double>& c, double t);

struct LeafSelection {
  DyadicSquare sq;
  std::optional<GeometricFlow> flow;
  std::vector<int> kept;  // into alpert coefficients (flow) or raw patch
  PenalizedCost cost;
};

struct BandSelection {
  int level = 0;
  Orientation orient = Orientation::H;
  int side = 0;
  std::vector<LeafSelection> leaves;  // canonical pre-order
  PenalizedCost cost;
};

struct Selection {
  int side = 0;
  int depth = 0;
  double t = 0;
  long long approx_count = 0;  // always kept, counted in the dimension
  std::vector<BandSelection> bands;
  PenalizedCost cost;  // detail residual + (detail kept + approx)*t^2

  long long kept_details() const;
  QuadtreeGeometry geometry() const;
};

// orthogonal recombination operators shared by all squares of equal width
struct AlpertCache {
  std::map<int, std::vector<std::optional<GeometricFlow>>> flows;
  std::map<int, std::vector<AlpertBasis>> bases;  // bases[w][i-1] <-> flows[w][i]
};

AlpertCache build_alpert_cache(const std::vector<int>& widths,
                               const FlowConfig& cfg);

// best candidate for one square: no-flow raw coefficients versus every
// enumerated flow, strict improvement only (canonical order breaks ties)
LeafSelection square_cost(const std::vector<double>& patch,
                          const DyadicSquare& sq, double t,
                          const FlowConfig& cfg);

BandSelection best_band_geometry(const Subband& band, double t,
                                 const FlowConfig& cfg, int threads = 0);
BandSelection best_band_geometry(const Subband& band, double t,
                                 const FlowConfig& cfg, const AlpertCache& cache,
                                 int threads);

Selection best_geometry(const WaveletPyramid& pyr, double t,
                        const FlowConfig& cfg, int threads = 0);

// zero the non-kept detail coefficients in the selected representation,
// invert the per-leaf recombinations, then invert the wavelet transform
Image reconstruct(const Selection& sel, const WaveletPyramid& pyr,
                  const FilterPair& filt);

// geometry text form plus kept_count / residual_sq / total_cost fields
std::string serialize_selection(const Selection& sel);

}  // namespace bandlet
