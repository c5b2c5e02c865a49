#pragma once
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bandlet/pyramid.hpp"

namespace bandlet {

// square of width w at corner (x, y) inside a subband grid; x, y multiples of w
struct DyadicSquare {
  int x = 0, y = 0, w = 0;
  bool operator==(const DyadicSquare& o) const {
    return x == o.x && y == o.y && w == o.w;
  }
};

enum class FlowAxis { Horizontal, Vertical };

// Quantized polynomial direction field, constant along one axis of the square.
// Vertical: flow lines run top to bottom; sites group into sheared columns
//   keyed by x - round(gamma(y)) with gamma a polynomial over the row index,
//   and the along-line coordinate is y.
// Horizontal: the transpose; lines are sheared rows keyed by
//   y - round(gamma(x)), along-line coordinate x.
// gamma(t) = delta * sum_i coef[i] * t^i with delta = 1/w.
struct GeometricFlow {
  FlowAxis axis = FlowAxis::Vertical;
  std::vector<int> coef;  // ascending degree
  double delta = 0;

  double gamma(double t) const;
  double gamma_prime(double t) const;
  bool operator==(const GeometricFlow& o) const {
    return axis == o.axis && coef == o.coef && delta == o.delta;
  }
};

struct FlowConfig {
  int moments = 2;  // p: vanishing moments of the recombination
  int degree = 1;   // tangent polynomial degree, must stay <= moments-1
  int levels = 5;   // quantized values per coefficient, centered at zero
  double slope_cap = std::numeric_limits<double>::infinity();
  int min_leaf = 2;   // smallest dyadic square carrying its own flow choice
  int max_flows = 0;  // optional cap on candidates per square, 0 = no cap
  bool enable = true;  // false: dictionary degenerates to the wavelet basis

  static FlowConfig for_moments(int p) {
    FlowConfig c;
    c.moments = p;
    c.degree = p - 1 < 2 ? p - 1 : 2;
    return c;
  }
};

void validate_flow_config(const FlowConfig& cfg);

// Candidate list for one square: the no-flow option first, then Horizontal
// before Vertical with coefficient vectors in ascending lexicographic order.
// Unfiltered size is 1 + 2*levels^(degree+1); width 1 admits only no-flow.
std::vector<std::optional<GeometricFlow>> enumerate_flows(int width,
                                                          const FlowConfig& cfg);

struct AlpertLine {
  std::vector<int> sites;    // patch offsets (py*w + px), position order
  std::vector<double> pos;   // along-line coordinate per site
  std::vector<double> basis; // n*n row-major; rows are orthonormal vectors
  int coarse = 0;            // leading rows span polynomials of degree < p
  bool degenerate = false;   // identity fallback (duplicate positions)

  int n() const { return int(sites.size()); }
};

// Orthogonal w^2 x w^2 coefficient transform: per flow line, a hierarchical
// orthogonalization of piecewise polynomials of degree < p in the along-line
// coordinate. Coefficient layout: lines in key order, per line the coarse
// rows first, then detail rows.
struct AlpertBasis {
  int width = 0;
  int p = 0;
  GeometricFlow flow;
  std::vector<AlpertLine> lines;
  std::vector<int> offset;  // per-line coefficient offset, plus total at end
  int degenerate_lines = 0;

  int total() const { return width * width; }
};

AlpertBasis build_alpert(int width, const GeometricFlow& flow, int p);

void alpert_forward(const AlpertBasis& b, const double* patch, double* coef);
void alpert_inverse(const AlpertBasis& b, const double* coef, double* patch);
std::vector<double> alpert_forward(const AlpertBasis& b,
                                   const std::vector<double>& patch);
std::vector<double> alpert_inverse(const AlpertBasis& b,
                                   const std::vector<double>& coef);

struct QuadLeaf {
  DyadicSquare sq;
  std::optional<GeometricFlow> flow;
};

struct BandGeometry {
  int level = 0;
  Orientation orient = Orientation::H;
  int side = 0;
  std::vector<QuadLeaf> leaves;  // canonical pre-order: NW, NE, SW, SE
};

struct QuadtreeGeometry {
  int side = 0;   // image side
  int depth = 0;  // pyramid depth
  std::vector<BandGeometry> bands;  // level ascending, orientation H,V,D
};

// throws input_error unless leaves tile the subband exactly in canonical
// pre-order with power-of-two aligned squares
void check_tiling(const BandGeometry& bg);

// one leaf per line: d,o,x,y,w,axis[,c0,c1,...]; axis '-' means no flow
std::string serialize_geometry(const QuadtreeGeometry& g);
QuadtreeGeometry parse_geometry(const std::string& text, int side, int depth);

}  // namespace bandlet
