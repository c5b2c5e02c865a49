#pragma once
#include "bandlet/selection.hpp"

namespace bandlet {

struct EstimatorConfig {
  FlowConfig flow = FlowConfig::for_moments(2);
  int depth = 0;    // pyramid depth, 0 = full (1x1 approx)
  int threads = 0;  // worker cap, 0 = library default
};

// sqrt(32 + 8/ln K)
double lambda0(double k);

// threshold-factor floor of the guaranteed regime: sqrt(2(p+4)) * lambda0(K)
double regime_lambda(int p, long long k);

int plan_depth(int side, const EstimatorConfig& cfg);

// number of distinct dictionary vectors for the configured flow family
long long dictionary_size(int side, int depth, const FlowConfig& cfg);

// Working parameters derived from the noise level. Thresholds and sigma are
// in continuous units; the pixel grid carries side-scaled values, so the
// grid-units threshold is t*side and the per-pixel noise deviation sigma*side.
struct EstimatorPlan {
  double sigma = 0;
  int j = 0;  // sigma in (2^{j-1}, 2^j]
  int side = 0;
  long long n = 0;    // side^2
  long long k_n = 0;  // dictionary vector count
  double lambda_tilde = 0;
  double t = 0;  // lambda_tilde * sqrt(ln(1/sigma)) * sigma
  double lambda0_kn = 0;
  bool regime_ok = false;      // lambda_tilde >= regime_lambda(p, k_n)
  bool t_meets_lower = false;  // t >= lambda0_kn * sqrt(ln k_n) * sigma

  double t_grid() const { return t * side; }
  double sigma_grid() const { return sigma * side; }
};

// lambda_tilde <= 0 selects the regime default regime_lambda(p, K_N)
EstimatorPlan plan_for_side(double sigma, double lambda_tilde, int side,
                            const EstimatorConfig& cfg = {});
EstimatorPlan plan_from_sigma(double sigma, double lambda_tilde = 0,
                              const EstimatorConfig& cfg = {});

struct DenoiseResult {
  Image img;
  Selection sel;
};

DenoiseResult denoise(const Image& obs, const EstimatorPlan& plan,
                      const EstimatorConfig& cfg = {});

// plain thresholding in the fixed wavelet basis at continuous threshold t
Image denoise_wavelet_baseline(const Image& obs, double t,
                               const EstimatorConfig& cfg = {});

struct OracleReport {
  double t = 0;      // threshold, in the units of the input image
  double sigma = 0;  // optional noise level for the remainder term, same units
  long long k_n = 0;
  double oracle_total = 0;         // approx coefficients inside the dimension
  double oracle_detail_total = 0;  // approx penalty excluded
  long long kept = 0;
  double residual_sq = 0;
  double theorem1_bound = 0;  // 4*oracle_total + 64*sigma^2/k_n
  Selection argmin;

  std::string block() const;  // flat key=value text
};

// penalized cost of the clean image over the dictionary (its own coefficients
// thresholded at t)
OracleReport oracle_cost(const Image& f, double t,
                         const EstimatorConfig& cfg = {}, double sigma = 0);

// mean over pixels of (f-g)^2: the squared distance with [0,1]^2 normalization
double risk_of(const Image& f, const Image& g);

// -10 log10(risk_of / max|f|^2); +inf when the images agree
double psnr(const Image& f, const Image& g);

// flat key=value block describing a denoise run
std::string report_block(const EstimatorPlan& plan, const Selection& sel,
                         const EstimatorConfig& cfg, bool baseline);

}  // namespace bandlet
