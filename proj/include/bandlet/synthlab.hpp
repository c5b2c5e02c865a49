#pragma once
#include <optional>
#include <string>
#include <vector>

#include "bandlet/estimator.hpp"

namespace bandlet {

// graph y = gamma(x) over [0,1], either a polynomial (ascending
// coefficients) or offset + amp*sin(2*pi*freq*x + phase)
struct EdgeCurve {
  enum class Kind { Poly, Sine };
  Kind kind = Kind::Poly;
  std::vector<double> coef;
  double offset = 0, amp = 0, freq = 0, phase = 0;

  double value(double x) const;
  double deriv(double x) const;

  static EdgeCurve poly(std::vector<double> c);
  static EdgeCurve sine(double offset, double amp, double freq, double phase);
};

// smooth region value base + amp*cos(2*pi*(fx*x + fy*y) + phase)
struct RegionSpec {
  double base = 0, amp = 0, fx = 0, fy = 0, phase = 0;
  double value(double x, double y) const;
};

// separable bump kernel, zero outside [-support, support]^2
struct BlurSpec {
  double support = 0.0625;  // continuous units, in (0, 1/4]
  int smooth = 3;           // bump exponent; higher = smoother
};

struct SceneSpec {
  double alpha = 2;
  std::vector<EdgeCurve> edges;
  std::vector<RegionSpec> regions;  // edges.size() + 1 entries, top to bottom
  std::optional<BlurSpec> blur;
  int oversample = 4;

  double value(double x, double y) const;  // pre-blur piecewise value

  static SceneSpec edge_demo(double alpha);
};

void validate_scene(const SceneSpec& spec);

Image render_scene(const SceneSpec& spec, int side);

// f plus i.i.d. centered Gaussian pixel noise of deviation sigma*side
Image observe(const Image& f, double sigma, unsigned long long seed,
              unsigned long long stream = 0);

struct RiskRow {
  double sigma = 0;
  long long trials = 0;
  double mse_mean = 0;
  double mse_stderr = 0;
  double psnr_mean = 0;
  double kept_mean = 0;
};

struct RiskReport {
  std::vector<RiskRow> rows;
  double slope = 0, intercept = 0, slope_stderr = 0;  // NaN when not fitted
};

RiskReport risk_curve(const SceneSpec& spec, const std::vector<double>& sigmas,
                      long long trials, double lambda_tilde,
                      const EstimatorConfig& cfg = {},
                      unsigned long long seed = 1, bool baseline = false);

struct SlopeFit {
  double slope = 0, intercept = 0, stderr_slope = 0;
};

// OLS of log(mse) on log(sigma^2 * |log sigma|)
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& rows);

struct ConcentrationResult {
  int k = 0;
  double u = 0;
  long long trials = 0;
  bool exhaustive = false;  // every coordinate subset checked (k <= 12)
  std::vector<int> dims;    // requested dims (superseded when exhaustive)
  long long violations = 0;
  double frequency = 0;
  double bound = 0;  // 2/k * exp(-u)
};

// draws standard Gaussians in dimension k and counts trials where any
// checked coordinate projection exceeds sqrt(d) + sqrt(4*ln(k)*d + 2u)
ConcentrationResult concentration_experiment(int k, std::vector<int> dims,
                                             double u, long long trials,
                                             unsigned long long seed,
                                             int threads = 0);

std::string risk_csv(const RiskReport& report);
void write_csv(const RiskReport& report, const std::string& path);

}  // namespace bandlet
