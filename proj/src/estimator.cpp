#include "bandlet/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "bandlet/errors.hpp"

namespace bandlet {

double lambda0(double k) {
  if (!(k >= 2))
    throw parameter_error("lambda0 requires a dictionary of size >= 2");
  return std::sqrt(32.0 + 8.0 / std::log(k));
}

double regime_lambda(int p, long long k) {
  if (p < 1) throw parameter_error("regime_lambda: p must be >= 1");
  return std::sqrt(2.0 * (p + 4)) * lambda0(static_cast<double>(k));
}

int plan_depth(int side, const EstimatorConfig& cfg) {
  int full = full_depth(side);
  if (cfg.depth == 0) return full;
  if (cfg.depth < 0 || cfg.depth > full)
    throw parameter_error("pyramid depth out of range for this side");
  return cfg.depth;
}

long long dictionary_size(int side, int depth, const FlowConfig& cfg) {
  validate_flow_config(cfg);
  if (!is_pow2(side) || side < 2)
    throw parameter_error("side must be a power of two, >= 2");
  if (depth < 1 || depth > full_depth(side))
    throw parameter_error("depth out of range for this side");
  long long approx_side = side >> depth;
  long long total = approx_side * approx_side;  // approx block
  for (int level = 1; level <= depth; ++level) {
    long long sb = side >> level;
    long long per_band = sb * sb;  // the raw wavelet coefficients
    if (sb >= 2 && cfg.enable) {
      for (long long w = std::max(2LL, static_cast<long long>(cfg.min_leaf));
           w <= sb; w <<= 1) {
        long long flows =
            static_cast<long long>(enumerate_flows(static_cast<int>(w),
                                                   cfg).size()) -
            1;  // drop the no-flow entry, already counted
        per_band += sb * sb * flows;
      }
    }
    total += 3 * per_band;
  }
  return total;
}

EstimatorPlan plan_for_side(double sigma, double lambda_tilde, int side,
                            const EstimatorConfig& cfg) {
  if (!(sigma > 0)) throw parameter_error("sigma must be positive");
  if (sigma > 0.25)
    throw regime_error("noise level out of range: requires sigma <= 1/4");
  if (!is_pow2(side) || side < 2)
    throw parameter_error("side must be a power of two, >= 2");

  EstimatorPlan plan;
  plan.sigma = sigma;
  int j = static_cast<int>(std::ceil(std::log2(sigma)));
  // pin the exact half-open bracket sigma in (2^{j-1}, 2^j]
  while (std::ldexp(1.0, j) < sigma) ++j;
  while (std::ldexp(1.0, j - 1) >= sigma) --j;
  plan.j = j;
  plan.side = side;
  plan.n = static_cast<long long>(side) * side;
  int depth = plan_depth(side, cfg);
  plan.k_n = dictionary_size(side, depth, cfg.flow);
  double lam = lambda_tilde > 0
                   ? lambda_tilde
                   : regime_lambda(cfg.flow.moments, plan.k_n);
  plan.lambda_tilde = lam;
  plan.t = lam * std::sqrt(std::log(1.0 / sigma)) * sigma;
  plan.lambda0_kn = lambda0(static_cast<double>(plan.k_n));
  plan.regime_ok = lam >= regime_lambda(cfg.flow.moments, plan.k_n);
  plan.t_meets_lower =
      plan.t >= plan.lambda0_kn *
                    std::sqrt(std::log(static_cast<double>(plan.k_n))) * sigma;
  return plan;
}

EstimatorPlan plan_from_sigma(double sigma, double lambda_tilde,
                              const EstimatorConfig& cfg) {
  if (!(sigma > 0)) throw parameter_error("sigma must be positive");
  if (sigma > 0.25)
    throw regime_error("noise level out of range: requires sigma <= 1/4");
  int j = static_cast<int>(std::ceil(std::log2(sigma)));
  while (std::ldexp(1.0, j) < sigma) ++j;
  while (std::ldexp(1.0, j - 1) >= sigma) --j;
  int side = 1 << (-j);
  return plan_for_side(sigma, lambda_tilde, side, cfg);
}

DenoiseResult denoise(const Image& obs, const EstimatorPlan& plan,
                      const EstimatorConfig& cfg) {
  validate_image(obs);
  if (obs.side != plan.side)
    throw input_error("image side does not match the plan");
  FilterPair filt = FilterPair::daubechies(cfg.flow.moments);
  int depth = plan_depth(obs.side, cfg);
  WaveletPyramid pyr = dwt2(obs, depth, filt);
  Selection sel = best_geometry(pyr, plan.t_grid(), cfg.flow, cfg.threads);
  DenoiseResult out;
  out.img = reconstruct(sel, pyr, filt);
  out.sel = std::move(sel);
  return out;
}

Image denoise_wavelet_baseline(const Image& obs, double t,
                               const EstimatorConfig& cfg) {
  validate_image(obs);
  if (!(t > 0)) throw parameter_error("threshold must be positive");
  EstimatorConfig base = cfg;
  base.flow.enable = false;
  FilterPair filt = FilterPair::daubechies(base.flow.moments);
  int depth = plan_depth(obs.side, base);
  WaveletPyramid pyr = dwt2(obs, depth, filt);
  Selection sel = best_geometry(pyr, t * obs.side, base.flow, base.threads);
  return reconstruct(sel, pyr, filt);
}

OracleReport oracle_cost(const Image& f, double t, const EstimatorConfig& cfg,
                         double sigma) {
  validate_image(f);
  if (!(t > 0)) throw parameter_error("threshold must be positive");
  if (sigma < 0) throw parameter_error("sigma must be nonnegative");
  FilterPair filt = FilterPair::daubechies(cfg.flow.moments);
  int depth = plan_depth(f.side, cfg);
  WaveletPyramid pyr = dwt2(f, depth, filt);
  Selection sel = best_geometry(pyr, t, cfg.flow, cfg.threads);

  OracleReport rep;
  rep.t = t;
  rep.sigma = sigma;
  rep.k_n = dictionary_size(f.side, depth, cfg.flow);
  rep.kept = sel.cost.kept;
  rep.residual_sq = sel.cost.residual_sq;
  rep.oracle_total = sel.cost.total();
  rep.oracle_detail_total =
      sel.cost.residual_sq + (sel.cost.kept - sel.approx_count) * t * t;
  rep.theorem1_bound =
      4.0 * rep.oracle_total +
      64.0 * sigma * sigma / static_cast<double>(rep.k_n);
  rep.argmin = std::move(sel);
  return rep;
}

double risk_of(const Image& f, const Image& g) {
  validate_image(f);
  validate_image(g);
  if (f.side != g.side) throw input_error("image sides differ");
  double acc = 0;
  for (size_t i = 0; i < f.pix.size(); ++i) {
    double d = f.pix[i] - g.pix[i];
    acc += d * d;
  }
  return acc / static_cast<double>(f.pix.size());
}

double psnr(const Image& f, const Image& g) {
  double peak = 0;
  for (double v : f.pix) peak = std::max(peak, std::fabs(v));
  if (peak == 0) throw parameter_error("psnr: reference image is zero");
  double r = risk_of(f, g);
  if (r == 0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(r / (peak * peak));
}

static void kv(std::string& out, const char* key, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s=%.12g\n", key, v);
  out += buf;
}

static void kv(std::string& out, const char* key, long long v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s=%lld\n", key, v);
  out += buf;
}

std::string OracleReport::block() const {
  std::string out;
  kv(out, "t", t);
  kv(out, "sigma", sigma);
  kv(out, "K_N", k_n);
  kv(out, "kept_count", kept);
  kv(out, "residual_sq", residual_sq);
  kv(out, "oracle_total", oracle_total);
  kv(out, "oracle_detail_total", oracle_detail_total);
  kv(out, "theorem1_bound", theorem1_bound);
  return out;
}

std::string report_block(const EstimatorPlan& plan, const Selection& sel,
                         const EstimatorConfig& cfg, bool baseline) {
  std::string out;
  kv(out, "sigma", plan.sigma);
  kv(out, "j", static_cast<long long>(plan.j));
  kv(out, "side", static_cast<long long>(plan.side));
  kv(out, "N", plan.n);
  kv(out, "K_N", plan.k_n);
  kv(out, "lambda_tilde", plan.lambda_tilde);
  kv(out, "lambda0", plan.lambda0_kn);
  kv(out, "T", plan.t);
  kv(out, "T_grid", plan.t_grid());
  kv(out, "regime_ok", static_cast<long long>(plan.regime_ok ? 1 : 0));
  kv(out, "t_meets_lower", static_cast<long long>(plan.t_meets_lower ? 1 : 0));
  kv(out, "p", static_cast<long long>(cfg.flow.moments));
  kv(out, "degree", static_cast<long long>(cfg.flow.degree));
  kv(out, "q", static_cast<long long>(cfg.flow.levels));
  kv(out, "depth", static_cast<long long>(plan_depth(plan.side, cfg)));
  kv(out, "threads", static_cast<long long>(cfg.threads));
  kv(out, "baseline", static_cast<long long>(baseline ? 1 : 0));
  kv(out, "kept_count", sel.cost.kept);
  kv(out, "residual_sq", sel.cost.residual_sq);
  kv(out, "total_cost", sel.cost.total());
  return out;
}

}  // namespace bandlet
