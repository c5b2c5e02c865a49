#include "bandlet/synthlab.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "bandlet/errors.hpp"
#include "bandlet/rng.hpp"

namespace bandlet {

static constexpr double kTwoPi = 6.283185307179586476925286766559;

double EdgeCurve::value(double x) const {
  if (kind == Kind::Sine) return offset + amp * std::sin(kTwoPi * freq * x + phase);
  double acc = 0;
  for (size_t i = coef.size(); i-- > 0;) acc = acc * x + coef[i];
  return acc;
}

double EdgeCurve::deriv(double x) const {
  if (kind == Kind::Sine)
    return amp * kTwoPi * freq * std::cos(kTwoPi * freq * x + phase);
  double acc = 0;
  for (size_t i = coef.size(); i-- > 1;)
    acc = acc * x + coef[i] * static_cast<double>(i);
  return acc;
}

EdgeCurve EdgeCurve::poly(std::vector<double> c) {
  EdgeCurve e;
  e.kind = Kind::Poly;
  e.coef = std::move(c);
  return e;
}

EdgeCurve EdgeCurve::sine(double offset, double amp, double freq,
                          double phase) {
  EdgeCurve e;
  e.kind = Kind::Sine;
  e.offset = offset;
  e.amp = amp;
  e.freq = freq;
  e.phase = phase;
  return e;
}

double RegionSpec::value(double x, double y) const {
  return base + amp * std::cos(kTwoPi * (fx * x + fy * y) + phase);
}

double SceneSpec::value(double x, double y) const {
  size_t idx = 0;
  for (const EdgeCurve& e : edges)
    if (y > e.value(x)) ++idx;
  return regions[idx].value(x, y);
}

SceneSpec SceneSpec::edge_demo(double alpha) {
  SceneSpec s;
  s.alpha = alpha;
  s.edges = {EdgeCurve::sine(0.5, 0.15, 0.75, 0.3)};
  s.regions = {{0.15, 0.08, 0.30, 0.20, 0.5}, {0.85, 0.08, 0.25, 0.35, 1.1}};
  return s;
}

void validate_scene(const SceneSpec& spec) {
  if (!(spec.alpha > 0)) throw parameter_error("scene alpha must be positive");
  if (spec.regions.size() != spec.edges.size() + 1)
    throw parameter_error("scene needs one region more than edges");
  if (spec.oversample < 4)
    throw parameter_error("oversample factor must be >= 4");
  for (const EdgeCurve& e : spec.edges)
    if (e.kind == EdgeCurve::Kind::Poly && e.coef.empty())
      throw parameter_error("polynomial edge needs coefficients");
  for (const RegionSpec& r : spec.regions)
    if (!std::isfinite(r.base) || !std::isfinite(r.amp))
      throw parameter_error("region parameters must be finite");
  if (spec.blur) {
    if (!(spec.blur->support > 0) || spec.blur->support > 0.25)
      throw parameter_error("blur support must lie in (0, 1/4]");
    if (spec.blur->smooth < 1)
      throw parameter_error("blur smoothness exponent must be >= 1");
  }
  if (spec.alpha > 1 && spec.edges.size() >= 2) {
    // reject tangential crossings: small gap with matching slopes
    const int grid = 2048;
    for (size_t a = 0; a < spec.edges.size(); ++a)
      for (size_t b = a + 1; b < spec.edges.size(); ++b)
        for (int m = 0; m < grid; ++m) {
          double x = (m + 0.5) / grid;
          double d = spec.edges[a].value(x) - spec.edges[b].value(x);
          double dp = spec.edges[a].deriv(x) - spec.edges[b].deriv(x);
          if (std::fabs(d) <= 1e-4 && std::fabs(dp) <= 1e-3)
            throw parameter_error("tangential edge crossing");
        }
  }
}

Image render_scene(const SceneSpec& spec, int side) {
  validate_scene(spec);
  if (!is_pow2(side) || side < 2)
    throw parameter_error("side must be a power of two, >= 2");
  const int ov = spec.oversample;
  const int S = side * ov;

  int r = 0;
  std::vector<double> kk;
  if (spec.blur) {
    r = static_cast<int>(std::llround(spec.blur->support * S));
    if (r > 0) {
      kk.resize(2 * r + 1);
      double sum = 0;
      for (int i = -r; i <= r; ++i) {
        double t = static_cast<double>(i) / r;
        kk[i + r] = std::pow(1.0 - t * t, spec.blur->smooth);
        sum += kk[i + r];
      }
      for (double& v : kk) v /= sum;
    }
  }

  const int ext = S + 2 * r;
  std::vector<double> a(static_cast<size_t>(ext) * ext);
  for (int iy = 0; iy < ext; ++iy) {
    double y = (iy - r + 0.5) / S;
    for (int ix = 0; ix < ext; ++ix) {
      double x = (ix - r + 0.5) / S;
      a[static_cast<size_t>(iy) * ext + ix] = spec.value(x, y);
    }
  }

  std::vector<double> fine;
  if (r > 0) {
    std::vector<double> b(static_cast<size_t>(ext) * S);
    for (int iy = 0; iy < ext; ++iy)
      for (int ox = 0; ox < S; ++ox) {
        double acc = 0;
        for (int d = 0; d <= 2 * r; ++d)
          acc += kk[d] * a[static_cast<size_t>(iy) * ext + ox + d];
        b[static_cast<size_t>(iy) * S + ox] = acc;
      }
    fine.resize(static_cast<size_t>(S) * S);
    for (int oy = 0; oy < S; ++oy)
      for (int ox = 0; ox < S; ++ox) {
        double acc = 0;
        for (int d = 0; d <= 2 * r; ++d)
          acc += kk[d] * b[static_cast<size_t>(oy + d) * S + ox];
        fine[static_cast<size_t>(oy) * S + ox] = acc;
      }
  } else {
    fine = std::move(a);  // ext == S
  }

  Image out;
  out.side = side;
  out.pix.assign(static_cast<size_t>(side) * side, 0.0);
  const double inv = 1.0 / (static_cast<double>(ov) * ov);
  for (int row = 0; row < side; ++row)
    for (int col = 0; col < side; ++col) {
      double acc = 0;
      for (int uy = 0; uy < ov; ++uy)
        for (int ux = 0; ux < ov; ++ux)
          acc += fine[static_cast<size_t>(row * ov + uy) * S + col * ov + ux];
      out.pix[static_cast<size_t>(row) * side + col] = acc * inv;
    }
  return out;
}

Image observe(const Image& f, double sigma, unsigned long long seed,
              unsigned long long stream) {
  validate_image(f);
  if (sigma < 0) throw parameter_error("sigma must be nonnegative");
  Image out = f;
  if (sigma == 0) return out;
  Philox rng(seed, stream);
  const double s = sigma * f.side;
  for (double& v : out.pix) v += s * rng.next_gaussian();
  return out;
}

RiskReport risk_curve(const SceneSpec& spec, const std::vector<double>& sigmas,
                      long long trials, double lambda_tilde,
                      const EstimatorConfig& cfg, unsigned long long seed,
                      bool baseline) {
  if (sigmas.empty()) throw parameter_error("risk_curve needs sigma values");
  if (trials < 1) throw parameter_error("trials must be >= 1");
  RiskReport rep;
  rep.slope = rep.intercept = rep.slope_stderr =
      std::numeric_limits<double>::quiet_NaN();

  for (size_t si = 0; si < sigmas.size(); ++si) {
    double sigma = sigmas[si];
    EstimatorPlan plan = plan_from_sigma(sigma, lambda_tilde, cfg);
    Image f = render_scene(spec, plan.side);
    EstimatorConfig run = cfg;
    if (baseline) run.flow.enable = false;

    std::vector<double> mse(trials), ps(trials), kept(trials);
    for (long long t = 0; t < trials; ++t) {
      Image obs = observe(f, sigma, seed,
                          (static_cast<unsigned long long>(si) << 32) |
                              static_cast<unsigned long long>(t));
      DenoiseResult res = denoise(obs, plan, run);
      mse[t] = risk_of(f, res.img);
      ps[t] = psnr(f, res.img);
      kept[t] = static_cast<double>(res.sel.cost.kept);
    }

    RiskRow row;
    row.sigma = sigma;
    row.trials = trials;
    double sm = 0, sp = 0, sk = 0;
    for (long long t = 0; t < trials; ++t) {
      sm += mse[t];
      sp += ps[t];
      sk += kept[t];
    }
    row.mse_mean = sm / trials;
    row.psnr_mean = sp / trials;
    row.kept_mean = sk / trials;
    if (trials > 1) {
      double ss = 0;
      for (long long t = 0; t < trials; ++t) {
        double d = mse[t] - row.mse_mean;
        ss += d * d;
      }
      row.mse_stderr = std::sqrt(ss / (trials - 1) / trials);
    }
    rep.rows.push_back(row);
  }

  bool fit = rep.rows.size() >= 3;
  for (const RiskRow& row : rep.rows)
    if (!(row.mse_mean > 0) || !(row.sigma > 0) || row.sigma >= 1) fit = false;
  for (size_t i = 0; fit && i < rep.rows.size(); ++i)
    for (size_t j = i + 1; j < rep.rows.size(); ++j)
      if (rep.rows[i].sigma == rep.rows[j].sigma) {
        fit = false;
        break;
      }
  if (fit) {
    std::vector<std::pair<double, double>> pts;
    for (const RiskRow& row : rep.rows) pts.emplace_back(row.sigma, row.mse_mean);
    SlopeFit sf = fit_slope(pts);
    rep.slope = sf.slope;
    rep.intercept = sf.intercept;
    rep.slope_stderr = sf.stderr_slope;
  }
  return rep;
}

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& rows) {
  const size_t n = rows.size();
  if (n < 3) throw parameter_error("fit_slope needs at least 3 rows");
  for (size_t i = 0; i < n; ++i) {
    if (!(rows[i].first > 0) || rows[i].first >= 1)
      throw parameter_error("fit_slope needs sigma in (0, 1)");
    if (!(rows[i].second > 0))
      throw parameter_error("fit_slope needs positive mse");
    for (size_t j = i + 1; j < n; ++j)
      if (rows[i].first == rows[j].first)
        throw parameter_error("fit_slope: duplicated sigma, degenerate design");
  }
  std::vector<double> x(n), y(n);
  for (size_t i = 0; i < n; ++i) {
    double s = rows[i].first;
    x[i] = std::log(s * s * std::log(1.0 / s));
    y[i] = std::log(rows[i].second);
  }
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 1e-12)
    throw parameter_error("fit_slope: degenerate design");
  SlopeFit out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double rss = 0;
  for (size_t i = 0; i < n; ++i) {
    double e = y[i] - (out.intercept + out.slope * x[i]);
    rss += e * e;
  }
  out.stderr_slope = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  return out;
}

namespace {

bool trial_violates(int k, bool exhaustive, const std::vector<int>& dims,
                    const std::vector<double>& bnd2, unsigned long long seed,
                    long long trial, std::vector<double>& w,
                    std::vector<double>& scratch) {
  Philox rng(seed, static_cast<unsigned long long>(trial));
  rng.fill_gaussian(w.data(), static_cast<size_t>(k));
  if (exhaustive) {
    double* s = scratch.data();
    s[0] = 0;
    const unsigned top = 1u << k;
    for (unsigned mask = 1; mask < top; ++mask) {
      unsigned low = mask & (0u - mask);
      int idx = std::countr_zero(mask);
      s[mask] = s[mask ^ low] + w[idx] * w[idx];
      if (s[mask] > bnd2[std::popcount(mask)]) return true;
    }
    return false;
  }
  double* sq = scratch.data();
  for (int i = 0; i < k; ++i) sq[i] = w[i] * w[i];
  std::sort(sq, sq + k, std::greater<double>());
  double run = 0;
  int pos = 0;
  for (int d : dims) {
    while (pos < d) run += sq[pos++];
    if (run > bnd2[d]) return true;
  }
  return false;
}

}  // namespace

ConcentrationResult concentration_experiment(int k, std::vector<int> dims,
                                             double u, long long trials,
                                             unsigned long long seed,
                                             int threads) {
  if (k < 2) throw parameter_error("concentration: k must be >= 2");
  if (trials < 1) throw parameter_error("concentration: trials must be >= 1");
  if (!(u >= 0)) throw parameter_error("concentration: u must be >= 0");
  std::sort(dims.begin(), dims.end());
  dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
  for (int d : dims)
    if (d < 1 || d > k)
      throw parameter_error("concentration: dims must lie in [1, k]");
  const bool exhaustive = k <= 12;
  if (!exhaustive && dims.empty())
    throw parameter_error("concentration: dims required when k > 12");

  std::vector<double> bnd2(static_cast<size_t>(k) + 1, 0.0);
  const double lnk = std::log(static_cast<double>(k));
  for (int d = 1; d <= k; ++d) {
    double b = std::sqrt(static_cast<double>(d)) +
               std::sqrt(4.0 * lnk * d + 2.0 * u);
    bnd2[d] = b * b;
  }

  const size_t scratch_n =
      exhaustive ? (static_cast<size_t>(1) << k) : static_cast<size_t>(k);
  std::vector<unsigned char> bad(static_cast<size_t>(trials), 0);
  int nt = threads > 0 ? threads : omp_get_max_threads();
  if (nt == 1) {
    std::vector<double> w(static_cast<size_t>(k)), scratch(scratch_n);
    for (long long t = 0; t < trials; ++t)
      bad[t] = trial_violates(k, exhaustive, dims, bnd2, seed, t, w, scratch)
                   ? 1
                   : 0;
  } else {
#pragma omp parallel num_threads(nt)
    {
      std::vector<double> w(static_cast<size_t>(k)), scratch(scratch_n);
#pragma omp for schedule(static)
      for (long long t = 0; t < trials; ++t)
        bad[t] = trial_violates(k, exhaustive, dims, bnd2, seed, t, w, scratch)
                     ? 1
                     : 0;
    }
  }

  ConcentrationResult res;
  res.k = k;
  res.u = u;
  res.trials = trials;
  res.exhaustive = exhaustive;
  res.dims = std::move(dims);
  long long v = 0;
  for (long long t = 0; t < trials; ++t) v += bad[t];
  res.violations = v;
  res.frequency = static_cast<double>(v) / static_cast<double>(trials);
  res.bound = 2.0 / k * std::exp(-u);
  return res;
}

std::string risk_csv(const RiskReport& report) {
  std::string out = "sigma,trials,mse_mean,mse_stderr,psnr_mean,kept_mean\n";
  char buf[256];
  for (const RiskRow& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%.10g,%lld,%.10g,%.10g,%.10g,%.10g\n",
                  r.sigma, r.trials, r.mse_mean, r.mse_stderr, r.psnr_mean,
                  r.kept_mean);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "# slope=%.10g stderr=%.10g\n", report.slope,
                report.slope_stderr);
  out += buf;
  return out;
}

void write_csv(const RiskReport& report, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open " + path + " for writing");
  std::string text = risk_csv(report);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw io_error("write failed: " + path);
}

}  // namespace bandlet
