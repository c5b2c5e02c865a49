#include <cmath>
#include <cstdio>
#include <vector>

#include "bandlet/errors.hpp"
#include "bandlet/synthlab.hpp"
#include "doctest.h"

using namespace bandlet;

namespace {

SceneSpec horizon() {
  SceneSpec s;
  s.alpha = 2;
  s.edges = {EdgeCurve::poly({0.5})};
  s.regions = {{0.0, 0.0, 0.0, 0.0, 0.0}, {1.0, 0.0, 0.0, 0.0, 0.0}};
  return s;
}

double max_gradient(const Image& img) {
  double g = 0;
  for (int y = 0; y < img.side; ++y)
    for (int x = 0; x + 1 < img.side; ++x)
      g = std::max(g, std::fabs(img.pix[static_cast<size_t>(y) * img.side + x + 1] -
                                img.pix[static_cast<size_t>(y) * img.side + x]));
  for (int y = 0; y + 1 < img.side; ++y)
    for (int x = 0; x < img.side; ++x)
      g = std::max(g, std::fabs(img.pix[static_cast<size_t>(y + 1) * img.side + x] -
                                img.pix[static_cast<size_t>(y) * img.side + x]));
  return g;
}

}  // namespace

TEST_CASE("horizon scene renders a sharp half plane") {
  Image img = render_scene(horizon(), 16);
  int transition_rows = 0;
  for (int y = 0; y < 16; ++y) {
    double row = img.pix[static_cast<size_t>(y) * 16 + 7];
    bool uniform_row = true;
    for (int x = 0; x < 16; ++x) {
      double v = img.pix[static_cast<size_t>(y) * 16 + x];
      CHECK(v == doctest::Approx(row).epsilon(1e-12));
      if (std::fabs(v) > 1e-12 && std::fabs(v - 1.0) > 1e-12)
        uniform_row = false;
    }
    if (!uniform_row) ++transition_rows;
  }
  CHECK(transition_rows <= 1);
  // top row in region 0, bottom row in region 1
  CHECK(img.pix[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(img.pix[255] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("blur strictly softens the edge") {
  SceneSpec sharp = horizon();
  SceneSpec soft = horizon();
  soft.blur = BlurSpec{4.0 / 64.0, 3};
  Image a = render_scene(sharp, 64);
  Image b = render_scene(soft, 64);
  CHECK(max_gradient(b) < max_gradient(a));
}

TEST_CASE("constant scene renders constant pixels") {
  SceneSpec s;
  s.alpha = 2;
  s.regions = {{0.37, 0.0, 0.0, 0.0, 0.0}};
  Image img = render_scene(s, 8);
  for (double v : img.pix) CHECK(v == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("smooth region second differences stay bounded as side grows") {
  SceneSpec s;
  s.alpha = 2;
  s.regions = {{0.5, 0.3, 0.8, 0.6, 0.2}};
  double prev = -1;
  for (int side : {16, 32, 64}) {
    Image img = render_scene(s, side);
    double worst = 0;
    for (int y = 0; y < side; ++y)
      for (int x = 1; x + 1 < side; ++x) {
        size_t i = static_cast<size_t>(y) * side + x;
        worst = std::max(worst,
                         std::fabs(img.pix[i - 1] - 2 * img.pix[i] + img.pix[i + 1]) *
                             side * side);
      }
    // scaled second difference approximates amp*(2*pi*fx)^2 ~ 7.6
    CHECK(worst <= 12.0);
    if (prev >= 0) CHECK(worst <= prev * 1.2);
    prev = worst;
  }
}

TEST_CASE("tangential edge pairs are rejected when alpha exceeds one") {
  SceneSpec s;
  s.alpha = 2;
  s.edges = {EdgeCurve::poly({0.3}), EdgeCurve::poly({0.30005})};
  s.regions = {{0.1, 0, 0, 0, 0}, {0.5, 0, 0, 0, 0}, {0.9, 0, 0, 0, 0}};
  CHECK_THROWS_AS(validate_scene(s), parameter_error);

  // transversal crossing is fine
  SceneSpec ok = s;
  ok.edges[1] = EdgeCurve::poly({0.0, 0.6});
  validate_scene(ok);

  // and so are near-touching curves when alpha <= 1
  SceneSpec rough = s;
  rough.alpha = 1.0;
  validate_scene(rough);
}

TEST_CASE("scene validation errors") {
  SceneSpec s;
  s.alpha = 0;
  s.regions = {{0, 0, 0, 0, 0}};
  CHECK_THROWS_AS(validate_scene(s), parameter_error);

  SceneSpec t;
  t.alpha = 2;
  t.regions = {};
  CHECK_THROWS_AS(validate_scene(t), parameter_error);

  SceneSpec u;
  u.alpha = 2;
  u.regions = {{0, 0, 0, 0, 0}};
  u.blur = BlurSpec{0.5, 3};
  CHECK_THROWS_AS(validate_scene(u), parameter_error);
  u.blur = BlurSpec{0.1, 0};
  CHECK_THROWS_AS(validate_scene(u), parameter_error);
}

TEST_CASE("observe adds calibrated reproducible noise") {
  Image f = render_scene(horizon(), 8);

  Image same = observe(f, 0.0, 1);
  for (size_t i = 0; i < f.pix.size(); ++i) CHECK(same.pix[i] == f.pix[i]);

  Image a = observe(f, 0.1, 7, 3);
  Image b = observe(f, 0.1, 7, 3);
  for (size_t i = 0; i < f.pix.size(); ++i) CHECK(a.pix[i] == b.pix[i]);

  CHECK_THROWS_AS(observe(f, -0.1, 1), parameter_error);

  // pixel deviation sigma*side, estimated over many substreams
  const double sigma = 0.05;
  const double expect = sigma * f.side;
  double ss = 0;
  long long n = 0;
  for (int rep = 0; rep < 1600; ++rep) {
    Image obs = observe(f, sigma, 99, static_cast<unsigned long long>(rep));
    for (size_t i = 0; i < f.pix.size(); ++i) {
      double d = obs.pix[i] - f.pix[i];
      ss += d * d;
      ++n;
    }
  }
  double sd = std::sqrt(ss / static_cast<double>(n));
  // 3 standard errors of the sd estimate: sd/sqrt(2n)
  CHECK(std::fabs(sd - expect) <= 3.0 * expect / std::sqrt(2.0 * n));
}

TEST_CASE("observation noise is white at lag one") {
  Image zero;
  zero.side = 64;
  zero.pix.assign(4096, 0.0);
  Image obs = observe(zero, 0.1, 31);
  double num = 0, den = 0;
  for (size_t i = 0; i + 1 < obs.pix.size(); ++i) {
    num += obs.pix[i] * obs.pix[i + 1];
    den += obs.pix[i] * obs.pix[i];
  }
  double rho = num / den;
  CHECK(std::fabs(rho) <= 3.0 / std::sqrt(static_cast<double>(obs.pix.size())));
}

TEST_CASE("slope fit recovers exact lines") {
  // mse = 7 * (sigma^2 |log sigma|)^(2/3)
  std::vector<std::pair<double, double>> rows;
  for (double s : {0.25, 0.125, 0.0625, 0.03125}) {
    double x = s * s * std::log(1.0 / s);
    rows.emplace_back(s, 7.0 * std::pow(x, 2.0 / 3.0));
  }
  SlopeFit fit = fit_slope(rows);
  CHECK(std::fabs(fit.slope - 2.0 / 3.0) <= 1e-12);
  CHECK(std::fabs(fit.intercept - std::log(7.0)) <= 1e-12);
  CHECK(fit.stderr_slope <= 1e-7);

  // scaling all mse shifts only the intercept
  std::vector<std::pair<double, double>> scaled = rows;
  for (auto& r : scaled) r.second *= 13.0;
  SlopeFit fit2 = fit_slope(scaled);
  CHECK(std::fabs(fit2.slope - fit.slope) <= 1e-12);
  CHECK(std::fabs(fit2.intercept - (fit.intercept + std::log(13.0))) <= 1e-12);
}

TEST_CASE("slope fit rejects degenerate designs") {
  std::vector<std::pair<double, double>> two = {{0.25, 1.0}, {0.125, 0.5}};
  CHECK_THROWS_AS(fit_slope(two), parameter_error);

  std::vector<std::pair<double, double>> dup = {
      {0.25, 1.0}, {0.25, 0.9}, {0.125, 0.5}};
  CHECK_THROWS_AS(fit_slope(dup), parameter_error);

  std::vector<std::pair<double, double>> buckets = {
      {0.25, 1.0}, {0.125, -0.5}, {0.0625, 0.2}};
  CHECK_THROWS_AS(fit_slope(buckets), parameter_error);
}

TEST_CASE("risk curve rows, determinism, and monotonicity") {
  SceneSpec spec = SceneSpec::edge_demo(2.0);
  std::vector<double> sigmas = {0.0625, 0.125, 0.25};
  RiskReport a = risk_curve(spec, sigmas, 4, 3.0, {}, 5);
  RiskReport b = risk_curve(spec, sigmas, 4, 3.0, {}, 5);
  REQUIRE(a.rows.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(a.rows[i].sigma == sigmas[i]);
    CHECK(a.rows[i].trials == 4);
    CHECK(a.rows[i].mse_mean == b.rows[i].mse_mean);
    CHECK(a.rows[i].mse_mean > 0);
    CHECK(a.rows[i].mse_stderr >= 0);
  }
  CHECK(std::isfinite(a.slope));
  CHECK(a.slope == b.slope);

  // nondecreasing in sigma within one standard error
  for (size_t i = 0; i + 1 < a.rows.size(); ++i)
    CHECK(a.rows[i + 1].mse_mean >=
          a.rows[i].mse_mean -
              (a.rows[i].mse_stderr + a.rows[i + 1].mse_stderr));

  RiskReport single = risk_curve(spec, {0.25}, 1, 3.0, {}, 5);
  CHECK(single.rows[0].mse_stderr == 0.0);
  CHECK(std::isnan(single.slope));

  CHECK_THROWS_AS(risk_curve(spec, {}, 4, 3.0, {}, 5), parameter_error);
  CHECK_THROWS_AS(risk_curve(spec, {0.25}, 0, 3.0, {}, 5), parameter_error);
  CHECK_THROWS_AS(risk_curve(spec, {0.3}, 1, 3.0, {}, 5), regime_error);
}

TEST_CASE("risk csv format round-trips ten significant digits") {
  SceneSpec spec = SceneSpec::edge_demo(2.0);
  RiskReport rep = risk_curve(spec, {0.25, 0.125, 0.0625}, 2, 3.0, {}, 11);
  std::string text = risk_csv(rep);
  CHECK(text.rfind("sigma,trials,mse_mean,mse_stderr,psnr_mean,kept_mean\n",
                   0) == 0);
  CHECK(text.find("# slope=") != std::string::npos);
  CHECK(text.find(" stderr=") != std::string::npos);

  // parse back the first data row and re-rendering must be identical
  size_t line1 = text.find('\n') + 1;
  size_t line2 = text.find('\n', line1);
  std::string row = text.substr(line1, line2 - line1);
  double sv, mm, ms, pm, km;
  long long tv;
  REQUIRE(std::sscanf(row.c_str(), "%lf,%lld,%lf,%lf,%lf,%lf", &sv, &tv, &mm,
                      &ms, &pm, &km) == 6);
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.10g,%lld,%.10g,%.10g,%.10g,%.10g", sv, tv,
                mm, ms, pm, km);
  CHECK(row == buf);
}

TEST_CASE("concentration frequencies respect the lemma bound") {
  for (double u : {0.0, 2.0}) {
    ConcentrationResult res =
        concentration_experiment(64, {1, 2, 4, 8}, u, 4000, 17);
    CHECK(!res.exhaustive);
    CHECK(res.bound == doctest::Approx(2.0 / 64 * std::exp(-u)).epsilon(1e-15));
    double se = std::sqrt(res.bound * (1 - res.bound) / res.trials);
    CHECK(res.frequency <= res.bound + 3 * se);
  }
}

TEST_CASE("concentration at u=10 sees no violations") {
  ConcentrationResult res = concentration_experiment(64, {1, 2, 4, 8}, 10.0,
                                                     10000, 23);
  CHECK(res.violations == 0);
  CHECK(res.bound == doctest::Approx(2.0 / 64 * std::exp(-10.0)).epsilon(1e-12));
}

TEST_CASE("the full-dimension subspace never violates") {
  ConcentrationResult res = concentration_experiment(64, {64}, 0.0, 10000, 29);
  CHECK(res.violations == 0);
}

TEST_CASE("small k switches to exhaustive subsets") {
  ConcentrationResult res = concentration_experiment(4, {1}, 0.0, 2000, 31);
  CHECK(res.exhaustive);
  double se = std::sqrt(res.bound * (1 - res.bound) / res.trials);
  CHECK(res.frequency <= res.bound + 3 * se);

  // exhaustive mode must agree with the sorted-prefix shortcut over all dims
  // (coordinate projections: the worst size-d subset is the top-d squares)
  ConcentrationResult manual =
      concentration_experiment(12, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12},
                               0.0, 500, 37);
  CHECK(manual.exhaustive);
}

TEST_CASE("concentration parameter errors") {
  CHECK_THROWS_AS(concentration_experiment(1, {1}, 0.0, 10, 1),
                  parameter_error);
  CHECK_THROWS_AS(concentration_experiment(64, {0}, 0.0, 10, 1),
                  parameter_error);
  CHECK_THROWS_AS(concentration_experiment(64, {65}, 0.0, 10, 1),
                  parameter_error);
  CHECK_THROWS_AS(concentration_experiment(64, {1}, -1.0, 10, 1),
                  parameter_error);
  CHECK_THROWS_AS(concentration_experiment(64, {1}, 0.0, 0, 1),
                  parameter_error);
  CHECK_THROWS_AS(concentration_experiment(16, {}, 0.0, 10, 1),
                  parameter_error);
}
