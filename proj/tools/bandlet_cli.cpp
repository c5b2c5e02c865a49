#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bandlet/errors.hpp"
#include "bandlet/estimator.hpp"
#include "bandlet/gridio.hpp"
#include "bandlet/synthlab.hpp"

using namespace bandlet;

namespace {

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= s.size()) {
    size_t comma = s.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::vector<double> parse_reals(const std::string& s, const char* what) {
  std::vector<double> out;
  for (const std::string& tok : split_commas(s)) {
    char* q = nullptr;
    double v = std::strtod(tok.c_str(), &q);
    if (tok.empty() || q != tok.c_str() + tok.size())
      throw parameter_error(std::string("malformed ") + what + " list");
    out.push_back(v);
  }
  if (out.empty())
    throw parameter_error(std::string("empty ") + what + " list");
  return out;
}

std::vector<int> parse_ints(const std::string& s, const char* what) {
  std::vector<int> out;
  for (double v : parse_reals(s, what)) {
    int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
      throw parameter_error(std::string("non-integer ") + what + " entry");
    out.push_back(i);
  }
  return out;
}

EstimatorConfig make_cfg(int p, int deg, int q, int depth, int threads) {
  EstimatorConfig cfg;
  cfg.flow = FlowConfig::for_moments(p);
  if (deg >= 0) cfg.flow.degree = deg;
  cfg.flow.levels = q;
  cfg.depth = depth;
  cfg.threads = threads;
  validate_flow_config(cfg.flow);
  return cfg;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open " + path + " for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw io_error("write failed: " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"penalized bandlet denoising toolkit"};
  app.require_subcommand(1);

  std::string input, out, dump_geometry, sigmas_csv, dims_csv = "1,2,4,8";
  double sigma = 0, lambda = 0, big_t = 0, alpha = 2, u = 0;
  long long trials = 50, seed = 1;
  int p = 2, deg = -1, q = 5, depth = 0, threads = 0, big_k = 64;
  bool baseline = false, compare_baseline = false;

  CLI::App* den = app.add_subcommand("denoise", "denoise a grid or PGM image");
  den->add_option("--input", input, "input image (text grid or PGM)")
      ->required();
  den->add_option("--sigma", sigma, "noise level, continuous units")
      ->required();
  den->add_option("--lambda", lambda,
                  "threshold factor (<= 0 selects the guaranteed regime)");
  den->add_option("--p", p, "vanishing moments (1..4)");
  den->add_option("--deg", deg, "flow polynomial degree (default p-1, cap 2)");
  den->add_option("--q", q, "flow quantization levels per coefficient");
  den->add_option("--depth", depth, "pyramid depth (0 = full)");
  den->add_option("--threads", threads, "worker cap (0 = library default)");
  den->add_option("--out", out, "output image path")->required();
  den->add_option("--dump-geometry", dump_geometry,
                  "write the selected geometry to this path");
  den->add_flag("--baseline", baseline, "restrict to the fixed wavelet basis");

  CLI::App* bench = app.add_subcommand("bench", "Monte Carlo risk curve");
  bench->add_option("--alpha", alpha, "scene regularity exponent");
  bench->add_option("--sigmas", sigmas_csv, "comma-separated noise levels")
      ->required();
  bench->add_option("--trials", trials, "trials per noise level");
  bench->add_option("--seed", seed, "base RNG seed");
  bench->add_option("--lambda", lambda,
                    "threshold factor (<= 0 selects the guaranteed regime)");
  bench->add_option("--p", p, "vanishing moments (1..4)");
  bench->add_option("--threads", threads, "worker cap (0 = library default)");
  bench->add_option("--out", out, "output CSV path")->required();
  bench->add_flag("--compare-baseline", compare_baseline,
                  "also run the wavelet baseline into <out>.baseline.csv");

  CLI::App* oracle =
      app.add_subcommand("oracle", "penalized oracle cost of a clean image");
  oracle->add_option("--input", input, "input image (text grid or PGM)")
      ->required();
  oracle->add_option("--T", big_t, "threshold, input-grid units")->required();
  oracle->add_option("--sigma", sigma, "noise level for the remainder term");
  oracle->add_option("--p", p, "vanishing moments (1..4)");
  oracle->add_option("--deg", deg, "flow polynomial degree");
  oracle->add_option("--q", q, "flow quantization levels per coefficient");
  oracle->add_option("--depth", depth, "pyramid depth (0 = full)");
  oracle->add_option("--threads", threads, "worker cap (0 = library default)");
  oracle->add_option("--dump-geometry", dump_geometry,
                     "write the arg-min geometry to this path");

  CLI::App* conc =
      app.add_subcommand("concentration", "projection concentration check");
  conc->add_option("--K", big_k, "ambient dimension")->required();
  conc->add_option("--u", u, "deviation parameter (>= 0)");
  conc->add_option("--trials", trials, "Monte Carlo trials");
  conc->add_option("--seed", seed, "base RNG seed");
  conc->add_option("--dims", dims_csv, "comma-separated subspace dimensions");
  conc->add_option("--threads", threads, "worker cap (0 = library default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (den->parsed()) {
      Image obs = read_grid(input);
      EstimatorConfig cfg = make_cfg(p, deg, q, depth, threads);
      EstimatorPlan plan = plan_for_side(sigma, lambda, obs.side, cfg);
      EstimatorConfig run = cfg;
      if (baseline) run.flow.enable = false;
      DenoiseResult res = denoise(obs, plan, run);
      write_grid(res.img, out);
      if (!dump_geometry.empty())
        write_text_file(dump_geometry, serialize_geometry(res.sel.geometry()));
      std::fputs(report_block(plan, res.sel, run, baseline).c_str(), stdout);
    } else if (bench->parsed()) {
      std::vector<double> sigmas = parse_reals(sigmas_csv, "--sigmas");
      EstimatorConfig cfg = make_cfg(p, -1, 5, 0, threads);
      SceneSpec spec = SceneSpec::edge_demo(alpha);
      RiskReport rep = risk_curve(spec, sigmas, trials, lambda, cfg,
                                  static_cast<unsigned long long>(seed), false);
      write_csv(rep, out);
      std::printf("slope=%.10g stderr=%.10g\n", rep.slope, rep.slope_stderr);
      if (compare_baseline) {
        RiskReport base =
            risk_curve(spec, sigmas, trials, lambda, cfg,
                       static_cast<unsigned long long>(seed), true);
        write_csv(base, out + ".baseline.csv");
        std::printf("baseline_slope=%.10g baseline_stderr=%.10g\n", base.slope,
                    base.slope_stderr);
      }
    } else if (oracle->parsed()) {
      Image f = read_grid(input);
      EstimatorConfig cfg = make_cfg(p, deg, q, depth, threads);
      OracleReport rep = oracle_cost(f, big_t, cfg, sigma);
      if (!dump_geometry.empty())
        write_text_file(dump_geometry,
                        serialize_geometry(rep.argmin.geometry()));
      std::fputs(rep.block().c_str(), stdout);
    } else if (conc->parsed()) {
      std::vector<int> dims = parse_ints(dims_csv, "--dims");
      if (!conc->count("--dims")) {
        std::erase_if(dims, [&](int d) { return d > big_k; });
        if (dims.empty()) dims.push_back(1);
      }
      ConcentrationResult res = concentration_experiment(
          big_k, dims, u, trials, static_cast<unsigned long long>(seed),
          threads);
      std::printf("k=%d\n", res.k);
      std::printf("u=%.10g\n", res.u);
      std::printf("trials=%lld\n", res.trials);
      std::printf("exhaustive=%d\n", res.exhaustive ? 1 : 0);
      std::string fam;
      for (size_t i = 0; i < res.dims.size(); ++i) {
        if (i) fam += ',';
        fam += std::to_string(res.dims[i]);
      }
      std::printf("dims=%s\n", res.exhaustive ? "all-subsets" : fam.c_str());
      std::printf("violations=%lld\n", res.violations);
      std::printf("frequency=%.10g\n", res.frequency);
      std::printf("bound=%.10g\n", res.bound);
    }
  } catch (const regime_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const io_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const parameter_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const input_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
