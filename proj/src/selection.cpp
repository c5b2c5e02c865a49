#include "bandlet/selection.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace bandlet {

ThresholdPick threshold_select(const double* c, int n, double t) {
  if (!(t > 0)) throw parameter_error("threshold_select: T must be positive");
  ThresholdPick out;
  out.cost.t = t;
  for (int i = 0; i < n; ++i) {
    if (std::fabs(c[i]) > t) {
      out.kept.push_back(i);
      ++out.cost.kept;
    } else {
      out.cost.residual_sq += c[i] * c[i];
    }
  }
  return out;
}

ThresholdPick threshold_select(const std::vector<double>& c, double t) {
  for (double v : c)
    if (!std::isfinite(v)) throw input_error("threshold_select: non-finite coefficient");
  return threshold_select(c.data(), int(c.size()), t);
}

long long Selection::kept_details() const {
  long long k = 0;
  for (const BandSelection& b : bands) k += b.cost.kept;
  return k;
}

QuadtreeGeometry Selection::geometry() const {
  QuadtreeGeometry g;
  g.side = side;
  g.depth = depth;
  for (const BandSelection& b : bands) {
    BandGeometry bg;
    bg.level = b.level;
    bg.orient = b.orient;
    bg.side = b.side;
    for (const LeafSelection& lf : b.leaves) bg.leaves.push_back({lf.sq, lf.flow});
    g.bands.push_back(std::move(bg));
  }
  return g;
}

namespace {

// residual/kept of the strict rule without materializing the index list
void threshold_cost(const double* c, int n, double t, double* residual,
                    long long* kept) {
  double r = 0;
  long long k = 0;
  for (int i = 0; i < n; ++i) {
    if (std::fabs(c[i]) > t)
      ++k;
    else
      r += c[i] * c[i];
  }
  *residual = r;
  *kept = k;
}

void extract_patch(const double* band, int bside, const DyadicSquare& sq,
                   double* patch) {
  for (int py = 0; py < sq.w; ++py)
    for (int px = 0; px < sq.w; ++px)
      patch[py * sq.w + px] = band[size_t(sq.y + py) * bside + (sq.x + px)];
}

LeafSelection square_cost_core(const double* band, int bside,
                               const DyadicSquare& sq, double t,
                               const std::vector<std::optional<GeometricFlow>>& flows,
                               const std::vector<AlpertBasis>& bases) {
  const int n = sq.w * sq.w;
  std::vector<double> patch(n), work(n);
  extract_patch(band, bside, sq, patch.data());

  size_t best = 0;
  double best_res;
  long long best_kept;
  threshold_cost(patch.data(), n, t, &best_res, &best_kept);
  double best_total = best_res + double(best_kept) * t * t;

  for (size_t i = 1; i < flows.size(); ++i) {
    alpert_forward(bases[i - 1], patch.data(), work.data());
    double res;
    long long kept;
    threshold_cost(work.data(), n, t, &res, &kept);
    double total = res + double(kept) * t * t;
    if (total < best_total) {
      best_total = total;
      best_res = res;
      best_kept = kept;
      best = i;
    }
  }

  LeafSelection out;
  out.sq = sq;
  out.flow = flows[best];
  const double* coef = patch.data();
  if (best > 0) {
    alpert_forward(bases[best - 1], patch.data(), work.data());
    coef = work.data();
  }
  ThresholdPick pick = threshold_select(coef, n, t);
  out.kept = std::move(pick.kept);
  out.cost = pick.cost;
  return out;
}

std::vector<int> band_widths(int side, const FlowConfig& cfg) {
  std::vector<int> widths;
  if (side < cfg.min_leaf) {
    widths.push_back(side);
  } else {
    for (int w = cfg.min_leaf; w <= side; w *= 2) widths.push_back(w);
  }
  return widths;
}

struct DpNode {
  double residual = 0;
  long long kept = 0;
  bool take_leaf = true;
};

}  // namespace

AlpertCache build_alpert_cache(const std::vector<int>& widths,
                               const FlowConfig& cfg) {
  AlpertCache cache;
  for (int w : widths) {
    if (cache.flows.count(w)) continue;
    auto flows = enumerate_flows(w, cfg);
    std::vector<AlpertBasis> bases;
    bases.reserve(flows.size() > 0 ? flows.size() - 1 : 0);
    for (size_t i = 1; i < flows.size(); ++i)
      bases.push_back(build_alpert(w, *flows[i], cfg.moments));
    cache.flows.emplace(w, std::move(flows));
    cache.bases.emplace(w, std::move(bases));
  }
  return cache;
}

LeafSelection square_cost(const std::vector<double>& patch,
                          const DyadicSquare& sq, double t,
                          const FlowConfig& cfg) {
  validate_flow_config(cfg);
  if (!(t > 0)) throw parameter_error("square_cost: T must be positive");
  if (sq.w < 1 || int(patch.size()) != sq.w * sq.w)
    throw input_error("square_cost: patch size does not match square");
  AlpertCache cache = build_alpert_cache({sq.w}, cfg);
  DyadicSquare local{0, 0, sq.w};
  LeafSelection out = square_cost_core(patch.data(), sq.w, local, t,
                                       cache.flows.at(sq.w), cache.bases.at(sq.w));
  out.sq = sq;
  return out;
}

BandSelection best_band_geometry(const Subband& band, double t,
                                 const FlowConfig& cfg, int threads) {
  AlpertCache cache = build_alpert_cache(band_widths(band.side, cfg), cfg);
  return best_band_geometry(band, t, cfg, cache, threads);
}

BandSelection best_band_geometry(const Subband& band, double t,
                                 const FlowConfig& cfg, const AlpertCache& cache,
                                 int threads) {
  validate_flow_config(cfg);
  if (!(t > 0)) throw parameter_error("best_band_geometry: T must be positive");
  if (band.side < 1 || band.c.size() != size_t(band.side) * size_t(band.side))
    throw input_error("best_band_geometry: inconsistent subband");

  const int sb = band.side;
  const std::vector<int> widths = band_widths(sb, cfg);
  const int nw = int(widths.size());

  // leaf candidates for every admissible square, one slot per job so the
  // parallel schedule cannot affect the outcome
  std::vector<std::vector<LeafSelection>> leaf(nw);
  struct Job {
    int wi;
    int k;
  };
  std::vector<Job> jobs;
  for (int wi = 0; wi < nw; ++wi) {
    int per = sb / widths[wi];
    leaf[wi].resize(size_t(per) * per);
    for (int k = 0; k < per * per; ++k) jobs.push_back({wi, k});
  }

  auto run_job = [&](const Job& jb) {
    const int w = widths[jb.wi];
    const int per = sb / w;
    DyadicSquare sq{(jb.k % per) * w, (jb.k / per) * w, w};
    leaf[jb.wi][jb.k] = square_cost_core(band.c.data(), sb, sq, t,
                                         cache.flows.at(w), cache.bases.at(w));
  };

  if (threads == 1) {
    for (const Job& jb : jobs) run_job(jb);  // serial reference path
  } else {
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (long i = 0; i < long(jobs.size()); ++i) run_job(jobs[size_t(i)]);
  }

  // bottom-up merge: a node keeps its own square unless the four children
  // are strictly cheaper together
  std::vector<std::vector<DpNode>> node(nw);
  for (int wi = 0; wi < nw; ++wi) {
    const int w = widths[wi];
    const int per = sb / w;
    node[wi].resize(size_t(per) * per);
    for (int k = 0; k < per * per; ++k) {
      DpNode nd{leaf[wi][size_t(k)].cost.residual_sq,
                leaf[wi][size_t(k)].cost.kept, true};
      if (wi > 0) {
        const int cper = per * 2;
        const int cx = (k % per) * 2, cy = (k / per) * 2;
        double res = 0;
        long long kept = 0;
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx) {
            const DpNode& ch = node[wi - 1][size_t(cy + dy) * cper + (cx + dx)];
            res += ch.residual;
            kept += ch.kept;
          }
        double leaf_total = nd.residual + double(nd.kept) * t * t;
        double child_total = res + double(kept) * t * t;
        if (child_total < leaf_total) {
          nd.residual = res;
          nd.kept = kept;
          nd.take_leaf = false;
        }
      }
      node[wi][size_t(k)] = nd;
    }
  }

  BandSelection out;
  out.level = band.level;
  out.orient = band.orient;
  out.side = sb;
  out.cost.t = t;

  auto emit = [&](auto&& self, int wi, int x, int y) -> void {
    const int w = widths[wi];
    const int per = sb / w;
    const DpNode& nd = node[wi][size_t(y / w) * per + (x / w)];
    if (nd.take_leaf) {
      out.leaves.push_back(leaf[wi][size_t(y / w) * per + (x / w)]);
      return;
    }
    const int h = w / 2;
    self(self, wi - 1, x, y);
    self(self, wi - 1, x + h, y);
    self(self, wi - 1, x, y + h);
    self(self, wi - 1, x + h, y + h);
  };
  emit(emit, nw - 1, 0, 0);

  for (const LeafSelection& lf : out.leaves) {
    out.cost.residual_sq += lf.cost.residual_sq;
    out.cost.kept += lf.cost.kept;
  }
  return out;
}

Selection best_geometry(const WaveletPyramid& pyr, double t,
                        const FlowConfig& cfg, int threads) {
  validate_pyramid(pyr);
  validate_flow_config(cfg);
  if (!(t > 0)) throw parameter_error("best_geometry: T must be positive");

  Selection sel;
  sel.side = pyr.side;
  sel.depth = pyr.depth;
  sel.t = t;
  sel.approx_count = (long long)(pyr.approx.size());
  sel.cost.t = t;

  std::vector<int> widths;
  for (int d = 1; d <= pyr.depth; ++d)
    for (int w : band_widths(pyr.side >> d, cfg)) widths.push_back(w);
  AlpertCache cache = build_alpert_cache(widths, cfg);

  for (const Subband& band : pyr.details) {
    sel.bands.push_back(best_band_geometry(band, t, cfg, cache, threads));
    sel.cost.residual_sq += sel.bands.back().cost.residual_sq;
    sel.cost.kept += sel.bands.back().cost.kept;
  }
  sel.cost.kept += sel.approx_count;
  return sel;
}

Image reconstruct(const Selection& sel, const WaveletPyramid& pyr,
                  const FilterPair& filt) {
  validate_pyramid(pyr);
  if (sel.side != pyr.side || sel.depth != pyr.depth ||
      sel.bands.size() != pyr.details.size())
    throw input_error("reconstruct: selection does not match pyramid shape");
  if (!(sel.t > 0)) throw parameter_error("reconstruct: selection has no threshold");

  WaveletPyramid kept = pyr;
  for (size_t bi = 0; bi < sel.bands.size(); ++bi) {
    const BandSelection& bs = sel.bands[bi];
    const Subband& src = pyr.details[bi];
    if (bs.level != src.level || bs.orient != src.orient || bs.side != src.side)
      throw input_error("reconstruct: selection does not match pyramid shape");

    Subband& dst = kept.details[bi];
    std::fill(dst.c.begin(), dst.c.end(), 0.0);
    for (const LeafSelection& lf : bs.leaves) {
      const int w = lf.sq.w;
      const int n = w * w;
      std::vector<double> patch(n);
      extract_patch(src.c.data(), src.side, lf.sq, patch.data());
      if (lf.flow) {
        AlpertBasis basis = build_alpert(w, *lf.flow, filt.vanishing_moments);
        std::vector<double> coef(n), trimmed(n, 0.0);
        alpert_forward(basis, patch.data(), coef.data());
        for (int i : lf.kept) trimmed[size_t(i)] = coef[size_t(i)];
        alpert_inverse(basis, trimmed.data(), patch.data());
        for (int py = 0; py < w; ++py)
          for (int px = 0; px < w; ++px)
            dst.c[size_t(lf.sq.y + py) * dst.side + (lf.sq.x + px)] =
                patch[size_t(py) * w + px];
      } else {
        for (int i : lf.kept)
          dst.c[size_t(lf.sq.y + i / w) * dst.side + (lf.sq.x + i % w)] =
              patch[size_t(i)];
      }
    }
  }
  return idwt2(kept, filt);
}

std::string serialize_selection(const Selection& sel) {
  std::ostringstream os;
  os << serialize_geometry(sel.geometry());
  char buf[64];
  os << "kept_count=" << sel.cost.kept << '\n';
  std::snprintf(buf, sizeof buf, "%.17g", sel.cost.residual_sq);
  os << "residual_sq=" << buf << '\n';
  std::snprintf(buf, sizeof buf, "%.17g", sel.cost.total());
  os << "total_cost=" << buf << '\n';
  return os.str();
}

}  // namespace bandlet
