#include "bandlet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace bandlet {

double GeometricFlow::gamma(double t) const {
  double v = 0;
  for (size_t i = coef.size(); i-- > 0;) v = v * t + coef[i];
  return delta * v;
}

double GeometricFlow::gamma_prime(double t) const {
  double v = 0;
  for (size_t i = coef.size(); i-- > 1;) v = v * t + double(i) * coef[i];
  return delta * v;
}

void validate_flow_config(const FlowConfig& cfg) {
  if (cfg.moments < 1) throw parameter_error("flow config: moments must be >= 1");
  if (cfg.degree < 0 || cfg.degree > cfg.moments - 1)
    throw parameter_error("flow config: degree must be in [0, moments-1]");
  if (cfg.levels < 1) throw parameter_error("flow config: levels must be >= 1");
  if (cfg.min_leaf < 1 || !is_pow2(cfg.min_leaf))
    throw parameter_error("flow config: min_leaf must be a power of two >= 1");
  if (cfg.max_flows < 0) throw parameter_error("flow config: max_flows < 0");
  if (!(cfg.slope_cap > 0)) throw parameter_error("flow config: slope_cap <= 0");
}

std::vector<std::optional<GeometricFlow>> enumerate_flows(int width,
                                                          const FlowConfig& cfg) {
  validate_flow_config(cfg);
  if (width < 1 || !is_pow2(width))
    throw parameter_error("enumerate_flows: width must be a power of two >= 1");

  std::vector<std::optional<GeometricFlow>> out;
  out.emplace_back(std::nullopt);
  if (width < 2 || width < cfg.min_leaf || !cfg.enable) return out;

  const int q = cfg.levels;
  const int lo = -(q / 2);  // q values lo..lo+q-1, centered at zero
  const int nc = cfg.degree + 1;
  const double delta = 1.0 / width;

  for (FlowAxis axis : {FlowAxis::Horizontal, FlowAxis::Vertical}) {
    std::vector<int> idx(nc, 0);
    for (;;) {
      GeometricFlow fl;
      fl.axis = axis;
      fl.delta = delta;
      fl.coef.resize(nc);
      for (int i = 0; i < nc; ++i) fl.coef[i] = lo + idx[i];

      double worst = 0;
      for (int t = 0; t < width; ++t)
        worst = std::max(worst, std::fabs(fl.gamma_prime(t)));
      if (worst <= cfg.slope_cap) {
        out.push_back(std::move(fl));
        if (cfg.max_flows > 0 && int(out.size()) >= cfg.max_flows) return out;
      }

      // odometer, most significant digit first for lexicographic order
      int i = nc - 1;
      while (i >= 0 && ++idx[i] == q) idx[i--] = 0;
      if (i < 0) break;
    }
  }
  return out;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// subtract projections onto an orthonormal set, two passes for stability
void project_out(std::vector<double>& v,
                 const std::vector<std::vector<double>>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) {
      double c = dot(v, b);
      for (size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
    }
}

// Gram-Schmidt of the given vectors in order; near-dependent inputs are
// reported through `ok` instead of being silently dropped
std::vector<std::vector<double>> gram_schmidt(
    std::vector<std::vector<double>> vecs, bool* ok) {
  std::vector<std::vector<double>> out;
  for (auto& v : vecs) {
    double n0 = norm(v);
    project_out(v, out);
    double n1 = norm(v);
    if (n1 <= 1e-10 * std::max(1.0, n0)) {
      if (ok) *ok = false;
      continue;
    }
    for (double& x : v) x /= n1;
    out.push_back(std::move(v));
  }
  return out;
}

// per-line construction: hierarchical split of the position-sorted sites,
// scaling functions = polynomials of degree < p, wavelets = the orthogonal
// complement of the parent polynomials inside the two child scaling spans
void line_basis(AlpertLine& ln, int p) {
  const int n = ln.n();
  ln.basis.assign(size_t(n) * n, 0.0);
  ln.coarse = 0;
  ln.degenerate = false;
  if (n == 1) {
    ln.basis[0] = 1.0;
    ln.coarse = 1;
    return;
  }

  // centered/scaled coordinate for conditioning; same span as raw monomials
  double tmin = ln.pos[0], tmax = ln.pos[0];
  for (double t : ln.pos) {
    tmin = std::min(tmin, t);
    tmax = std::max(tmax, t);
  }
  const double mid = 0.5 * (tmin + tmax);
  const double half = std::max(0.5 * (tmax - tmin), 1e-30);
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = (ln.pos[i] - mid) / half;

  auto monomials = [&](int lo, int hi, int count) {
    std::vector<std::vector<double>> m;
    for (int k = 0; k < count; ++k) {
      std::vector<double> v(n, 0.0);
      for (int i = lo; i < hi; ++i) v[i] = std::pow(u[i], k);
      m.push_back(std::move(v));
    }
    return m;
  };

  bool ok = true;
  std::vector<std::vector<double>> wavelets;

  // returns the scaling vectors spanning degree < p polynomials on [lo, hi)
  auto build = [&](auto&& self, int lo, int hi) -> std::vector<std::vector<double>> {
    const int m = hi - lo;
    if (m <= p) return gram_schmidt(monomials(lo, hi, m), &ok);

    const int split = lo + (m + 1) / 2;
    std::vector<std::vector<double>> kids = self(self, lo, split);
    std::vector<std::vector<double>> right = self(self, split, hi);
    for (auto& v : right) kids.push_back(std::move(v));

    std::vector<std::vector<double>> scal =
        gram_schmidt(monomials(lo, hi, p), &ok);

    // pivoted complement of the polynomials inside span(kids)
    const int want = int(kids.size()) - int(scal.size());
    for (auto& v : kids) project_out(v, scal);
    for (int step = 0; step < want; ++step) {
      size_t best = 0;
      double bn = -1;
      for (size_t i = 0; i < kids.size(); ++i) {
        double nn = norm(kids[i]);
        if (nn > bn) {
          bn = nn;
          best = i;
        }
      }
      if (bn <= 1e-10) {
        ok = false;
        break;
      }
      std::vector<double> w = kids[best];
      kids.erase(kids.begin() + best);
      project_out(w, scal);      // polish
      project_out(w, wavelets);
      double nn = norm(w);
      if (nn <= 1e-12) {
        ok = false;
        break;
      }
      for (double& x : w) x /= nn;
      for (auto& v : kids) {
        double c = dot(v, w);
        for (int i = 0; i < n; ++i) v[i] -= c * w[i];
      }
      wavelets.push_back(std::move(w));
    }
    return scal;
  };

  std::vector<std::vector<double>> coarse = build(build, 0, n);

  if (!ok || int(coarse.size()) + int(wavelets.size()) != n) {
    // duplicate positions (or a numerically void split): identity fallback
    ln.degenerate = true;
    ln.coarse = 0;
    ln.basis.assign(size_t(n) * n, 0.0);
    for (int i = 0; i < n; ++i) ln.basis[size_t(i) * n + i] = 1.0;
    return;
  }

  ln.coarse = int(coarse.size());
  int r = 0;
  for (const auto& v : coarse) {
    for (int i = 0; i < n; ++i) ln.basis[size_t(r) * n + i] = v[i];
    ++r;
  }
  for (const auto& v : wavelets) {
    for (int i = 0; i < n; ++i) ln.basis[size_t(r) * n + i] = v[i];
    ++r;
  }
}

}  // namespace

AlpertBasis build_alpert(int width, const GeometricFlow& flow, int p) {
  if (width < 2 || !is_pow2(width))
    throw parameter_error("build_alpert: width must be a power of two >= 2");
  if (p < 1) throw parameter_error("build_alpert: p must be >= 1");
  if (flow.coef.empty()) throw parameter_error("build_alpert: empty flow");

  AlpertBasis b;
  b.width = width;
  b.p = p;
  b.flow = flow;

  // key -> (site, position); iteration order makes positions ascending
  std::map<long, AlpertLine> lines;
  if (flow.axis == FlowAxis::Vertical) {
    for (int y = 0; y < width; ++y) {
      long shift = std::lround(flow.gamma(y));
      for (int x = 0; x < width; ++x) {
        AlpertLine& ln = lines[x - shift];
        ln.sites.push_back(y * width + x);
        ln.pos.push_back(y);
      }
    }
  } else {
    for (int x = 0; x < width; ++x) {
      long shift = std::lround(flow.gamma(x));
      for (int y = 0; y < width; ++y) {
        AlpertLine& ln = lines[y - shift];
        ln.sites.push_back(y * width + x);
        ln.pos.push_back(x);
      }
    }
  }

  b.offset.push_back(0);
  for (auto& [key, ln] : lines) {
    (void)key;
    // keep sites sorted by along-line position
    std::vector<size_t> order(ln.sites.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t c) { return ln.pos[a] < ln.pos[c]; });
    AlpertLine sorted;
    for (size_t i : order) {
      sorted.sites.push_back(ln.sites[i]);
      sorted.pos.push_back(ln.pos[i]);
    }
    line_basis(sorted, p);
    if (sorted.degenerate) ++b.degenerate_lines;
    b.offset.push_back(b.offset.back() + sorted.n());
    b.lines.push_back(std::move(sorted));
  }
  return b;
}

void alpert_forward(const AlpertBasis& b, const double* patch, double* coef) {
  for (size_t li = 0; li < b.lines.size(); ++li) {
    const AlpertLine& ln = b.lines[li];
    const int n = ln.n();
    double* out = coef + b.offset[li];
    for (int r = 0; r < n; ++r) {
      double s = 0;
      const double* row = &ln.basis[size_t(r) * n];
      for (int i = 0; i < n; ++i) s += row[i] * patch[ln.sites[i]];
      out[r] = s;
    }
  }
}

void alpert_inverse(const AlpertBasis& b, const double* coef, double* patch) {
  for (size_t li = 0; li < b.lines.size(); ++li) {
    const AlpertLine& ln = b.lines[li];
    const int n = ln.n();
    const double* in = coef + b.offset[li];
    for (int i = 0; i < n; ++i) {
      double s = 0;
      for (int r = 0; r < n; ++r) s += ln.basis[size_t(r) * n + i] * in[r];
      patch[ln.sites[i]] = s;
    }
  }
}

std::vector<double> alpert_forward(const AlpertBasis& b,
                                   const std::vector<double>& patch) {
  if (int(patch.size()) != b.total())
    throw input_error("alpert_forward: dimension mismatch");
  std::vector<double> coef(patch.size());
  alpert_forward(b, patch.data(), coef.data());
  return coef;
}

std::vector<double> alpert_inverse(const AlpertBasis& b,
                                   const std::vector<double>& coef) {
  if (int(coef.size()) != b.total())
    throw input_error("alpert_inverse: dimension mismatch");
  std::vector<double> patch(coef.size());
  alpert_inverse(b, coef.data(), patch.data());
  return patch;
}

void check_tiling(const BandGeometry& bg) {
  if (bg.side < 1 || !is_pow2(bg.side))
    throw input_error("geometry: subband side must be a power of two");
  size_t idx = 0;
  auto walk = [&](auto&& self, int x, int y, int w) -> void {
    if (idx < bg.leaves.size()) {
      const DyadicSquare& sq = bg.leaves[idx].sq;
      if (sq.x == x && sq.y == y && sq.w == w) {
        ++idx;
        return;
      }
    }
    if (w == 1) throw input_error("geometry: leaves do not tile the subband");
    const int h = w / 2;
    self(self, x, y, h);
    self(self, x + h, y, h);
    self(self, x, y + h, h);
    self(self, x + h, y + h, h);
  };
  walk(walk, 0, 0, bg.side);
  if (idx != bg.leaves.size())
    throw input_error("geometry: extra leaves beyond the subband tiling");
}

std::string serialize_geometry(const QuadtreeGeometry& g) {
  std::ostringstream os;
  for (const BandGeometry& bg : g.bands) {
    for (const QuadLeaf& lf : bg.leaves) {
      os << bg.level << ',' << orientation_char(bg.orient) << ',' << lf.sq.x
         << ',' << lf.sq.y << ',' << lf.sq.w << ',';
      if (!lf.flow) {
        os << '-';
      } else {
        os << (lf.flow->axis == FlowAxis::Horizontal ? 'H' : 'V');
        for (int c : lf.flow->coef) os << ',' << c;
      }
      os << '\n';
    }
  }
  return os.str();
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

int to_int(const std::string& s) {
  size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (...) {
    throw input_error("geometry: bad integer field '" + s + "'");
  }
  if (pos != s.size()) throw input_error("geometry: bad integer field '" + s + "'");
  return v;
}

}  // namespace

QuadtreeGeometry parse_geometry(const std::string& text, int side, int depth) {
  if (side < 2 || !is_pow2(side) || depth < 1 || (side >> depth) < 1)
    throw parameter_error("parse_geometry: bad side/depth");

  QuadtreeGeometry g;
  g.side = side;
  g.depth = depth;
  g.bands.resize(size_t(depth) * 3);
  for (int d = 1; d <= depth; ++d)
    for (int o = 0; o < 3; ++o) {
      BandGeometry& bg = g.bands[size_t(d - 1) * 3 + o];
      bg.level = d;
      bg.orient = Orientation(o);
      bg.side = side >> d;
    }

  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (line.empty() || line[0] == '#' ||
        line.find('=') != std::string::npos)
      continue;
    std::vector<std::string> f = split_commas(line);
    if (f.size() < 6) throw input_error("geometry: short leaf record");

    int d = to_int(f[0]);
    if (d < 1 || d > depth) throw input_error("geometry: level out of range");
    Orientation o;
    if (f[1] == "H") o = Orientation::H;
    else if (f[1] == "V") o = Orientation::V;
    else if (f[1] == "D") o = Orientation::D;
    else throw input_error("geometry: bad orientation '" + f[1] + "'");

    QuadLeaf lf;
    lf.sq.x = to_int(f[2]);
    lf.sq.y = to_int(f[3]);
    lf.sq.w = to_int(f[4]);
    BandGeometry& bg = g.bands[size_t(d - 1) * 3 + size_t(o)];
    if (lf.sq.w < 1 || !is_pow2(lf.sq.w) || lf.sq.x < 0 || lf.sq.y < 0 ||
        lf.sq.x + lf.sq.w > bg.side || lf.sq.y + lf.sq.w > bg.side ||
        lf.sq.x % lf.sq.w != 0 || lf.sq.y % lf.sq.w != 0)
      throw input_error("geometry: leaf square out of band or misaligned");

    if (f[5] == "-") {
      if (f.size() != 6) throw input_error("geometry: no-flow leaf with coefficients");
    } else if (f[5] == "H" || f[5] == "V") {
      if (f.size() < 7) throw input_error("geometry: flow without coefficients");
      GeometricFlow fl;
      fl.axis = f[5] == "H" ? FlowAxis::Horizontal : FlowAxis::Vertical;
      fl.delta = 1.0 / lf.sq.w;
      for (size_t i = 6; i < f.size(); ++i) fl.coef.push_back(to_int(f[i]));
      lf.flow = std::move(fl);
    } else {
      throw input_error("geometry: bad axis '" + f[5] + "'");
    }
    bg.leaves.push_back(std::move(lf));
  }

  for (const BandGeometry& bg : g.bands) check_tiling(bg);
  return g;
}

}  // namespace bandlet
