#include "bandlet/pyramid.hpp"

#include <cmath>

namespace bandlet {

char orientation_char(Orientation o) {
  switch (o) {
    case Orientation::H: return 'H';
    case Orientation::V: return 'V';
    default: return 'D';
  }
}

namespace {

const double kDb1[2] = {0.70710678118654752, 0.70710678118654752};
const double kDb2[4] = {0.48296291314453414, 0.83651630373780791,
                        0.22414386804201338, -0.12940952255126038};
const double kDb3[6] = {0.33267055295008262, 0.80689150931109258,
                        0.45987750211849157, -0.13501102001025459,
                        -0.085441273882026662, 0.035226291885709537};
const double kDb4[8] = {0.2303778133088965, 0.71484657055291565,
                        0.63088076792985891, -0.027983769416859854,
                        -0.18703481171909308, 0.030841381835560764,
                        0.032883011666885199, -0.010597401785069032};

}  // namespace

FilterPair FilterPair::daubechies(int p) {
  FilterPair f;
  switch (p) {
    case 1: f.lowpass.assign(kDb1, kDb1 + 2); break;
    case 2: f.lowpass.assign(kDb2, kDb2 + 4); break;
    case 3: f.lowpass.assign(kDb3, kDb3 + 6); break;
    case 4: f.lowpass.assign(kDb4, kDb4 + 8); break;
    default: throw parameter_error("daubechies: p must be in 1..4");
  }
  f.name = "db" + std::to_string(p);
  f.vanishing_moments = p;
  const int L = int(f.lowpass.size());
  f.highpass.resize(L);
  for (int k = 0; k < L; ++k)
    f.highpass[k] = ((k & 1) ? -1.0 : 1.0) * f.lowpass[L - 1 - k];
  return f;
}

void validate_filter(const FilterPair& f) {
  if (f.vanishing_moments < 1) throw parameter_error("filter: p must be >= 1");
  if (f.lowpass.empty() || f.lowpass.size() != f.highpass.size() ||
      f.lowpass.size() % 2 != 0)
    throw parameter_error("filter: lowpass/highpass must be equal even length");
  for (double v : f.lowpass)
    if (!std::isfinite(v)) throw parameter_error("filter: non-finite tap");
}

Subband& WaveletPyramid::band(int level, Orientation o) {
  if (level < 1 || level > depth) throw parameter_error("band: level out of range");
  return details[size_t(level - 1) * 3 + size_t(o)];
}

const Subband& WaveletPyramid::band(int level, Orientation o) const {
  if (level < 1 || level > depth) throw parameter_error("band: level out of range");
  return details[size_t(level - 1) * 3 + size_t(o)];
}

double WaveletPyramid::sumsq() const {
  double s = 0;
  for (double v : approx) s += v * v;
  for (const Subband& b : details)
    for (double v : b.c) s += v * v;
  return s;
}

void validate_pyramid(const WaveletPyramid& pyr) {
  if (pyr.side < 2 || !is_pow2(pyr.side))
    throw input_error("pyramid: side must be a power of two >= 2");
  if (pyr.depth < 1 || (pyr.side >> pyr.depth) < 1)
    throw input_error("pyramid: bad depth");
  int as = pyr.side >> pyr.depth;
  if (pyr.approx.size() != size_t(as) * size_t(as))
    throw input_error("pyramid: approx size mismatch");
  if (pyr.details.size() != size_t(pyr.depth) * 3)
    throw input_error("pyramid: wrong number of subbands");
  for (int d = 1; d <= pyr.depth; ++d) {
    int sb = pyr.side >> d;
    for (int o = 0; o < 3; ++o) {
      const Subband& b = pyr.details[size_t(d - 1) * 3 + o];
      if (b.level != d || b.side != sb ||
          b.c.size() != size_t(sb) * size_t(sb) || int(b.orient) != o)
        throw input_error("pyramid: inconsistent subband sizes");
    }
  }
}

int full_depth(int side) { return log2_int(side); }

namespace {

// periodic analysis: lo[m] = sum_k h[k] s[(2m+k) mod n], same for hi with g
void analyze1d(const double* s, int n, const FilterPair& f, double* lo,
               double* hi) {
  const int L = int(f.lowpass.size());
  const int half = n / 2;
  for (int m = 0; m < half; ++m) {
    double a = 0, d = 0;
    for (int k = 0; k < L; ++k) {
      double v = s[(2 * m + k) % n];
      a += f.lowpass[k] * v;
      d += f.highpass[k] * v;
    }
    lo[m] = a;
    hi[m] = d;
  }
}

// transpose of analyze1d
void synth1d(const double* lo, const double* hi, int n, const FilterPair& f,
             double* s) {
  const int L = int(f.lowpass.size());
  const int half = n / 2;
  for (int i = 0; i < n; ++i) s[i] = 0;
  for (int m = 0; m < half; ++m) {
    for (int k = 0; k < L; ++k)
      s[(2 * m + k) % n] += f.lowpass[k] * lo[m] + f.highpass[k] * hi[m];
  }
}

}  // namespace

WaveletPyramid dwt2(const Image& img, int depth, const FilterPair& filt) {
  validate_image(img);
  validate_filter(filt);
  if (depth < 1) throw parameter_error("dwt2: depth must be >= 1");
  if ((img.side >> depth) < 1)
    throw parameter_error("dwt2: depth too large for side");

  WaveletPyramid pyr;
  pyr.side = img.side;
  pyr.depth = depth;

  std::vector<double> cur = img.pix;
  int n = img.side;
  std::vector<double> rlo, rhi, col, clo, chi;
  for (int lev = 1; lev <= depth; ++lev) {
    const int half = n / 2;
    rlo.assign(size_t(half) * n, 0.0);  // [y*half + m], low along x
    rhi.assign(size_t(half) * n, 0.0);
    for (int y = 0; y < n; ++y)
      analyze1d(&cur[size_t(y) * n], n, filt, &rlo[size_t(y) * half],
                &rhi[size_t(y) * half]);

    Subband bh{lev, Orientation::H, half,
               std::vector<double>(size_t(half) * half)};
    Subband bv{lev, Orientation::V, half,
               std::vector<double>(size_t(half) * half)};
    Subband bd{lev, Orientation::D, half,
               std::vector<double>(size_t(half) * half)};
    std::vector<double> ll(size_t(half) * half);

    col.resize(n);
    clo.resize(half);
    chi.resize(half);
    for (int x = 0; x < half; ++x) {
      for (int y = 0; y < n; ++y) col[y] = rlo[size_t(y) * half + x];
      analyze1d(col.data(), n, filt, clo.data(), chi.data());
      for (int m = 0; m < half; ++m) {
        ll[size_t(m) * half + x] = clo[m];
        bv.c[size_t(m) * half + x] = chi[m];
      }
      for (int y = 0; y < n; ++y) col[y] = rhi[size_t(y) * half + x];
      analyze1d(col.data(), n, filt, clo.data(), chi.data());
      for (int m = 0; m < half; ++m) {
        bh.c[size_t(m) * half + x] = clo[m];
        bd.c[size_t(m) * half + x] = chi[m];
      }
    }
    pyr.details.push_back(std::move(bh));
    pyr.details.push_back(std::move(bv));
    pyr.details.push_back(std::move(bd));
    cur = std::move(ll);
    n = half;
  }
  pyr.approx = std::move(cur);
  return pyr;
}

Image idwt2(const WaveletPyramid& pyr, const FilterPair& filt) {
  validate_pyramid(pyr);
  validate_filter(filt);

  std::vector<double> cur = pyr.approx;
  int n = pyr.approx_side();
  std::vector<double> rlo, rhi, clo, chi, col;
  for (int lev = pyr.depth; lev >= 1; --lev) {
    const int n2 = 2 * n;
    const Subband& bh = pyr.band(lev, Orientation::H);
    const Subband& bv = pyr.band(lev, Orientation::V);
    const Subband& bd = pyr.band(lev, Orientation::D);

    rlo.assign(size_t(n2) * n, 0.0);  // [y*n + x], y in [0,n2)
    rhi.assign(size_t(n2) * n, 0.0);
    clo.resize(n);
    chi.resize(n);
    col.resize(n2);
    for (int x = 0; x < n; ++x) {
      for (int m = 0; m < n; ++m) {
        clo[m] = cur[size_t(m) * n + x];
        chi[m] = bv.c[size_t(m) * n + x];
      }
      synth1d(clo.data(), chi.data(), n2, filt, col.data());
      for (int y = 0; y < n2; ++y) rlo[size_t(y) * n + x] = col[y];

      for (int m = 0; m < n; ++m) {
        clo[m] = bh.c[size_t(m) * n + x];
        chi[m] = bd.c[size_t(m) * n + x];
      }
      synth1d(clo.data(), chi.data(), n2, filt, col.data());
      for (int y = 0; y < n2; ++y) rhi[size_t(y) * n + x] = col[y];
    }

    std::vector<double> next(size_t(n2) * n2);
    for (int y = 0; y < n2; ++y)
      synth1d(&rlo[size_t(y) * n], &rhi[size_t(y) * n], n2, filt,
              &next[size_t(y) * n2]);
    cur = std::move(next);
    n = n2;
  }

  Image out(n);
  out.pix = std::move(cur);
  return out;
}

}  // namespace bandlet
