#include <omp.h>

#include <cmath>
#include <cstdio>

#include "bandlet/rng.hpp"
#include "bandlet/selection.hpp"

using namespace bandlet;

// Times the geometry search over one detail band: the serial reference path
// against the OpenMP path, and checks they agree bit for bit.

int main() {
  const int side = 32;
  Subband band;
  band.level = 1;
  band.orient = Orientation::H;
  band.side = side;
  band.c.resize(static_cast<size_t>(side) * side);
  Philox rng(2024);
  for (double& v : band.c) v = rng.next_gaussian();

  FlowConfig cfg = FlowConfig::for_moments(2);
  const double t = 2.5;
  const int reps = 5;

  double best_serial = 1e300, best_parallel = 1e300;
  BandSelection ref, par;
  for (int r = 0; r < reps; ++r) {
    double t0 = omp_get_wtime();
    ref = best_band_geometry(band, t, cfg, 1);
    best_serial = std::min(best_serial, omp_get_wtime() - t0);

    t0 = omp_get_wtime();
    par = best_band_geometry(band, t, cfg, 0);
    best_parallel = std::min(best_parallel, omp_get_wtime() - t0);
  }

  bool same = ref.cost.total() == par.cost.total() &&
              ref.leaves.size() == par.leaves.size();
  for (size_t i = 0; same && i < ref.leaves.size(); ++i) {
    same = ref.leaves[i].sq == par.leaves[i].sq &&
           ref.leaves[i].flow == par.leaves[i].flow &&
           ref.leaves[i].kept == par.leaves[i].kept;
  }

  std::printf("band %dx%d, threshold %.3g, best of %d runs\n", side, side, t,
              reps);
  std::printf("serial:    %8.3f ms\n", best_serial * 1e3);
  std::printf("openmp:    %8.3f ms  (max threads %d)\n", best_parallel * 1e3,
              omp_get_max_threads());
  std::printf("speedup:   %8.2fx\n", best_serial / best_parallel);
  std::printf("identical: %s\n", same ? "yes" : "NO");
  return same ? 0 : 1;
}
