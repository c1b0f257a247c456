// Times the OpenMP kernels against their serial references on one synthetic
// problem and reports the largest disagreement.
//
//   bench_kernels [n] [c] [repeats]

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "credal/datagen.hpp"
#include "credal/engine.hpp"
#include "credal/kernels.hpp"

using namespace credal;

namespace {

template <typename F>
double seconds(int repeats, F&& f) {
  const auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r) f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / repeats;
}

void report(const char* name, double serial, double parallel, double diff) {
  std::printf("%-18s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx   max|diff| %.3g\n",
              name, serial * 1e3, parallel * 1e3, serial / parallel, diff);
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 20000;
  const std::size_t c = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 5;
  const int repeats = argc > 3 ? std::atoi(argv[3]) : 5;

  ScenarioSpec spec = builtin_scenario("S1-2");
  for (auto& cl : spec.clusters) cl.size = n / spec.clusters.size() + 1;
  const Dataset data = generate(spec);
  const FitConfig cfg;
  const FocalStructure s = enumerate_focal_sets(c);
  const Matrix centers = init_centers(data, c, 1);
  const Matrix bary = compute_barycenters(centers, s);
  std::printf("n=%zu p=%zu c=%zu focal sets=%zu threads=%d\n", data.size(), data.dims(), c,
              s.size(), omp_get_max_threads());

  Matrix d_par, d_ref;
  const double t_dr = seconds(repeats, [&] { d_ref = ref::squared_distances(data.features, bary); });
  const double t_dp = seconds(repeats, [&] { d_par = squared_distances(data.features, bary); });
  report("squared_distances", t_dr, t_dp, max_abs_diff(d_ref, d_par));

  CredalPartition m_par, m_ref;
  const double t_mr = seconds(repeats, [&] { m_ref = ref::update_masses(d_ref, s, cfg); });
  const double t_mp = seconds(repeats, [&] { m_par = update_masses(d_ref, s, cfg); });
  report("update_masses", t_mr, t_mp, max_abs_diff(m_ref.masses, m_par.masses));

  CenterSystem a_par, a_ref;
  const double t_ar = seconds(repeats, [&] {
    a_ref = ref::assemble_system(data.features, m_ref, std::nullopt, s, cfg);
  });
  const double t_ap = seconds(repeats, [&] {
    a_par = assemble_system(data.features, m_ref, std::nullopt, s, cfg);
  });
  report("assemble_system", t_ar, t_ap,
         std::max(max_abs_diff(a_ref.lhs, a_par.lhs), max_abs_diff(a_ref.rhs, a_par.rhs)));

  double j_ref = 0.0, j_par = 0.0;
  const double t_jr = seconds(repeats, [&] {
    j_ref = ref::objective(data.features, m_ref, centers, std::nullopt, s, cfg);
  });
  const double t_jp = seconds(repeats, [&] {
    j_par = objective(data.features, m_ref, centers, std::nullopt, s, cfg);
  });
  report("objective", t_jr, t_jp, std::abs(j_ref - j_par));
  return 0;
}
