#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

// Parallel execution helpers. Every parallel site in the library follows the
// same discipline so results are bitwise identical to the serial reference:
//   * loops write only to their own index (no shared accumulators), and
//   * reductions store one partial per index and are summed afterwards in a
//     fixed serial order, independent of thread count and scheduling.
// ExecPolicy::kSerial runs the plain reference loop; the benchmark target and
// the determinism tests compare the two paths on identical inputs.
namespace eotk::parallel {

enum class ExecPolicy { kSerial, kParallel };

inline int hardware_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Runs f(i) for i in [0, n). With kParallel the iterations are distributed
// across OpenMP threads; f must only write to state owned by index i.
template <class F>
void parallel_for(ExecPolicy policy, std::ptrdiff_t n, F&& f) {
  if (policy == ExecPolicy::kParallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
    return;
#endif
  }
  for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
}

// Deterministic sum of term(i) over i in [0, n): partials are materialized
// per index and accumulated in index order, so the floating-point result does
// not depend on the thread count.
template <class F>
double indexed_sum(ExecPolicy policy, std::ptrdiff_t n, F&& term) {
  std::vector<double> partials(static_cast<size_t>(n > 0 ? n : 0), 0.0);
  parallel_for(policy, n, [&](std::ptrdiff_t i) { partials[static_cast<size_t>(i)] = term(i); });
  double sum = 0.0;
  for (double v : partials) sum += v;
  return sum;
}

// Fills out[i] = f(i) for i in [0, n); out is resized to n.
template <class F>
void parallel_map(ExecPolicy policy, std::ptrdiff_t n, std::vector<double>& out, F&& f) {
  out.assign(static_cast<size_t>(n > 0 ? n : 0), 0.0);
  parallel_for(policy, n, [&](std::ptrdiff_t i) { out[static_cast<size_t>(i)] = f(i); });
}

}  // namespace eotk::parallel
