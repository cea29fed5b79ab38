#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sspr {

/// Runs fn(r) for r in [0, count) one after another. Reference path for
/// checking the parallel runner.
template <typename T, typename Fn>
std::vector<T> run_replicates_serial(std::size_t count, Fn&& fn) {
  std::vector<T> out(count);
  for (std::size_t r = 0; r < count; ++r) out[r] = fn(r);
  return out;
}

/// Runs fn(r) for r in [0, count) on up to `jobs` OpenMP threads. Replicates
/// share nothing, so results equal run_replicates_serial. The first
/// exception (lowest replicate index) is rethrown after the join.
template <typename T, typename Fn>
std::vector<T> run_replicates(std::size_t count, std::size_t jobs, Fn&& fn) {
  if (jobs <= 1 || count <= 1) return run_replicates_serial<T>(count, fn);
  std::vector<T> out(count);
  std::vector<std::exception_ptr> errors(count);
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(static_cast<int>(jobs))
  for (long long r = 0; r < n; ++r) {
    try {
      out[static_cast<std::size_t>(r)] = fn(static_cast<std::size_t>(r));
    } catch (...) {
      errors[static_cast<std::size_t>(r)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace sspr
