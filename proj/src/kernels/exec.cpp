#include "nds/exec.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

#include "nds/errors.hpp"

namespace nds {

int worker_count() {
  if (const char* env = std::getenv("NDS_WORKERS"); env != nullptr && *env != '\0') {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("NDS_WORKERS must be a positive integer, got '") + env + "'");
  }
  return omp_get_max_threads();
}

void parallel_for(std::size_t n, Exec exec, const std::function<void(std::size_t)>& body) {
  if (exec == Exec::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex guard;
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace nds
