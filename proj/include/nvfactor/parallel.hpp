#pragma once

#include <exception>
#include <mutex>

namespace nvfactor {

// Selects between the OpenMP kernel and the serial reference loop. Both paths
// run the same per-index body and write into disjoint slots, so their results
// are bit-identical; reductions are always performed afterwards in index order.
enum class Exec { serial, parallel };

template <class Body>
void for_each_index(Exec exec, int count, Body&& body) {
  if (exec == Exec::serial || count < 2) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace nvfactor
