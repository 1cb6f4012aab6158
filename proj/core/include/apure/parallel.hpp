#pragma once

#include <cstddef>
#include <functional>

namespace apure {

/// Worker cap used by parallel_for. Defaults to the hardware concurrency;
/// the APURE_THREADS environment variable, when set to a positive integer,
/// overrides any value passed here.
void set_max_threads(unsigned threads);
unsigned max_threads();

/// Runs body(i) for i in [0, n). Calls nested inside a worker run serially.
/// If bodies throw, the exception of the smallest index is rethrown after all
/// workers finish, so failures are reported deterministically.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace apure
