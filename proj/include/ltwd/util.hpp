#pragma once

#include <functional>
#include <string>

namespace ltwd {

// Global cap on worker threads used by parallel sweeps (0 = hardware default).
void set_max_threads(int n);
int max_threads();

// Runs body(i) for i in [0, count), split across worker threads.
// Falls back to a plain loop when count is small or only one thread is allowed.
void parallel_for(long count, const std::function<void(long)>& body);

// Writes through a temporary file in the same directory and renames into
// place, so a failure never leaves a partial payload at `path`.
void atomic_write_file(const std::string& path,
                       const std::function<void(std::ostream&)>& producer);

}  // namespace ltwd
