#pragma once

#include <functional>
#include <string>
#include <vector>

namespace swloc::util {

// Worker count from SWLOC_WORKERS, default 1.
int worker_count();

// Runs fn(i) for i in [0, n) across `workers` threads. Work items must be
// independent; exceptions propagate from the first failing item.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

// Sorted filenames (not paths) in dir matching the extension (".lwr" etc.).
std::vector<std::string> list_files(const std::string& dir, const std::string& ext);

void ensure_dir(const std::string& dir);

}  // namespace swloc::util
