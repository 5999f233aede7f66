#pragma once

#include <cstddef>
#include <functional>

namespace fkm {

/// Environment variable read for the default worker count.
inline constexpr const char* kThreadsEnv = "FKM_THREADS";

/// Worker count: FKM_THREADS if it holds a positive integer, else hardware concurrency.
std::size_t thread_count();

/// Calls body(i) for i in [0, count) across thread_count() workers. Each index is
/// handled by exactly one worker; callers write results by index.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace fkm
