#pragma once

#include <cstddef>
#include <functional>

namespace npf {

/// Environment variable read for the worker count.
inline constexpr const char* kThreadsEnvVar = "NPF_THREADS";

/// Worker count used by parallel_for: the explicit override if set,
/// otherwise NPF_THREADS, otherwise the available hardware parallelism.
std::size_t thread_count();

/// Process-wide override; 0 restores the environment/hardware default.
void set_thread_count(std::size_t n);

/// Run body(i) for i in [0, n) over contiguous index blocks on worker
/// threads and wait for all of them. A call made from inside a worker runs
/// serially. If bodies throw, the exception from the lowest failing block
/// is rethrown after every worker has joined.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace npf
