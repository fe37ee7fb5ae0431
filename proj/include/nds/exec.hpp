#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>

namespace nds {

/// Serial is the reference path; Parallel runs the same loop bodies under OpenMP.
enum class Exec { Serial, Parallel };

/// Worker count from NDS_WORKERS (default: OpenMP's choice).
int worker_count();

/// Runs body(i) for i in [0, n). Bodies must write only to slot i of their
/// outputs, so results do not depend on scheduling. The first exception
/// thrown by any body is rethrown after the loop.
void parallel_for(std::size_t n, Exec exec, const std::function<void(std::size_t)>& body);

}  // namespace nds
