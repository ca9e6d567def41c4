#pragma once

#include "frameflow/coding.hpp"

namespace frameflow {

/// Fuchsian fixture: real pairings (-3 -> 3, r = 0.6) and (-1 -> 1, r = 0.35).
SchottkyScheme fixture_a();

/// Non-Fuchsian fixture: (-3 -> 3, r = 0.6) and (-1.5i -> 1.5i, r = 0.6).
SchottkyScheme fixture_b();

}  // namespace frameflow
