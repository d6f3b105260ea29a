#pragma once

namespace rpys {

// Selects between the OpenMP kernels and the serial reference path. Both must
// produce identical results; the serial path exists for tests and benchmarks.
enum class Exec { Serial, Parallel };

}  // namespace rpys
