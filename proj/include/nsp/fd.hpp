#pragma once

#include <cstddef>

namespace nsp::fd {

/// Second-order first derivative along a strided line of n samples with
/// spacing h: central in the interior, one-sided three-point at the ends
/// (or wrapped when periodic).
void derivative_line(const double* in, double* out, std::size_t n, std::size_t stride, double h,
                     bool periodic = false);

}  // namespace nsp::fd
