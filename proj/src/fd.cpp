#include "nsp/fd.hpp"

namespace nsp::fd {

void derivative_line(const double* in, double* out, std::size_t n, std::size_t stride, double h,
                     bool periodic) {
  const double inv2h = 1.0 / (2.0 * h);
  auto at = [&](std::size_t i) { return in[i * stride]; };
  if (periodic) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ip = (i + 1) % n;
      const std::size_t im = (i + n - 1) % n;
      out[i * stride] = (at(ip) - at(im)) * inv2h;
    }
    return;
  }
  out[0] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv2h;
  for (std::size_t i = 1; i + 1 < n; ++i) out[i * stride] = (at(i + 1) - at(i - 1)) * inv2h;
  out[(n - 1) * stride] = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) * inv2h;
}

}  // namespace nsp::fd
