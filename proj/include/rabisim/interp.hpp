#ifndef RABISIM_INTERP_HPP
#define RABISIM_INTERP_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>

namespace rabi {

// Local cubic (Catmull-Rom) interpolation on a uniform grid starting at x0
// with spacing h. Endpoint neighbours are clamped.
inline std::complex<double> catmull_rom(std::span<const std::complex<double>> v, double x0,
                                        double h, double x) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(v.size());
    if (n == 1) return v[0];
    double s = (x - x0) / h;
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(std::floor(s));
    i = std::clamp<std::ptrdiff_t>(i, 0, n - 2);
    const double t = s - static_cast<double>(i);
    const auto at = [&](std::ptrdiff_t k) { return v[std::clamp<std::ptrdiff_t>(k, 0, n - 1)]; };
    const std::complex<double> p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
    return 0.5 * (2.0 * p1 + (p2 - p0) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * (t * t) +
                  (3.0 * p1 - p0 - 3.0 * p2 + p3) * (t * t * t));
}

inline int resolve_jobs(int jobs);

} // namespace rabi

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rabi {
inline int resolve_jobs(int jobs) {
    if (jobs > 0) return jobs;
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}
} // namespace rabi

#endif
