#ifndef RABISIM_QUADRATURE_HPP
#define RABISIM_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "rabisim/errors.hpp"

namespace rabi {

struct QuadResult {
    std::complex<double> value{0.0, 0.0};
    double error = 0.0;  // estimate, dominated by the embedded G7 member
    std::size_t panels = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights (positive half), QUADPACK values.
inline constexpr double kGkNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double kKronrodW[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGaussW[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
void gk15(F&& f, double a, double b, std::complex<double>& kron, double& err) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::complex<double> fc = f(mid);
    std::complex<double> k = kKronrodW[7] * fc;
    std::complex<double> g = kGaussW[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kGkNodes[i];
        const std::complex<double> sum = f(mid - dx) + f(mid + dx);
        k += kKronrodW[i] * sum;
        if (i % 2 == 1) g += kGaussW[i / 2] * sum;
    }
    kron = k * half;
    err = std::abs((k - g) * half);
}

} // namespace detail

// Globally adaptive Gauss-Kronrod integration of a complex-valued function
// over [a, b] to absolute tolerance `abs_tol`. `initial_panels` presplits the
// interval so oscillatory integrands are resolved before refinement starts.
// Panel budget capped at 2^20; exhausting it throws numerical_error.
template <class F>
QuadResult integrate_gk(F&& f, double a, double b, double abs_tol,
                        int initial_panels = 1, std::size_t max_panels = std::size_t{1} << 20) {
    QuadResult out;
    if (a == b) return out;
    if (!(abs_tol > 0.0)) throw validation_error("quadrature: abs_tol must be > 0");

    struct Panel {
        double err;
        std::size_t seq;
        double a, b;
        std::complex<double> val;
        bool operator<(const Panel& o) const {
            if (err != o.err) return err < o.err;
            return seq > o.seq;  // deterministic tie-break
        }
    };

    std::vector<Panel> heap;
    std::size_t seq = 0;
    initial_panels = std::clamp(initial_panels, 1, 1 << 10);
    heap.reserve(static_cast<std::size_t>(initial_panels) + 64);
    for (int i = 0; i < initial_panels; ++i) {
        const double pa = a + (b - a) * i / initial_panels;
        const double pb = a + (b - a) * (i + 1) / initial_panels;
        Panel p{0.0, seq++, pa, pb, {0.0, 0.0}};
        detail::gk15(f, p.a, p.b, p.val, p.err);
        heap.push_back(p);
    }
    std::make_heap(heap.begin(), heap.end());

    // exact sums; the incremental updates below only steer the refinement
    const auto recompute = [&]() {
        double e = 0.0;
        for (const Panel& p : heap) e += p.err;
        return e;
    };
    double total_err = recompute();

    while (heap.size() < max_panels) {
        if (total_err <= abs_tol) {
            total_err = recompute();  // the running sum cancels badly on spiky integrands
            if (total_err <= abs_tol) break;
        }
        std::pop_heap(heap.begin(), heap.end());
        Panel p = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (p.a + p.b);
        if (mid <= p.a || mid >= p.b)
            throw numerical_error("quadrature: panel width underflow");
        Panel l{0.0, seq++, p.a, mid, {0.0, 0.0}};
        Panel r{0.0, seq++, mid, p.b, {0.0, 0.0}};
        detail::gk15(f, l.a, l.b, l.val, l.err);
        detail::gk15(f, r.a, r.b, r.val, r.err);
        total_err += l.err + r.err - p.err;
        heap.push_back(l);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(r);
        std::push_heap(heap.begin(), heap.end());
    }
    total_err = recompute();
    if (total_err > abs_tol)
        throw numerical_error("quadrature: failed to reach tolerance within panel cap");

    for (const Panel& p : heap) out.value += p.val;
    out.error = total_err;
    out.panels = heap.size();
    return out;
}

} // namespace rabi

#endif
