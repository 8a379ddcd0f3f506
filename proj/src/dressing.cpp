#include "rabisim/dressing.hpp"

#include <cmath>

#include "rabisim/errors.hpp"

namespace rabi {

namespace {

using cplx = std::complex<double>;
using Mat2 = std::array<cplx, 4>;  // row-major 2x2

// -i H0(t) U with H0 = [[delta, Omega(t)], [conj(Omega(t)), 0]]
Mat2 rhs(const PulseSpec& p, double delta, double t, const Mat2& u) {
    const cplx e = envelope_at(p, t);
    const cplx i{0.0, 1.0};
    return Mat2{-i * (delta * u[0] + e * u[2]), -i * (delta * u[1] + e * u[3]),
                -i * (std::conj(e) * u[0]), -i * (std::conj(e) * u[1])};
}

void axpy(Mat2& y, double a, const Mat2& x) {
    for (int k = 0; k < 4; ++k) y[k] += a * x[k];
}

// Column-wise Gram-Schmidt; keeps the propagator on the unitary group so the
// orthogonality defect does not accumulate over long propagations.
void reorthonormalize(Mat2& u) {
    cplx c0[2] = {u[0], u[2]};
    cplx c1[2] = {u[1], u[3]};
    const double n0 = std::sqrt(std::norm(c0[0]) + std::norm(c0[1]));
    if (n0 == 0.0) return;
    c0[0] /= n0;
    c0[1] /= n0;
    const cplx proj = std::conj(c0[0]) * c1[0] + std::conj(c0[1]) * c1[1];
    c1[0] -= proj * c0[0];
    c1[1] -= proj * c0[1];
    const double n1 = std::sqrt(std::norm(c1[0]) + std::norm(c1[1]));
    if (n1 == 0.0) return;
    c1[0] /= n1;
    c1[1] /= n1;
    u = Mat2{c0[0], c1[0], c0[1], c1[1]};
}

struct Propagator {
    const PulseSpec& pulse;
    double delta;
    Mat2 u{cplx{1.0}, cplx{0.0}, cplx{0.0}, cplx{1.0}};
    double t;

    explicit Propagator(const PulseSpec& p, double delta_) : pulse(p), delta(delta_), t(p.t0) {}

    void advance_to(double t_target, double step) {
        if (!(step > 0.0)) throw numerical_error("dress_numeric: step underflow");
        while (t < t_target) {
            const double h = std::min(step, t_target - t);
            if (t + h == t) throw numerical_error("dress_numeric: step underflow");
            const Mat2 k1 = rhs(pulse, delta, t, u);
            Mat2 u2 = u;
            axpy(u2, h / 2.0, k1);
            const Mat2 k2 = rhs(pulse, delta, t + h / 2.0, u2);
            Mat2 u3 = u;
            axpy(u3, h / 2.0, k2);
            const Mat2 k3 = rhs(pulse, delta, t + h / 2.0, u3);
            Mat2 u4 = u;
            axpy(u4, h, k3);
            const Mat2 k4 = rhs(pulse, delta, t + h, u4);
            for (int k = 0; k < 4; ++k)
                u[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
            reorthonormalize(u);
            t += h;
        }
    }
};

std::pair<double, cplx> dress_of(const Mat2& u) {
    return {std::norm(u[0]), cplx{0.0, 2.0} * u[0] * std::conj(u[2])};
}

} // namespace

DressingParams::DressingParams(double omega_, double delta_) : omega(omega_), delta(delta_) {
    omega_r = std::hypot(omega_, delta_);
    if (omega_r > 0.0) {
        c = delta_ / omega_r;
        s = omega_ / omega_r;
    }
}

double d_plus_plus(const DressingParams& dp, double t) {
    if (dp.omega_r == 0.0) return 1.0;
    return (1.0 + dp.c * dp.c + dp.s * dp.s * std::cos(dp.omega_r * t)) / 2.0;
}

std::complex<double> d_plus_minus(const DressingParams& dp, double t) {
    if (dp.omega == 0.0) return {0.0, 0.0};
    const double x = dp.omega_r * t;
    if (std::abs(x) < 1e-6) return {-dp.omega * t, 0.0};  // avoids 0/0 cancellation
    const std::complex<double> bracket{dp.c * (1.0 - std::cos(x)), std::sin(x)};
    return std::complex<double>{0.0, dp.omega / dp.omega_r} * bracket;
}

std::pair<double, std::complex<double>> dress_numeric(const PulseSpec& p, const TlsParams& tls,
                                                      double t, double step) {
    validate(p);
    Propagator prop(p, tls.effective_delta());
    prop.advance_to(p.t0 + std::abs(t), step);
    return dress_of(prop.u);
}

std::vector<std::pair<double, std::complex<double>>> dress_numeric_table(
    const PulseSpec& p, const TlsParams& tls, std::span<const double> times, double step) {
    validate(p);
    Propagator prop(p, tls.effective_delta());
    std::vector<std::pair<double, std::complex<double>>> out;
    out.reserve(times.size());
    for (double s : times) {
        if (s < 0.0) throw validation_error("dress_numeric_table: times must be >= 0");
        prop.advance_to(p.t0 + s, step);
        out.push_back(dress_of(prop.u));
    }
    return out;
}

double propagator_unitarity_residual(const PulseSpec& p, const TlsParams& tls, double t,
                                     double step) {
    Propagator prop(p, tls.effective_delta());
    prop.advance_to(p.t0 + std::abs(t), step);
    const Mat2& u = prop.u;
    // U^dagger U - I, Frobenius norm
    const cplx a = std::conj(u[0]) * u[0] + std::conj(u[2]) * u[2] - 1.0;
    const cplx b = std::conj(u[0]) * u[1] + std::conj(u[2]) * u[3];
    const cplx c = std::conj(u[1]) * u[0] + std::conj(u[3]) * u[2];
    const cplx d = std::conj(u[1]) * u[1] + std::conj(u[3]) * u[3] - 1.0;
    return std::sqrt(std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d));
}

} // namespace rabi
