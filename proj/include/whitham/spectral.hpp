#pragma once

// Fourier-side operations on GridFunction: derivatives, the dispersion
// multiplier -i sgn(xi)|xi|^alpha, trigonometric interpolation, 2/3-rule
// dealiasing, norms, and sub-grid extremum refinement.
//
// Sign convention: alpha = 3 reproduces d^3/dx^3 exactly, so that the
// evolution equation reduces to KdV there and to pure transport at
// alpha = 1.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "whitham/grid_function.hpp"

namespace whitham {

class ill_conditioned_error : public std::runtime_error {
  public:
    ill_conditioned_error(const std::string& msg, double amplification)
        : std::runtime_error(msg), amplification_factor(amplification) {}
    double amplification_factor;
};

// (i xi)^n without going through complex pow, so that repeated integer
// derivatives are bitwise reproducible.
inline cxd i_xi_pow(double xi, int n) {
    double mag = 1.0;
    for (int j = 0; j < n; ++j) mag *= xi;
    switch (n & 3) {
        case 0: return cxd(mag, 0.0);
        case 1: return cxd(0.0, mag);
        case 2: return cxd(-mag, 0.0);
        default: return cxd(0.0, -mag);
    }
}

inline GridFunction spectral_derivative(const GridFunction& u, int n) {
    if (n < 0) throw std::domain_error("spectral_derivative: order must be nonnegative");
    if (n == 0) return u;
    if (n > u.n_points() / 4) {
        const double amp = std::pow(u.xi(u.n_points() / 2), n);
        throw ill_conditioned_error(
            "spectral_derivative: order " + std::to_string(n) + " too large for n_points = " +
                std::to_string(u.n_points()) + " (noise amplification ~" + std::to_string(amp) + ")",
            amp);
    }
    auto c = u.coeffs();
    const int half = static_cast<int>(c.size()) - 1;
    for (int k = 0; k <= half; ++k) c[k] *= i_xi_pow(u.xi(k), n);
    if (n & 1) c[half] = 0.0;  // Nyquist has no well-defined odd derivative
    return GridFunction::from_coeffs(u.domain_length(), std::move(c));
}

// H Lambda^alpha: multiplier -i sgn(xi) |xi|^alpha. The mean mode is
// untouched (m(0) = 0) and the Nyquist mode is zeroed (odd symbol).
// Integer alpha falls back to repeated multiplication so that alpha = 3
// agrees with spectral_derivative(u, 3) coefficient-for-coefficient.
inline GridFunction dispersion_apply(const GridFunction& u, const Alpha& alpha) {
    const double a = alpha.value;
    auto c = u.coeffs();
    const int half = static_cast<int>(c.size()) - 1;
    const bool integer_a = (a == std::rint(a));
    for (int k = 1; k < half; ++k) {
        const double xi = u.xi(k);
        double mag;
        if (integer_a) {
            mag = 1.0;
            for (int j = 0; j < static_cast<int>(a); ++j) mag *= xi;
        } else {
            mag = std::pow(xi, a);
        }
        c[k] *= cxd(0.0, -mag);
        if (!std::isfinite(c[k].real()) || !std::isfinite(c[k].imag()))
            throw numeric_error("dispersion_apply: non-finite coefficient at mode " +
                                std::to_string(k));
    }
    c[0] = 0.0;
    c[half] = 0.0;
    return GridFunction::from_coeffs(u.domain_length(), std::move(c));
}

// Spectrally accurate evaluation at an arbitrary point. The phase is
// advanced by a complex recurrence (one multiply per mode).
inline double interpolate(const GridFunction& u, double x) {
    const auto& c = u.coeffs();
    const int half = static_cast<int>(c.size()) - 1;
    const double theta = 2.0 * M_PI * x / u.domain_length();
    const cxd z = std::polar(1.0, theta);
    cxd p = z;
    double s = c[0].real();
    for (int k = 1; k < half; ++k) {
        s += 2.0 * (c[k].real() * p.real() - c[k].imag() * p.imag());
        p *= z;
    }
    s += c[half].real() * std::cos(half * theta);
    return s;
}

// Zero every mode above 2/3 of the Nyquist index.
inline GridFunction dealias_23(const GridFunction& u) {
    auto c = u.coeffs();
    const int half = static_cast<int>(c.size()) - 1;
    const int keep = (2 * half) / 3;
    for (int k = keep + 1; k <= half; ++k) c[k] = 0.0;
    return GridFunction::from_coeffs(u.domain_length(), std::move(c));
}

// Zero-padding to a finer grid (same function, more points).
inline GridFunction pad_to(const GridFunction& u, int n_new) {
    if (n_new < u.n_points()) throw std::domain_error("pad_to: cannot shrink");
    auto c = u.coeffs();
    std::vector<cxd> cn(n_new / 2 + 1, cxd(0.0, 0.0));
    std::copy(c.begin(), c.end(), cn.begin());
    return GridFunction::from_coeffs(u.domain_length(), std::move(cn));
}

inline double sup_norm(const GridFunction& u) {
    double m = 0.0;
    for (double v : u.values()) m = std::max(m, std::fabs(v));
    return m;
}

inline double mean(const GridFunction& u) { return u.coeffs()[0].real(); }

// L^2(0, L) norm via Parseval.
inline double l2_norm(const GridFunction& u) {
    const auto& c = u.coeffs();
    const int half = static_cast<int>(c.size()) - 1;
    double s = std::norm(c[0]);
    for (int k = 1; k < half; ++k) s += 2.0 * std::norm(c[k]);
    s += std::norm(c[half]);
    return std::sqrt(u.domain_length() * s);
}

// Inhomogeneous Sobolev norm: sqrt( L * sum (1+xi^2)^s |c_k|^2 ).
inline double sobolev_norm(const GridFunction& u, double s) {
    const auto& c = u.coeffs();
    const int half = static_cast<int>(c.size()) - 1;
    double acc = std::norm(c[0]);
    for (int k = 1; k < half; ++k)
        acc += 2.0 * std::pow(1.0 + u.xi(k) * u.xi(k), s) * std::norm(c[k]);
    acc += std::pow(1.0 + u.xi(half) * u.xi(half), s) * std::norm(c[half]);
    return std::sqrt(u.domain_length() * acc);
}

// L^2 inner product by quadrature over the grid (trapezoid = exact for
// band-limited integrands below Nyquist).
inline double inner_product(const GridFunction& u, const GridFunction& v) {
    const auto& a = u.values();
    const auto& b = v.values();
    double s = 0.0;
    for (size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s * u.dx();
}

// Golden-section minimization of a smooth 1-d function on [lo, hi].
inline double golden_min(const std::function<double(double)>& f, double lo, double hi,
                         double xtol = 1e-10) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a); fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

struct Extremum {
    double x;
    double value;
};

// Global minimum of u over the period: grid argmin plus golden-section
// refinement of the trigonometric interpolant around it.
inline Extremum refined_min(const GridFunction& u, double xtol = 1e-10) {
    const auto& v = u.values();
    int jmin = 0;
    for (int j = 1; j < u.n_points(); ++j)
        if (v[j] < v[jmin]) jmin = j;
    const double h = u.dx();
    const double x0 = u.node(jmin);
    auto f = [&](double x) { return interpolate(u, x); };
    const double x = golden_min(f, x0 - h, x0 + h, xtol);
    return {x, interpolate(u, x)};
}

inline Extremum refined_max(const GridFunction& u, double xtol = 1e-10) {
    const auto& v = u.values();
    int jmax = 0;
    for (int j = 1; j < u.n_points(); ++j)
        if (v[j] > v[jmax]) jmax = j;
    const double h = u.dx();
    const double x0 = u.node(jmax);
    auto f = [&](double x) { return -interpolate(u, x); };
    const double x = golden_min(f, x0 - h, x0 + h, xtol);
    return {x, interpolate(u, x)};
}

// Refined sup-norm of u (max of |u|).
inline double refined_sup_norm(const GridFunction& u) {
    return std::max(refined_max(u).value, -refined_min(u).value);
}

}  // namespace whitham
