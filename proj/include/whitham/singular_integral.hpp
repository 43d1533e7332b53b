#pragma once

// Real-space evaluation of K_n = H Lambda^alpha d^n/dx^n u through the
// split/integration-by-parts identity: a boundary term at |y| = delta,
// an inner integral with the integrable singularity |y|^-alpha, and an
// outer integral with kernel sgn(y)|y|^(-1-alpha). For periodic data the
// line integral is the principal image on (delta, L/2) plus a rapidly
// convergent sum over periodic kernel images, which is evaluated to
// ~1e-12 here; the classical half-period truncation tail bound is still
// reported for reference.
//
// The overall sign is chosen so that calibration against the spectral
// multiplier path yields a positive constant.

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "whitham/spectral.hpp"

namespace whitham {

class quadrature_error : public std::runtime_error {
  public:
    quadrature_error(const std::string& msg, double achieved)
        : std::runtime_error(msg), achieved_tolerance(achieved) {}
    double achieved_tolerance;
};

class calibration_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SplitEval {
    double delta;
    double boundary_term;
    double inner_term;
    double outer_term;
    double total;
    double tail_bound;  // half-period truncation bound 4*sup|f|/(alpha (L/2)^alpha)
};

namespace detail {

// Sum over m >= 1 of (mL+y)^(-1-a) - (mL-y)^(-1-a): the periodic images
// of the outer kernel folded onto |y| < L/2. Direct sum plus an
// Euler-Maclaurin tail.
inline double image_kernel(double y, double L, double a) {
    constexpr int M = 64;
    double s = 0.0;
    for (int m = 1; m <= M; ++m)
        s += std::pow(m * L + y, -1.0 - a) - std::pow(m * L - y, -1.0 - a);
    auto g = [&](double m) {
        return std::pow(m * L + y, -1.0 - a) - std::pow(m * L - y, -1.0 - a);
    };
    auto gp = [&](double m) {
        return -(1.0 + a) * L *
               (std::pow(m * L + y, -2.0 - a) - std::pow(m * L - y, -2.0 - a));
    };
    const double m1 = M + 1;
    // integral of g from m1 to infinity, done in closed form
    const double integral =
        (std::pow(m1 * L + y, -a) - std::pow(m1 * L - y, -a)) / (a * L);
    s += integral + 0.5 * g(m1) - gp(m1) / 12.0;
    return s;
}

inline double gk_integrate(const std::function<double(double)>& f, double lo, double hi,
                           double tol, const char* what) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    double err = 0.0;
    const double val = GK::integrate(f, lo, hi, 14, tol, &err);
    const double scale = std::max(std::fabs(val), 1.0);
    if (err > 1e3 * tol * scale)
        throw quadrature_error(std::string("adaptive quadrature did not converge in ") + what,
                               err / scale);
    return val;
}

}  // namespace detail

// Evaluate K_n(x) for the field u. Requires 0 < alpha < 1 and
// 0 < delta < L/4. Quadrature tolerance 1e-10 on each piece.
inline SplitEval kernel_apply_direct(const GridFunction& u, const Alpha& alpha, int n, double x,
                                     double delta) {
    const double a = alpha.value;
    const double L = u.domain_length();
    if (!(a > 0.0 && a < 1.0))
        throw std::domain_error("kernel_apply_direct: alpha must be in (0,1)");
    if (!(delta > 0.0 && delta < L / 4.0))
        throw std::domain_error("kernel_apply_direct: delta must be in (0, L/4)");

    const GridFunction f = spectral_derivative(u, n);
    const GridFunction f1 = spectral_derivative(u, n + 1);
    const double tol = 1e-10;

    const double boundary =
        (interpolate(f, x + delta) - interpolate(f, x - delta)) / (a * std::pow(delta, a));

    // inner: -(1/a) int_0^delta y^-a [f'(x-y) + f'(x+y)] dy, smoothed by
    // the substitution y = s^(1/(1-a)).
    const double p = 1.0 / (1.0 - a);
    auto inner_f = [&](double s) {
        const double y = std::pow(s, p);
        return interpolate(f1, x - y) + interpolate(f1, x + y);
    };
    const double inner = -detail::gk_integrate(inner_f, 0.0, std::pow(delta, 1.0 - a), tol,
                                               "inner piece") *
                         p / a;

    // outer: -(int_delta^{L/2} [y^(-1-a) + S(y)] + int_0^delta S(y)) of
    // [f(x+y) - f(x-y)] dy, S = periodic image sum.
    auto diff = [&](double y) { return interpolate(f, x + y) - interpolate(f, x - y); };
    auto outer_main = [&](double y) {
        return (std::pow(y, -1.0 - a) + detail::image_kernel(y, L, a)) * diff(y);
    };
    auto outer_images_near = [&](double y) { return detail::image_kernel(y, L, a) * diff(y); };
    const double outer = -(detail::gk_integrate(outer_main, delta, L / 2.0, tol, "outer piece") +
                           detail::gk_integrate(outer_images_near, 0.0, delta, tol,
                                                "outer image piece"));

    SplitEval out;
    out.delta = delta;
    out.boundary_term = boundary;
    out.inner_term = inner;
    out.outer_term = outer;
    out.total = boundary + inner + outer;
    out.tail_bound = 4.0 * sup_norm(f) / (a * std::pow(L / 2.0, a));
    return out;
}

// c_alpha with c_alpha * kernel_apply_direct ~ dispersion_apply, fitted
// by least squares over single modes k = 1..8 and cached per alpha.
inline double calibration_constant(const Alpha& alpha) {
    const double a = alpha.value;
    if (!(a > 0.0 && a < 1.0))
        throw std::domain_error("calibration_constant: alpha must be in (0,1)");

    static std::mutex mtx;
    static std::map<double, double> cache;
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(a);
        if (it != cache.end()) return it->second;
    }

    const double L = 2.0 * M_PI;
    const int np = 256;
    double num = 0.0, den = 0.0;
    double rmin = HUGE_VAL, rmax = -HUGE_VAL;
    for (int k = 1; k <= 8; ++k) {
        std::vector<double> vals(np);
        for (int j = 0; j < np; ++j) vals[j] = std::cos(k * (L * j / np));
        const GridFunction u = GridFunction::from_values(L, std::move(vals));
        // H Lambda^a cos(kx) = k^a sin(kx); probe where |sin(kx)| = 1
        const double x = M_PI / (2.0 * k);
        const double spectral = std::pow(static_cast<double>(k), a);
        const double direct = kernel_apply_direct(u, alpha, 0, x, 0.5).total;
        num += spectral * direct;
        den += direct * direct;
        const double r = spectral / direct;
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
    }
    const double c = num / den;
    const double spread = (rmax - rmin) / std::fabs(c);
    if (!(c > 0.0) || spread > 1e-6)
        throw calibration_error("calibration_constant: fit residual " + std::to_string(spread) +
                                " exceeds 1e-6 at alpha = " + std::to_string(a));

    std::lock_guard<std::mutex> lock(mtx);
    cache.emplace(a, c);
    return c;
}

// Split-kernel bound on K_n: (6/a) d^-a sup|v_n| + (2/(a(1-a))) d^(1-a) sup|v_{n+1}|.
inline double kn_bound(const Alpha& alpha, double delta, double vn_sup, double vn1_sup) {
    const double a = alpha.value;
    if (!(a > 0.0 && a < 1.0)) throw std::domain_error("kn_bound: alpha must be in (0,1)");
    if (!(delta > 0.0)) throw std::domain_error("kn_bound: delta must be positive");
    return 6.0 / a * std::pow(delta, -a) * vn_sup +
           2.0 / (a * (1.0 - a)) * std::pow(delta, 1.0 - a) * vn1_sup;
}

// The Hoelder variant for K_1, valid for alpha < 1/2:
// (6/a) d^-a sup|v_1| + (1/a) sqrt(2/(1-2a)) d^(1/2-a) ||v_2||_L2.
inline double k1_bound_holder(const Alpha& alpha, double delta, double v1_sup, double v2_l2) {
    const double a = alpha.value;
    if (!(a > 0.0 && a < 0.5))
        throw std::domain_error("k1_bound_holder: alpha must be in (0,1/2)");
    if (!(delta > 0.0)) throw std::domain_error("k1_bound_holder: delta must be positive");
    return 6.0 / a * std::pow(delta, -a) * v1_sup +
           1.0 / a * std::sqrt(2.0 / (1.0 - 2.0 * a)) * std::pow(delta, 0.5 - a) * v2_l2;
}

// The proof's split-radius choices: delta = q for n = 0, q^sigma for
// n = 1, n^(-1/alpha) q^sigma for n >= 2.
struct DeltaPolicy {
    double sigma;
    double delta_for(int n, double q, const Alpha& alpha) const {
        if (n == 0) return q;
        if (n == 1) return std::pow(q, sigma);
        return std::pow(static_cast<double>(n), -1.0 / alpha.value) * std::pow(q, sigma);
    }
};

}  // namespace whitham
