#pragma once

// Machine-checking of every hypothesis inequality in the two breaking
// theorems for a concrete datum phi: the alpha thresholds, the feasible
// windows for the constants C0, C1, C2, the steepness inequalities, the
// Gevrey derivative-growth condition, the sigma exponent, and the
// standalone combinatorial lemma. Infeasibility is data, not failure:
// every inequality is reported with both sides and its margin.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "whitham/spectral.hpp"

namespace whitham {

enum class DatumKind { scaled_sine, bump_derivative, custom };

inline const char* to_string(DatumKind k) {
    switch (k) {
        case DatumKind::scaled_sine: return "scaled-sine";
        case DatumKind::bump_derivative: return "bump-derivative";
        default: return "custom";
    }
}

struct DatumProfile {
    DatumKind kind;
    double amplitude;
    double width;
    GridFunction grid;
    double inf_phi_prime;   // refined global min of phi'
    double inf_argmin;
};

// phi = -A sin(2 pi x / L), or the derivative of a Gaussian bump of
// width lambda centered at L/2: phi = (A/lambda) s exp(-s^2/2) with
// s = (x - L/2)/lambda, for which inf phi' = -2 e^{-3/2} A / lambda^2.
inline DatumProfile datum_factory(DatumKind kind, double amplitude, double width,
                                  double domain_length, int n_points) {
    if (!(amplitude > 0.0)) throw std::domain_error("datum_factory: amplitude must be positive");
    const double L = domain_length;
    std::vector<double> v(n_points);
    if (kind == DatumKind::scaled_sine) {
        for (int j = 0; j < n_points; ++j)
            v[j] = -amplitude * std::sin(2.0 * M_PI * j / n_points);
    } else if (kind == DatumKind::bump_derivative) {
        if (!(width > 0.0)) throw std::domain_error("datum_factory: width must be positive");
        if (width < 8.0 * L / n_points)
            throw std::domain_error("datum_factory: width " + std::to_string(width) +
                                    " unresolved on grid (needs >= 8 dx)");
        for (int j = 0; j < n_points; ++j) {
            const double s = (L * j / n_points - 0.5 * L) / width;
            v[j] = amplitude / width * s * std::exp(-0.5 * s * s);
        }
    } else {
        throw std::domain_error("datum_factory: custom profiles are constructed directly");
    }
    GridFunction g = GridFunction::from_values(L, std::move(v));
    const Extremum e = refined_min(spectral_derivative(g, 1));
    if (!(e.value < 0.0)) throw std::domain_error("datum_factory: datum has no negative slope");
    return {kind, amplitude, width, std::move(g), e.value, e.x};
}

inline DatumProfile datum_from_grid(GridFunction g, double amplitude = 1.0, double width = 1.0) {
    const Extremum e = refined_min(spectral_derivative(g, 1));
    if (!(e.value < 0.0)) throw std::domain_error("datum_from_grid: datum has no negative slope");
    return {DatumKind::custom, amplitude, width, std::move(g), e.value, e.x};
}

enum class TheoremId { thm_11, thm_12 };

// Open upper bound on alpha:
//   thm 1.1: (1-eps)^2 / (3(1+eps)^3 - (1-eps)^2)   (-> 1/2 as eps -> 0)
//   thm 1.2: (1-eps)^2 / (5 - 2(1-eps)^2)           (-> 1/3 as eps -> 0)
inline double alpha_range(double eps, TheoremId theorem) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("alpha_range: eps must be in (0,1)");
    const double om = (1.0 - eps) * (1.0 - eps);
    if (theorem == TheoremId::thm_11)
        return om / (3.0 * std::pow(1.0 + eps, 3) - om);
    return om / (5.0 - 2.0 * om);
}

struct SigmaValue {
    double sigma;
    bool sigma_alpha_lt_1;
};

inline SigmaValue sigma_value(double eps, const Alpha& alpha) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("sigma_value: eps must be in (0,1)");
    const double bound = 3.0 * std::pow(1.0 + eps, 3) / ((1.0 - eps) * (1.0 - eps)) - 1.0;
    const double sigma = bound * (1.0 + 1e-9);
    return {sigma, sigma * alpha.value < 1.0};
}

struct Window {
    double lo = 0.0;
    double hi = HUGE_VAL;
    bool empty() const { return !(lo < hi); }
};

struct FeasibleConstants {
    Window C0_window;
    Window C1_window;
    Window C2_window;
};

// Admissible intervals for C0, C1, C2 given phi, eps and (for C2) alpha.
inline FeasibleConstants constants_feasible(const DatumProfile& phi, double eps,
                                            const Alpha& alpha) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::domain_error("constants_feasible: eps must be in (0,1)");
    const double sup_phi = refined_sup_norm(phi.grid);
    const double sup_dphi = refined_sup_norm(spectral_derivative(phi.grid, 1));
    const double inf_dphi = phi.inf_phi_prime;
    const double a = alpha.value;

    FeasibleConstants out;
    out.C0_window = {(sup_phi + sup_dphi) / (1.0 - eps), HUGE_VAL};
    out.C1_window = {sup_dphi / (1.0 - eps), -(1.0 + eps) * inf_dphi / (1.0 - eps)};
    const double c2hi = -(1.0 + eps) / (1.0 - eps) * (1.0 / a - 1.0) / M_E *
                        std::pow(2.0 / 3.0, 1.0 / a - 1.0) * inf_dphi;
    out.C2_window = {0.0, c2hi};
    return out;
}

struct IneqRecord {
    std::string name;
    double lhs;
    double rhs;
    bool satisfied;   // lhs < rhs as written
    double margin;    // (rhs - lhs) / max(|lhs|, |rhs|)
};

inline IneqRecord make_ineq(std::string name, double lhs, double rhs) {
    const double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1e-300});
    return {std::move(name), lhs, rhs, lhs < rhs, (rhs - lhs) / scale};
}

struct GevreyCheck {
    int n_max = 0;
    int first_violation = -1;    // -1 = none among conclusive orders
    int first_inconclusive = -1; // -1 = all orders conclusive
    std::vector<IneqRecord> per_n;
};

struct HypothesisReport {
    TheoremId theorem;
    double eps;
    double alpha;
    bool alpha_ok;
    double alpha_margin;
    std::vector<IneqRecord> inequalities;
    FeasibleConstants windows;
    GevreyCheck gevrey;
    double sigma;
    bool sigma_alpha_lt_1;
    bool overall;
};

namespace detail {

inline double refined_derivative_sup(const GridFunction& phi, int n) {
    return refined_sup_norm(spectral_derivative(phi, n));
}

// Gevrey condition ||phi^(n)|| < C2 (n-1)^((n-1)/alpha) for n = 2..n_max,
// with a per-order round-off conditioning estimate: spectral
// differentiation amplifies grid noise by ~ xi_max^n.
inline GevreyCheck gevrey_check(const DatumProfile& phi, double C2, const Alpha& alpha,
                                int n_max) {
    GevreyCheck out;
    out.n_max = n_max;
    const double xi_max = phi.grid.xi(phi.grid.n_points() / 2);
    const double base = refined_sup_norm(phi.grid);
    for (int n = 2; n <= n_max; ++n) {
        const double sup_n = refined_derivative_sup(phi.grid, n);
        const double rhs = C2 * std::pow(static_cast<double>(n - 1), (n - 1) / alpha.value);
        auto rec = make_ineq("I:Gevrey n=" + std::to_string(n), sup_n, rhs);
        const double noise_floor = base * std::pow(xi_max, n) * 1e-15;
        if (sup_n < 10.0 * noise_floor) {
            if (out.first_inconclusive < 0) out.first_inconclusive = n;
        } else if (!rec.satisfied && out.first_violation < 0) {
            out.first_violation = n;
        }
        out.per_n.push_back(std::move(rec));
    }
    return out;
}

}  // namespace detail

inline HypothesisReport check_theorem_11(const DatumProfile& phi, const Alpha& alpha, double eps,
                                         double C0, double C1, double C2, int n_max = 8) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::domain_error("check_theorem_11: eps must be in (0,1)");
    if (n_max > 12) throw std::domain_error("check_theorem_11: n_max > 12 is unconditioned");
    const double a = alpha.value;
    const double inf_dphi = phi.inf_phi_prime;
    const double sup_phi = refined_sup_norm(phi.grid);
    const double sup_dphi = detail::refined_derivative_sup(phi.grid, 1);
    const double h3 = sobolev_norm(phi.grid, 3.0);

    HypothesisReport rep;
    rep.theorem = TheoremId::thm_11;
    rep.eps = eps;
    rep.alpha = a;
    const double arange = alpha_range(eps, TheoremId::thm_11);
    rep.alpha_ok = a < arange;
    rep.alpha_margin = (arange - a) / arange;
    rep.windows = constants_feasible(phi, eps, alpha);

    auto& iq = rep.inequalities;
    iq.push_back(make_ineq("I:C0", sup_phi + sup_dphi, (1.0 - eps) * C0));
    iq.push_back(make_ineq("I:C1.lower", sup_dphi, (1.0 - eps) * C1));
    iq.push_back(make_ineq("I:C1.upper", (1.0 - eps) * C1, -(1.0 + eps) * inf_dphi));
    iq.push_back(make_ineq("I:C2", (1.0 - eps) / (1.0 + eps) * C2,
                           -(1.0 / a - 1.0) / M_E * std::pow(2.0 / 3.0, 1.0 / a - 1.0) *
                               inf_dphi));
    iq.push_back(make_ineq("A2:m1", h3 + 2.0 / a * (3.0 * C1 + C2 / (1.0 - a)),
                           eps * eps * inf_dphi * inf_dphi));
    iq.push_back(make_ineq(
        "A2:m2",
        2.0 / (a * (1.0 - a)) * (3.0 + 1.0 / (1.0 - a) * (C1 / C0 + C2 / C1)),
        -eps * std::pow(1.0 - eps, 3) * inf_dphi));
    iq.push_back(make_ineq("A2:m3", 6.0 / a * (1.0 + std::pow(eps, 1.0 / a)),
                           -eps * (1.0 + eps) / (1.0 - eps) * inf_dphi));

    rep.gevrey = detail::gevrey_check(phi, C2, alpha, n_max);
    const SigmaValue sv = sigma_value(eps, alpha);
    rep.sigma = sv.sigma;
    rep.sigma_alpha_lt_1 = sv.sigma_alpha_lt_1;

    bool ok = rep.alpha_ok && rep.sigma_alpha_lt_1;
    for (const auto& r : iq) ok = ok && r.satisfied;
    ok = ok && rep.gevrey.first_violation < 0;
    rep.overall = ok;
    return rep;
}

inline HypothesisReport check_theorem_12(const DatumProfile& phi, const Alpha& alpha, double eps,
                                         double C0, double C1, double C2) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::domain_error("check_theorem_12: eps must be in (0,1)");
    const double a = alpha.value;
    if (!(a < 0.5))
        throw std::domain_error("check_theorem_12: alpha must be < 1/2 (Hoelder exponent)");
    const double inf_dphi = phi.inf_phi_prime;
    const double sup_phi = refined_sup_norm(phi.grid);
    const double sup_dphi = detail::refined_derivative_sup(phi.grid, 1);
    const double h2 = sobolev_norm(phi.grid, 2.0);
    const double phi2_l2 = l2_norm(spectral_derivative(phi.grid, 2));

    HypothesisReport rep;
    rep.theorem = TheoremId::thm_12;
    rep.eps = eps;
    rep.alpha = a;
    const double arange = alpha_range(eps, TheoremId::thm_12);
    rep.alpha_ok = a < arange;
    rep.alpha_margin = (arange - a) / arange;
    rep.windows = constants_feasible(phi, eps, alpha);

    auto& iq = rep.inequalities;
    iq.push_back(make_ineq("I:C012.C0", sup_phi + sup_dphi, 0.5 * C0));
    iq.push_back(make_ineq("I:C012.C1", sup_dphi, 0.5 * C1));
    iq.push_back(make_ineq("I:C012.C2", phi2_l2, std::sqrt((1.0 - 2.0 * a) / 2.0) * C2));
    iq.push_back(make_ineq("A3:m1", h2 + 1.0 / a * (6.0 * C1 + C2),
                           eps * eps * inf_dphi * inf_dphi));
    iq.push_back(make_ineq("A3:m2",
                           4.0 / (a * (1.0 - a)) * (3.0 + 1.0 / (1.0 - a) * C1 / C0) +
                               2.0 / a * (6.0 + C2 / C1),
                           -inf_dphi));

    const SigmaValue sv = sigma_value(eps, alpha);
    rep.sigma = sv.sigma;
    rep.sigma_alpha_lt_1 = sv.sigma_alpha_lt_1;

    bool ok = rep.alpha_ok;
    for (const auto& r : iq) ok = ok && r.satisfied;
    rep.overall = ok;
    return rep;
}

struct StirlingCheck {
    double lhs;
    double rhs;
    bool holds;
};

// Standalone combinatorial bound, evaluated in log space:
//   sum_{j=2}^{n-1} C(n,j)(j-1)^((j-1)/a)(n-j)^((n-j)/a)
//     <= (e/(1/a - 1)) (3/2)^(1/a - 1) n (n-1)^((n-1)/a)
inline StirlingCheck stirling_lemma_check(int n, const Alpha& alpha) {
    if (n < 3 || n > 40) throw std::domain_error("stirling_lemma_check: need 3 <= n <= 40");
    const double a = alpha.value;
    auto log_term = [&](int j) {
        double lt = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
        if (j > 1) lt += (j - 1) / a * std::log(static_cast<double>(j - 1));
        if (n - j > 1) lt += (n - j) / a * std::log(static_cast<double>(n - j));
        return lt;
    };
    double lmax = -HUGE_VAL;
    for (int j = 2; j <= n - 1; ++j) lmax = std::max(lmax, log_term(j));
    double s = 0.0;
    for (int j = 2; j <= n - 1; ++j) s += std::exp(log_term(j) - lmax);
    const double log_lhs = lmax + std::log(s);
    const double log_rhs = 1.0 - std::log(1.0 / a - 1.0) +
                           (1.0 / a - 1.0) * std::log(1.5) + std::log(static_cast<double>(n)) +
                           (n - 1) / a * std::log(static_cast<double>(n - 1));
    return {std::exp(log_lhs), std::exp(log_rhs), log_lhs <= log_rhs};
}

// Mid-window constants for a profile: used by the amplitude bisection.
struct PickedConstants {
    double C0, C1, C2;
    bool feasible;
};

inline PickedConstants pick_constants(const FeasibleConstants& w) {
    PickedConstants p{0, 0, 0, true};
    p.C0 = 2.0 * w.C0_window.lo;
    if (w.C1_window.empty() || w.C2_window.empty()) {
        p.feasible = false;
        p.C1 = w.C1_window.lo > 0 ? w.C1_window.lo : 1.0;
        p.C2 = 1.0;
        return p;
    }
    p.C1 = std::sqrt(w.C1_window.lo * w.C1_window.hi);
    p.C2 = 0.5 * w.C2_window.hi;
    return p;
}

// Smallest amplitude at which all hypotheses of the selected theorem are
// met, for a fixed shape; the quadratic-vs-linear structure of (A2:m1)/
// (A3:m1) makes satisfiability monotone in the amplitude beyond a
// threshold. Returns nullopt if even A = a_hi fails.
inline std::optional<double> amplitude_threshold(DatumKind kind, double width,
                                                 double domain_length, int n_points,
                                                 const Alpha& alpha, double eps,
                                                 TheoremId theorem, double a_lo = 1.0,
                                                 double a_hi = 1e9) {
    auto passes = [&](double A) {
        const DatumProfile phi = datum_factory(kind, A, width, domain_length, n_points);
        const auto w = constants_feasible(phi, eps, alpha);
        const auto c = pick_constants(w);
        if (!c.feasible) return false;
        const HypothesisReport rep =
            theorem == TheoremId::thm_11
                ? check_theorem_11(phi, alpha, eps, c.C0, c.C1, c.C2)
                : check_theorem_12(phi, alpha, eps, c.C0, c.C1, c.C2);
        return rep.overall;
    };
    if (!passes(a_hi)) return std::nullopt;
    double lo = a_lo, hi = a_hi;
    if (passes(lo)) return lo;
    while (hi / lo > 1.001) {
        const double mid = std::sqrt(lo * hi);
        (passes(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace whitham
