#pragma once

// Characteristics X' = u(X,t) integrated through a stored trajectory,
// v_n = (d^n u/dx^n)(X(t),t) sampled along them, the slope series
// m(t) = inf_x u_x and q(t) = m(0)/m(t), the lemma-level diagnostics
// (Sigma-nesting, q-integral bounds), and the breaking verdict with the
// theorem's time bracket for T.
//
// Time interpolation between snapshots is cubic Hermite using the stored
// equation right-hand sides as endpoint slopes (4th-order, consistent
// with the RK4 path integrator); space is trigonometric.

#include <cmath>
#include <future>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "whitham/solver.hpp"

namespace whitham {

struct CharPath {
    double x0;
    std::vector<double> times;
    std::vector<double> positions;
    std::map<int, std::vector<double>> vn_samples;
    bool truncated = false;
};

struct SlopeSeries {
    std::vector<double> times;
    std::vector<double> m;
    std::vector<double> argmin_x;
    std::vector<double> q;
    bool degenerate = false;  // m(t) >= 0 seen at some snapshot
};

enum class BreakingVerdict { breaking, no_breaking_by_t_end, under_resolved };

inline const char* to_string(BreakingVerdict v) {
    switch (v) {
        case BreakingVerdict::breaking: return "breaking";
        case BreakingVerdict::no_breaking_by_t_end: return "no-breaking-by-t_end";
        default: return "under-resolved";
    }
}

struct BreakingReport {
    BreakingVerdict verdict = BreakingVerdict::under_resolved;
    double T_est = std::nan("");
    double T_lower = std::nan("");
    double T_upper = std::nan("");
    bool bracket_contains = false;  // evaluated, recorded pass/fail
    double sup_u_max = 0.0;
    double fit_quality = std::nan("");
    double m0 = 0.0;
};

// Evaluates v_n(x, t) and K_n(x, t) between snapshots. Spatial operators
// are linear, so the Hermite combination is applied to four point values.
class TrajectoryInterpolant {
  public:
    explicit TrajectoryInterpolant(const Trajectory& traj, const Alpha& alpha,
                                   RhsOptions opt = {})
        : traj_(traj), alpha_(alpha), opt_(opt) {
        if (traj.snapshots.size() < 2)
            throw std::domain_error("TrajectoryInterpolant: need at least two snapshots");
    }

    double t_min() const { return traj_.snapshots.front().t; }
    double t_max() const { return traj_.snapshots.back().t; }

    // v_n(x, t); with_dispersion applies H Lambda^alpha on top (giving K_n).
    double value(int n, double x, double t, bool with_dispersion = false) const {
        const size_t i = segment(t);
        const double t0 = traj_.snapshots[i].t, t1 = traj_.snapshots[i + 1].t;
        const double d = t1 - t0;
        const double s = (t - t0) / d;
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        const double h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s);
        const double h11 = s * s * (s - 1);
        return h00 * interpolate(field(i, n, false, with_dispersion), x) +
               h10 * d * interpolate(field(i, n, true, with_dispersion), x) +
               h01 * interpolate(field(i + 1, n, false, with_dispersion), x) +
               h11 * d * interpolate(field(i + 1, n, true, with_dispersion), x);
    }

    double velocity(double x, double t) const { return value(0, x, t); }

    // Fill the field cache serially so that value() is safe to call from
    // several threads afterwards.
    void prepare(int n_max, bool with_dispersion = false) const {
        for (size_t i = 0; i < traj_.snapshots.size(); ++i)
            for (int n = 0; n <= n_max; ++n) {
                field(i, n, false, false);
                field(i, n, true, false);
                if (with_dispersion) {
                    field(i, n, false, true);
                    field(i, n, true, true);
                }
            }
    }

    const Trajectory& trajectory() const { return traj_; }

  private:
    size_t segment(double t) const {
        const auto& sn = traj_.snapshots;
        if (t < sn.front().t - 1e-12 || t > sn.back().t + 1e-12)
            throw std::domain_error("TrajectoryInterpolant: t outside resolved range");
        size_t lo = 0, hi = sn.size() - 1;
        while (hi - lo > 1) {
            const size_t mid = (lo + hi) / 2;
            (sn[mid].t <= t ? lo : hi) = mid;
        }
        return lo;
    }

    const GridFunction& field(size_t i, int n, bool time_deriv, bool with_dispersion) const {
        const auto key = std::make_tuple(i, n, time_deriv, with_dispersion);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        GridFunction base = time_deriv ? rhs(traj_.snapshots[i].u, alpha_, opt_)
                                       : traj_.snapshots[i].u;
        GridFunction g = spectral_derivative(base, n);
        if (with_dispersion) g = dispersion_apply(g, alpha_);
        return cache_.emplace(key, std::move(g)).first->second;
    }

    const Trajectory& traj_;
    Alpha alpha_;
    RhsOptions opt_;
    mutable std::map<std::tuple<size_t, int, bool, bool>, GridFunction> cache_;
};

// RK4 integration of dX/dt = u(X, t) for each seed, sampling v_n at the
// snapshot times. Paths are independent and integrated concurrently.
inline std::vector<CharPath> advect(const Trajectory& traj, const std::vector<double>& seeds,
                                    const Alpha& alpha, int n_max = 2, RhsOptions opt = {}) {
    TrajectoryInterpolant interp(traj, alpha, opt);
    interp.prepare(n_max);

    // target substep: comparable to the dense (per-step) time grid
    double h_target = HUGE_VAL;
    const auto& dt_grid = traj.dense_times;
    for (size_t i = 1; i < dt_grid.size(); ++i)
        h_target = std::min(h_target, dt_grid[i] - dt_grid[i - 1]);
    if (!std::isfinite(h_target) || h_target <= 0.0)
        h_target = (interp.t_max() - interp.t_min()) / 100.0;

    auto trace = [&](double x0) {
        CharPath path;
        path.x0 = x0;
        double x = x0;
        const auto& sn = traj.snapshots;
        auto record = [&](size_t i, double xi) {
            path.times.push_back(sn[i].t);
            path.positions.push_back(xi);
            for (int n = 0; n <= n_max; ++n)
                path.vn_samples[n].push_back(interp.value(n, xi, sn[i].t));
        };
        record(0, x);
        for (size_t i = 0; i + 1 < sn.size(); ++i) {
            const double t0 = sn[i].t, t1 = sn[i + 1].t;
            const int sub = std::max(1, static_cast<int>(std::ceil((t1 - t0) / h_target)));
            const double h = (t1 - t0) / sub;
            double t = t0;
            for (int sstep = 0; sstep < sub; ++sstep) {
                const double k1 = interp.velocity(x, t);
                const double k2 = interp.velocity(x + 0.5 * h * k1, t + 0.5 * h);
                const double k3 = interp.velocity(x + 0.5 * h * k2, t + 0.5 * h);
                const double k4 = interp.velocity(x + h * k3, std::min(t + h, interp.t_max()));
                x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                t += h;
            }
            record(i + 1, x);
        }
        return path;
    };

    std::vector<std::future<CharPath>> futs;
    futs.reserve(seeds.size());
    for (double s : seeds)
        futs.push_back(std::async(std::launch::async | std::launch::deferred, trace, s));
    std::vector<CharPath> out;
    out.reserve(seeds.size());
    for (auto& f : futs) out.push_back(f.get());
    return out;
}

inline SlopeSeries slope_series(const Trajectory& traj) {
    SlopeSeries s;
    for (const auto& snap : traj.snapshots) {
        const GridFunction ux = spectral_derivative(snap.u, 1);
        const Extremum e = refined_min(ux);
        s.times.push_back(snap.t);
        s.m.push_back(e.value);
        s.argmin_x.push_back(e.x);
        if (e.value >= 0.0) s.degenerate = true;
    }
    const double m0 = s.m.front();
    for (double mt : s.m) s.q.push_back(m0 / mt);
    return s;
}

// Per-path r(t) = m(0) / v_1(t; x): the Riccati-normalized reciprocal.
inline std::vector<double> path_r_series(const CharPath& path, double m0) {
    const auto& v1 = path.vn_samples.at(1);
    std::vector<double> r(v1.size());
    for (size_t i = 0; i < v1.size(); ++i) r[i] = m0 / v1[i];
    return r;
}

// Residual of the characteristic ODE along a path:
//   dv_n/dt + sum_{j=1}^n C(n,j) v_j v_{n+1-j} + K_n   (n = 0: dv_0/dt + K_0)
// The time derivative is a nonuniform centered difference on the path
// samples decimated by `stride` (endpoints use one-sided differences).
inline std::vector<double> residual_vn(const Trajectory& traj, const CharPath& path, int n,
                                       const Alpha& alpha, int stride = 1, RhsOptions opt = {}) {
    if (n < 0 || n > 2) throw std::domain_error("residual_vn: n must be 0, 1 or 2");
    TrajectoryInterpolant interp(traj, alpha, opt);

    std::vector<size_t> idx;
    for (size_t i = 0; i < path.times.size(); i += stride) idx.push_back(i);
    const size_t np = idx.size();
    if (np < 3) throw std::domain_error("residual_vn: path too short");

    auto binom = [](int nn, int kk) {
        double b = 1.0;
        for (int j = 1; j <= kk; ++j) b = b * (nn - kk + j) / j;
        return b;
    };

    std::vector<double> res(np);
    const auto& vn = path.vn_samples.at(n);
    for (size_t a = 0; a < np; ++a) {
        const size_t i = idx[a];
        double dvdt;
        if (a == 0) {
            dvdt = (vn[idx[1]] - vn[idx[0]]) / (path.times[idx[1]] - path.times[idx[0]]);
        } else if (a == np - 1) {
            dvdt = (vn[idx[a]] - vn[idx[a - 1]]) /
                   (path.times[idx[a]] - path.times[idx[a - 1]]);
        } else {
            // nonuniform 3-point centered difference
            const double h1 = path.times[idx[a]] - path.times[idx[a - 1]];
            const double h2 = path.times[idx[a + 1]] - path.times[idx[a]];
            dvdt = (h1 * h1 * vn[idx[a + 1]] - h2 * h2 * vn[idx[a - 1]] +
                    (h2 * h2 - h1 * h1) * vn[idx[a]]) /
                   (h1 * h2 * (h1 + h2));
        }
        double quad = 0.0;
        for (int j = 1; j <= n; ++j)
            quad += binom(n, j) * path.vn_samples.at(j)[i] * path.vn_samples.at(n + 1 - j)[i];
        const double Kn = interp.value(n, path.positions[i], path.times[i], true);
        res[a] = dvdt + quad + Kn;
    }
    return res;
}

inline BreakingReport breaking_detect(const Trajectory& traj, double eps,
                                      double sup_growth_factor = 2.0) {
    const SlopeSeries s = slope_series(traj);
    BreakingReport rep;
    rep.m0 = s.m.front();
    for (const auto& snap : traj.snapshots)
        rep.sup_u_max = std::max(rep.sup_u_max, sup_norm(snap.u));
    rep.T_lower = -1.0 / (rep.m0 * (1.0 + eps));
    rep.T_upper = -1.0 / (rep.m0 * (1.0 - eps) * (1.0 - eps));

    // fit window: samples past 5x the initial steepness
    std::vector<size_t> w;
    for (size_t i = 0; i < s.m.size(); ++i)
        if (s.m[i] < 5.0 * rep.m0) w.push_back(i);

    auto fit_root = [&](double frac) -> double {
        const size_t n_use = std::max<size_t>(3, static_cast<size_t>(w.size() * frac));
        if (w.size() < 3) return std::nan("");
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        size_t cnt = 0;
        for (size_t a = w.size() - std::min(n_use, w.size()); a < w.size(); ++a) {
            const double x = s.times[w[a]];
            const double y = 1.0 / s.m[w[a]];
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++cnt;
        }
        const double det = cnt * sxx - sx * sx;
        if (det == 0.0) return std::nan("");
        const double slope = (cnt * sxy - sx * sy) / det;
        const double icpt = (sy * sxx - sx * sxy) / det;
        return slope != 0.0 ? -icpt / slope : std::nan("");
    };
    const double t30 = fit_root(0.30);
    const double t15 = fit_root(0.15);
    rep.T_est = t30;
    if (std::isfinite(t30) && std::isfinite(t15) && t30 > 0.0)
        rep.fit_quality = std::fabs(t30 - t15) / t30;

    // monotonicity of m near the end of the fit window
    bool monotone = true;
    if (w.size() >= 3)
        for (size_t a = w.size() - std::min<size_t>(w.size(), 10) + 1; a < w.size(); ++a)
            if (s.m[w[a]] > s.m[w[a - 1]] + 1e-12) monotone = false;

    const bool sup_ok =
        rep.sup_u_max <= sup_growth_factor * sup_norm(traj.snapshots.front().u);

    if (traj.termination == Termination::slope_stop_crossed) {
        if (monotone && sup_ok && std::isfinite(rep.fit_quality) && rep.fit_quality < 0.03)
            rep.verdict = BreakingVerdict::breaking;
        else
            rep.verdict = BreakingVerdict::under_resolved;
    } else if (traj.termination == Termination::reached_t_end) {
        rep.verdict = BreakingVerdict::no_breaking_by_t_end;
    } else {
        rep.verdict = BreakingVerdict::under_resolved;
    }
    if (std::isfinite(rep.T_est))
        rep.bracket_contains = rep.T_lower <= rep.T_est && rep.T_est <= rep.T_upper;
    return rep;
}

struct SigmaNesting {
    bool nested;
    double violation_measure;
};

// Set-nesting diagnostic: with Sigma(t) = {labels x : v_1(t;x) <= (1-eps) m(t)},
// checks Sigma(t2) subset of Sigma(t1) on a seed grid of Lagrangian labels.
inline SigmaNesting sigma_set_diagnostic(const Trajectory& traj, double eps, double t1, double t2,
                                         const Alpha& alpha, int n_seeds = 128,
                                         RhsOptions opt = {}) {
    if (t1 > t2) throw std::domain_error("sigma_set_diagnostic: need t1 <= t2");
    const GridFunction& u0 = traj.snapshots.front().u;
    std::vector<double> seeds(n_seeds);
    for (int i = 0; i < n_seeds; ++i) seeds[i] = u0.domain_length() * i / n_seeds;
    auto paths = advect(traj, seeds, alpha, 1, opt);

    const SlopeSeries s = slope_series(traj);
    auto nearest = [&](double t) {
        size_t best = 0;
        for (size_t i = 1; i < s.times.size(); ++i)
            if (std::fabs(s.times[i] - t) < std::fabs(s.times[best] - t)) best = i;
        return best;
    };
    const size_t i1 = nearest(t1), i2 = nearest(t2);

    int in2 = 0, violations = 0;
    for (const auto& p : paths) {
        const auto& v1 = p.vn_samples.at(1);
        const bool m1 = v1[i1] <= (1.0 - eps) * s.m[i1];
        const bool m2 = v1[i2] <= (1.0 - eps) * s.m[i2];
        if (m2) {
            ++in2;
            if (!m1) ++violations;
        }
    }
    return {violations == 0, in2 > 0 ? static_cast<double>(violations) / in2 : 0.0};
}

struct QIntegralBound {
    double lhs;
    double rhs;
    bool holds;
};

// Trapezoid integral of q^-s against its closed-form bound (power form
// for s != 1, the log variant for s = 1).
inline QIntegralBound q_integral_bounds(const SlopeSeries& slope, double eps, double s) {
    if (!(s > 0.0)) throw std::domain_error("q_integral_bounds: s must be positive");
    const double m0 = slope.m.front();
    double lhs = 0.0;
    for (size_t i = 1; i < slope.times.size(); ++i)
        lhs += 0.5 * (std::pow(slope.q[i - 1], -s) + std::pow(slope.q[i], -s)) *
               (slope.times[i] - slope.times[i - 1]);
    const double qt = slope.q.back();
    double rhs;
    if (s == 1.0) {
        rhs = -1.0 / ((1.0 - eps) * (1.0 - eps) * m0) *
              (std::log(1.0 / (1.0 - eps)) - std::log(qt));
    } else {
        rhs = -1.0 / (std::pow(1.0 - eps, s + 1.0) * m0 * (1.0 - s)) *
              (std::pow(1.0 - eps, s - 1.0) - std::pow(qt, 1.0 - s));
    }
    return {lhs, rhs, lhs <= rhs * (1.0 + 1e-6)};
}

}  // namespace whitham
