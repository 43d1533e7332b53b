#pragma once

// File formats: RFC-4180-style CSV for series, JSON for reports,
// checkpoints, and run manifests. Doubles are serialized with 17
// significant digits so every value round-trips exactly.

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "whitham/characteristics.hpp"
#include "whitham/hypothesis.hpp"
#include "whitham/solver.hpp"

namespace whitham::io {

using nlohmann::json;

inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
}

// ---- config ----

inline json config_to_json(const SolverConfig& c) {
    json j;
    j["alpha"] = c.alpha;
    j["domain_length"] = c.domain_length;
    j["n_points"] = c.n_points;
    j["dt_initial"] = c.dt_initial;
    j["t_end"] = c.t_end;
    j["cfl_safety"] = c.cfl_safety;
    j["dealias"] = c.dealias;
    j["slope_stop"] = c.slope_stop;
    j["checkpoint_every"] = c.checkpoint_every;
    j["enable_dispersion"] = c.enable_dispersion;
    j["enable_nonlinearity"] = c.enable_nonlinearity;
    j["adaptive_dt"] = c.adaptive_dt;
    j["max_points"] = c.max_points;
    j["refine_tail_fraction"] = c.refine_tail_fraction;
    j["under_resolved_fraction"] = c.under_resolved_fraction;
    j["snapshot_dt"] = c.snapshot_dt;
    return j;
}

inline SolverConfig config_from_json(const json& j) {
    SolverConfig c;
    auto req = [&](const char* key) -> const json& {
        if (!j.contains(key))
            throw std::invalid_argument(std::string("config: missing required field \"") + key +
                                        "\"");
        return j.at(key);
    };
    c.alpha = req("alpha").get<double>();
    c.domain_length = j.value("domain_length", c.domain_length);
    c.n_points = j.value("n_points", c.n_points);
    c.dt_initial = j.value("dt_initial", c.dt_initial);
    c.t_end = j.value("t_end", c.t_end);
    c.cfl_safety = j.value("cfl_safety", c.cfl_safety);
    c.dealias = j.value("dealias", c.dealias);
    c.slope_stop = j.value("slope_stop", c.slope_stop);
    c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
    c.enable_dispersion = j.value("enable_dispersion", c.enable_dispersion);
    c.enable_nonlinearity = j.value("enable_nonlinearity", c.enable_nonlinearity);
    c.adaptive_dt = j.value("adaptive_dt", c.adaptive_dt);
    c.max_points = j.value("max_points", c.max_points);
    c.refine_tail_fraction = j.value("refine_tail_fraction", c.refine_tail_fraction);
    c.under_resolved_fraction = j.value("under_resolved_fraction", c.under_resolved_fraction);
    c.snapshot_dt = j.value("snapshot_dt", c.snapshot_dt);
    return c;
}

// ---- checkpoints ----

inline json checkpoint_to_json(const SolverConfig& config, const SolverState& state) {
    json j;
    j["config"] = config_to_json(config);
    j["t"] = state.t;
    j["step_count"] = state.step_count;
    j["l2_initial"] = state.l2_initial;
    j["mean_initial"] = state.mean_initial;
    j["domain_length"] = state.u.domain_length();
    j["values"] = state.u.values();
    return j;
}

inline SolverState checkpoint_to_state(const json& j) {
    SolverState s{GridFunction::from_values(j.at("domain_length").get<double>(),
                                            j.at("values").get<std::vector<double>>()),
                  j.at("t").get<double>(), j.at("step_count").get<long>(),
                  j.at("l2_initial").get<double>(), j.at("mean_initial").get<double>()};
    return s;
}

// ---- trajectory summary CSV: t, min_slope, sup_abs_u, l2 ----

inline std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream os;
    os << "t,min_slope,sup_abs_u,l2\r\n";
    for (const auto& s : traj.snapshots) {
        const GridFunction ux = spectral_derivative(s.u, 1);
        os << fmt(s.t) << ',' << fmt(refined_min(ux).value) << ',' << fmt(sup_norm(s.u)) << ','
           << fmt(l2_norm(s.u)) << "\r\n";
    }
    return os.str();
}

inline std::string field_csv(const GridFunction& u) {
    std::ostringstream os;
    os << "x,u\r\n";
    const auto& v = u.values();
    for (int j = 0; j < u.n_points(); ++j) os << fmt(u.node(j)) << ',' << fmt(v[j]) << "\r\n";
    return os.str();
}

inline std::string slope_series_csv(const SlopeSeries& s) {
    std::ostringstream os;
    os << "t,m,argmin_x,q\r\n";
    for (size_t i = 0; i < s.times.size(); ++i)
        os << fmt(s.times[i]) << ',' << fmt(s.m[i]) << ',' << fmt(s.argmin_x[i]) << ','
           << fmt(s.q[i]) << "\r\n";
    return os.str();
}

inline std::string char_path_csv(const CharPath& p) {
    std::ostringstream os;
    os << "t,x";
    for (const auto& [n, _] : p.vn_samples) os << ",v" << n;
    os << "\r\n";
    for (size_t i = 0; i < p.times.size(); ++i) {
        os << fmt(p.times[i]) << ',' << fmt(p.positions[i]);
        for (const auto& [n, series] : p.vn_samples) os << ',' << fmt(series[i]);
        os << "\r\n";
    }
    return os.str();
}

// ---- reports ----

inline json breaking_report_to_json(const BreakingReport& r) {
    json j;
    j["verdict"] = to_string(r.verdict);
    j["T_est"] = r.T_est;
    j["T_lower"] = r.T_lower;
    j["T_upper"] = r.T_upper;
    j["bracket_contains"] = r.bracket_contains;
    j["sup_u_max"] = r.sup_u_max;
    j["fit_quality"] = r.fit_quality;
    j["m0"] = r.m0;
    return j;
}

inline json ineq_to_json(const IneqRecord& r) {
    return json{{"name", r.name},
                {"lhs", r.lhs},
                {"rhs", r.rhs},
                {"satisfied", r.satisfied},
                {"margin", r.margin}};
}

inline json hypothesis_report_to_json(const HypothesisReport& r) {
    json j;
    j["theorem"] = r.theorem == TheoremId::thm_11 ? "1.1" : "1.2";
    j["eps"] = r.eps;
    j["alpha"] = r.alpha;
    j["alpha_ok"] = r.alpha_ok;
    j["alpha_margin"] = r.alpha_margin;
    j["sigma"] = r.sigma;
    j["sigma_alpha_lt_1"] = r.sigma_alpha_lt_1;
    j["overall"] = r.overall;
    j["inequalities"] = json::array();
    for (const auto& q : r.inequalities) j["inequalities"].push_back(ineq_to_json(q));
    auto win = [](const Window& w) { return json{{"lo", w.lo}, {"hi", w.hi}}; };
    j["constants"] = {{"C0_window", win(r.windows.C0_window)},
                      {"C1_window", win(r.windows.C1_window)},
                      {"C2_window", win(r.windows.C2_window)}};
    j["gevrey"] = {{"n_max", r.gevrey.n_max},
                   {"first_violation", r.gevrey.first_violation},
                   {"first_inconclusive", r.gevrey.first_inconclusive}};
    json per_n = json::array();
    for (const auto& q : r.gevrey.per_n) per_n.push_back(ineq_to_json(q));
    j["gevrey"]["per_n"] = per_n;
    return j;
}

inline std::string hypothesis_report_table(const HypothesisReport& r) {
    std::ostringstream os;
    os << "theorem " << (r.theorem == TheoremId::thm_11 ? "1.1" : "1.2") << "  alpha=" << r.alpha
       << "  eps=" << r.eps << "  overall=" << (r.overall ? "SATISFIED" : "NOT SATISFIED")
       << "\n";
    os << "  alpha range: " << (r.alpha_ok ? "ok" : "VIOLATED") << " (margin " << r.alpha_margin
       << ")\n";
    os << "  sigma = " << r.sigma << "  sigma*alpha<1: " << (r.sigma_alpha_lt_1 ? "yes" : "no")
       << "\n";
    for (const auto& q : r.inequalities)
        os << "  " << std::left << std::setw(12) << q.name << " lhs=" << std::setw(14) << q.lhs
           << " rhs=" << std::setw(14) << q.rhs << (q.satisfied ? "  ok" : "  VIOLATED")
           << "  margin=" << q.margin << "\n";
    for (const auto& q : r.gevrey.per_n)
        os << "  " << std::left << std::setw(12) << q.name << " lhs=" << std::setw(14) << q.lhs
           << " rhs=" << std::setw(14) << q.rhs << (q.satisfied ? "  ok" : "  VIOLATED") << "\n";
    return os.str();
}

}  // namespace whitham::io
