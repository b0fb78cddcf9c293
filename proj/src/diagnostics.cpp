#include "stofv/diagnostics.hpp"

#include "stofv/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace stofv {

namespace {

double lp_norm(std::span<const double> v, double vol, double p) {
    double s = 0.0;
    for (double x : v) {
        s += vol * std::pow(std::abs(x), p);
    }
    return s;
}

}  // namespace

StepDiagnostics diagnose_step(const KineticScheme& kin, const StepRecord& r, std::uint64_t seed) {
    const Scheme& scheme = kin.scheme();
    const TorusGrid& grid = scheme.grid();
    const CellNoiseTable& table = scheme.table();
    const double vol = grid.cell_volume();
    const std::size_t nc = grid.num_cells();

    StepDiagnostics d;
    d.n = r.n;
    d.t = r.t;
    d.dt = r.dt;

    std::vector<double> mid(r.half);
    if (table.k_max() > 0) {
        const auto bridge = brownian_bridge(seed, r.n, r.dt, r.X, 2);
        std::vector<double> dbeta(table.k_max());
        for (std::size_t k = 0; k < dbeta.size(); ++k) {
            dbeta[k] = bridge[k][1];
        }
        mid = v_sharp(r, table, dbeta);
    }

    double mass_pre = 0.0;
    double mass_half = 0.0;
    double mass_abs = 0.0;
    double diss = 0.0;
    std::array<double, 2> lp_diss{};
    std::array<double, 4> mm{};
    for (std::size_t c = 0; c < nc; ++c) {
        const double v = r.pre[c];
        const double vh = r.half[c];
        const double vp = r.post[c];
        d.half_energy_pre += 0.5 * vol * v * v;
        d.half_energy_half += 0.5 * vol * vh * vh;
        d.half_energy_post += 0.5 * vol * vp * vp;
        mass_pre += vol * v;
        mass_half += vol * vh;
        mass_abs += vol * std::abs(v);
        const double jump = vh - v;
        d.flat_plus += vol * std::max(jump, 0.0) * std::max(jump, 0.0);
        d.flat_minus += vol * std::min(jump, 0.0) * std::min(jump, 0.0);
        d.full_increment += vol * (vp - v) * (vp - v);
        d.noise_realized += 0.5 * vol * (vp - vh) * (vp - vh);
        const double G2 = table.k_max() > 0 ? table.G2(c, v) : 0.0;
        d.noise_input += 0.5 * r.dt * vol * G2;
        // v^♯(s) - v^n given the endpoint: mean jump + (s/Δt) e, variance G² s(Δt-s)/Δt.
        const double e = vp - vh;
        d.closeness += vol * (r.dt * (jump * jump + jump * e + e * e / 3.0) + G2 * r.dt * r.dt / 6.0);

        const DissipationMeasure m(kin, r, c);
        diss += vol * m.mass();
        d.min_m = std::min(d.min_m, m.min_value());
        d.outside_m = std::max({d.outside_m, std::abs(m.raw(m.lo() - 0.05)), std::abs(m.raw(m.hi() + 0.05))});
        lp_diss[0] += vol * 2.0 * m.mass();
        lp_diss[1] += vol * 12.0 * m.integrate([](double x) { return x * x; });
        d.control_fbar += vol * m.mass_above_state();
        d.control_f += vol * m.mass_below_state();
        for (std::size_t i = 0; i < kMomentPowers.size(); ++i) {
            const double p = kMomentPowers[i];
            mm[i] += vol * m.integrate([p](double x) { return 1.0 + std::pow(std::abs(x), p); });
        }
        for (const Face& f : grid.faces(c)) {
            const KineticFace& kf = kin.face(f);
            d.space_phi += kf.weak_bv(v, r.pre[f.neighbor]);
            d.space_phibar += kf.weak_bv_bar(v, r.pre[f.neighbor]);
        }
    }
    d.dissipation = r.dt * diss;
    d.energy_residual = d.half_energy_half + d.dissipation - d.half_energy_pre;
    d.mass_residual = mass_abs > 0.0 ? std::abs(mass_half - mass_pre) / mass_abs : std::abs(mass_half - mass_pre);
    const std::array<double, 2> lp_exp{2.0, 4.0};
    for (std::size_t i = 0; i < 2; ++i) {
        const double pre = lp_norm(r.pre, vol, lp_exp[i]);
        const double half = lp_norm(r.half, vol, lp_exp[i]);
        const double res = std::abs(half + r.dt * lp_diss[i] - pre);
        d.lp_residual[i] = pre > 0.0 ? res / pre : res;
    }
    d.split_residual = 0.5 * d.flat_plus + r.dt * d.control_fbar - 0.5 * r.dt * d.space_phi;
    for (std::size_t i = 0; i < kMomentPowers.size(); ++i) {
        const double p = kMomentPowers[i];
        d.lp_pre[i] = lp_norm(r.pre, vol, p);
        d.lp_post[i] = lp_norm(r.post, vol, p);
        d.nu_mid[i] = 1.0 + 0.5 * lp_norm(mid, vol, p) + 0.5 * d.lp_pre[i];
        d.m_moment[i] = r.dt * mm[i];
    }
    return d;
}

// ---------------------------------------------------------------------------

double DiagnosticsReport::space_bound() const { return initial_norm2 / theta + D0 * T / theta; }
double DiagnosticsReport::time_flat_bound() const { return initial_norm2 / theta + D0 * T / theta; }
double DiagnosticsReport::time_full_bound() const { return initial_norm2 / theta + 2.0 * D0 * T / theta; }
double DiagnosticsReport::closeness_bound() const {
    return (initial_norm2 / theta + D0 * T * (1.0 + 1.0 / theta)) * max_dt;
}

bool DiagnosticsReport::control_space_holds(double slack) const {
    return space_phi_sum <= 2.0 / theta * control_fbar_sum + slack;
}
bool DiagnosticsReport::control_space_bar_holds(double slack) const {
    return space_phibar_sum <= 2.0 / theta * control_f_sum + slack;
}
bool DiagnosticsReport::control_time_holds(double slack) const {
    return time_flat_plus_sum <= 2.0 / theta * control_fbar_sum + slack;
}
bool DiagnosticsReport::control_time_bar_holds(double slack) const {
    return time_flat_minus_sum <= 2.0 / theta * control_f_sum + slack;
}

DiagnosticsAccumulator::DiagnosticsAccumulator(double theta, double D0, double T, std::span<const double> v0,
                                               double cell_volume, bool keep_steps)
    : keep_steps_(keep_steps) {
    report_.theta = theta;
    report_.D0 = D0;
    report_.T = T;
    report_.initial_norm2 = lp_norm(v0, cell_volume, 2.0);
    report_.final_half_energy = 0.5 * report_.initial_norm2;
    for (std::size_t i = 0; i < kMomentPowers.size(); ++i) {
        report_.lp_final[i] = lp_norm(v0, cell_volume, kMomentPowers[i]);
        report_.sup_nu_moment[i] = 1.0 + report_.lp_final[i];
    }
}

void DiagnosticsAccumulator::add(const StepDiagnostics& s) {
    DiagnosticsReport& r = report_;
    r.max_dt = std::max(r.max_dt, s.dt);
    r.final_half_energy = s.half_energy_post;
    r.total_dissipation += s.dissipation;
    r.total_noise_input += s.noise_input;
    r.total_noise_realized += s.noise_realized;
    r.max_energy_residual = std::max(r.max_energy_residual, std::abs(s.energy_residual));
    r.max_mass_residual = std::max(r.max_mass_residual, s.mass_residual);
    r.min_m = std::min(r.min_m, s.min_m);
    r.max_outside_m = std::max(r.max_outside_m, s.outside_m);
    r.max_lp_residual = std::max({r.max_lp_residual, s.lp_residual[0], s.lp_residual[1]});
    r.max_split_residual = std::max(r.max_split_residual, std::abs(s.split_residual));
    r.space_phi_sum += s.dt * s.space_phi;
    r.space_phibar_sum += s.dt * s.space_phibar;
    r.space_sum = r.space_phi_sum + r.space_phibar_sum;
    r.control_fbar_sum += s.dt * s.control_fbar;
    r.control_f_sum += s.dt * s.control_f;
    r.time_flat_plus_sum += s.flat_plus;
    r.time_flat_minus_sum += s.flat_minus;
    r.time_flat_sum = r.time_flat_plus_sum + r.time_flat_minus_sum;
    r.time_full_sum += s.full_increment;
    r.closeness += s.closeness;
    for (std::size_t i = 0; i < kMomentPowers.size(); ++i) {
        r.sup_nu_moment[i] = std::max({r.sup_nu_moment[i], 1.0 + s.lp_pre[i], s.nu_mid[i], 1.0 + s.lp_post[i]});
        r.m_moment[i] += s.m_moment[i];
        r.lp_final[i] = s.lp_post[i];
    }
    if (keep_steps_) {
        r.steps.push_back(s);
    }
}

DiagnosticsReport DiagnosticsAccumulator::finish() const { return report_; }

DiagnosticsReport diagnose_run(const Scheme& scheme, const std::vector<double>& v0, const TimeGrid& time,
                               const IncrementSource& increments, std::uint64_t seed, double theta, bool keep_steps) {
    const KineticScheme kin(scheme);
    DiagnosticsAccumulator acc(theta, scheme.noise().D0, time.T, v0, scheme.grid().cell_volume(), keep_steps);
    RunOptions opt;
    opt.keep_records = false;
    opt.keep_states = false;
    opt.observer = [&](const StepRecord& r) { acc.add(diagnose_step(kin, r, seed)); };
    run(scheme, v0, time, increments, opt, seed);
    return acc.finish();
}

DiagnosticsReport diagnose_trajectory(const Scheme& scheme, const Trajectory& tr, double theta, bool keep_steps) {
    if (tr.records.size() != tr.time.steps()) {
        throw ConfigError("diagnose: step records were not kept");
    }
    const KineticScheme kin(scheme);
    DiagnosticsAccumulator acc(theta, scheme.noise().D0, tr.time.T, tr.initial(), scheme.grid().cell_volume(),
                               keep_steps);
    for (const StepRecord& r : tr.records) {
        acc.add(diagnose_step(kin, r, tr.seed));
    }
    return acc.finish();
}

std::vector<double> energy_balance_path(const Scheme& scheme, const Trajectory& tr) {
    const DiagnosticsReport rep = diagnose_trajectory(scheme, tr, 0.5, true);
    std::vector<double> out;
    out.reserve(rep.steps.size());
    for (const auto& s : rep.steps) {
        out.push_back(s.energy_residual);
    }
    return out;
}

WeakBVSums weak_bv_sums(const DiagnosticsReport& r) {
    WeakBVSums w;
    w.space = r.space_sum;
    w.time_flat = r.time_flat_sum;
    w.time_full = r.time_full_sum;
    w.time_flat_plus = r.time_flat_plus_sum;
    w.time_flat_minus = r.time_flat_minus_sum;
    w.space_bound = r.space_bound();
    w.time_flat_bound = r.time_flat_bound();
    w.time_full_bound = r.time_full_bound();
    return w;
}

// ---------------------------------------------------------------------------

Estimate estimate(std::span<const double> samples) {
    Estimate e;
    e.count = samples.size();
    if (samples.empty()) {
        return e;
    }
    double s = 0.0;
    for (double x : samples) {
        s += x;
    }
    e.mean = s / static_cast<double>(samples.size());
    if (samples.size() > 1) {
        double q = 0.0;
        for (double x : samples) {
            q += (x - e.mean) * (x - e.mean);
        }
        e.stderr_ = std::sqrt(q / static_cast<double>(samples.size() - 1) / static_cast<double>(samples.size()));
    }
    return e;
}

bool IdentityCheck::within(double k, double abs_tol) const {
    return std::abs(difference.mean) <= k * difference.stderr_ + abs_tol;
}

EnergyIdentityReport energy_identity_mc(std::span<const DiagnosticsReport> paths) {
    if (paths.size() < 2) {
        throw ConfigError("energy_identity_mc: need at least two paths");
    }
    std::vector<double> lhs, rhs, diff, nl, nr, nd;
    for (const auto& p : paths) {
        const double l = p.final_half_energy + p.total_dissipation;
        const double r = 0.5 * p.initial_norm2 + p.total_noise_input;
        lhs.push_back(l);
        rhs.push_back(r);
        diff.push_back(l - r);
        nl.push_back(p.total_noise_realized);
        nr.push_back(p.total_noise_input);
        nd.push_back(p.total_noise_realized - p.total_noise_input);
    }
    EnergyIdentityReport rep;
    rep.total = {estimate(lhs), estimate(rhs), estimate(diff)};
    rep.noise_energy = {estimate(nl), estimate(nr), estimate(nd)};
    return rep;
}

TightnessReport tightness_moments(std::span<const DiagnosticsReport> paths) {
    TightnessReport t;
    for (std::size_t i = 0; i < kMomentPowers.size(); ++i) {
        std::vector<double> a, b;
        for (const auto& p : paths) {
            a.push_back(p.sup_nu_moment[i]);
            b.push_back(p.m_moment[i] * p.m_moment[i]);
        }
        t.sup_nu_moment[i] = estimate(a);
        t.m_moment_sq[i] = estimate(b);
    }
    return t;
}

std::string report_json(const DiagnosticsReport& r, bool with_steps) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["theta"] = r.theta;
    j["D0"] = r.D0;
    j["T"] = r.T;
    j["max_dt"] = r.max_dt;
    j["initial_norm2"] = r.initial_norm2;
    j["final_half_energy"] = r.final_half_energy;
    j["total_dissipation"] = r.total_dissipation;
    j["total_noise_input"] = r.total_noise_input;
    j["total_noise_realized"] = r.total_noise_realized;
    j["max_energy_residual"] = r.max_energy_residual;
    j["max_mass_residual"] = r.max_mass_residual;
    j["min_m"] = r.min_m;
    j["max_outside_m"] = r.max_outside_m;
    j["max_lp_residual"] = r.max_lp_residual;
    j["max_split_residual"] = r.max_split_residual;
    j["weak_bv"] = {
        {"space_sum", r.space_sum},
        {"space_phi_sum", r.space_phi_sum},
        {"space_phibar_sum", r.space_phibar_sum},
        {"space_bound", r.space_bound()},
        {"time_flat_sum", r.time_flat_sum},
        {"time_flat_plus_sum", r.time_flat_plus_sum},
        {"time_flat_minus_sum", r.time_flat_minus_sum},
        {"time_flat_bound", r.time_flat_bound()},
        {"time_full_sum", r.time_full_sum},
        {"time_full_bound", r.time_full_bound()},
        {"control_fbar_sum", r.control_fbar_sum},
        {"control_f_sum", r.control_f_sum},
        {"control_space_holds", r.control_space_holds()},
        {"control_space_bar_holds", r.control_space_bar_holds()},
        {"control_time_holds", r.control_time_holds()},
        {"control_time_bar_holds", r.control_time_bar_holds()},
    };
    j["closeness"] = {{"value", r.closeness}, {"bound", r.closeness_bound()}};
    ordered_json moments = ordered_json::array();
    for (std::size_t i = 0; i < kMomentPowers.size(); ++i) {
        moments.push_back({{"p", kMomentPowers[i]},
                           {"lp_final", r.lp_final[i]},
                           {"sup_nu_moment", r.sup_nu_moment[i]},
                           {"m_moment", r.m_moment[i]}});
    }
    j["moments"] = moments;
    if (with_steps) {
        ordered_json steps = ordered_json::array();
        for (const auto& s : r.steps) {
            steps.push_back({{"n", s.n},
                             {"t", s.t},
                             {"dt", s.dt},
                             {"energy_residual", s.energy_residual},
                             {"dissipation", s.dissipation},
                             {"min_m", s.min_m},
                             {"lp2_residual", s.lp_residual[0]},
                             {"lp4_residual", s.lp_residual[1]},
                             {"mass_residual", s.mass_residual}});
        }
        j["steps"] = steps;
    }
    return j.dump(2);
}

}  // namespace stofv
