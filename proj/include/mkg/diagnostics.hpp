#pragma once

#include "mkg/dynamics.hpp"

namespace mkg {

// u = d^mu A_mu = -d_t A_0 + sum_j d_j A_j; identically zero along exact
// solutions with compatible data (section 6), hence the solver's global
// correctness meter.
inline std::pair<SpectralScalar, double> gauge_residual(const MKGState& state) {
    SpectralScalar u = -1.0 * state.a_t[0];
    for (int j = 1; j <= state.n(); ++j) u = u + deriv(state.a[std::size_t(j)], j);
    double norm = l2_norm(u);
    return {std::move(u), norm};
}

// lattice mean of j_0
inline double charge(const MKGState& state) {
    PointField pphi = to_point(state.phi);
    PointField pphit = to_point(state.phi_t);
    PointField pa0 = to_point(state.a[0]);
    double acc = 0;
    for (std::size_t i = 0; i < pphi.values.size(); ++i)
        acc += std::imag(pphi.values[i] * std::conj(pphit.values[i])) +
               std::norm(pphi.values[i]) * pa0.values[i].real();
    return acc / double(pphi.values.size());
}

struct MaxwellResidual {
    std::vector<double> per_mu;
    double total = 0;
};

// || d^nu F_{mu nu} - j_mu || from two consecutive snapshots; the time
// derivative of F is the centered difference at the midpoint, j the
// two-state average, so the estimate is O(dt^2).
inline MaxwellResidual maxwell_residual(const MKGState& state, const MKGState& state_prev) {
    const TorusGrid& g = state.grid;
    const int n = g.n;
    double dt = state.t - state_prev.t;
    if (dt == 0.0) throw std::invalid_argument("maxwell_residual: states at identical times");

    Faraday Fa = faraday_from_potential(state_prev);
    Faraday Fb = faraday_from_potential(state);
    auto ja = current(state_prev);
    auto jb = current(state);

    double scale = 0;
    for (const auto& c : Fb.comp) scale = std::max(scale, l2_norm(c));

    MaxwellResidual out;
    out.per_mu.assign(std::size_t(n) + 1, 0.0);
    double sq = 0;
    for (int mu = 0; mu <= n; ++mu) {
        SpectralScalar r(g);
        // -d_0 F_{mu 0}: vanishes for mu = 0, centered difference otherwise
        if (mu != 0) {
            SpectralScalar dtF = (1.0 / dt) * (Fb.get(mu, 0) - Fa.get(mu, 0));
            r = -1.0 * dtF;
        }
        for (int k = 1; k <= n; ++k) {
            if (k == mu) continue;
            SpectralScalar mid = 0.5 * (Fb.get(mu, k) + Fa.get(mu, k));
            r = r + deriv(mid, k);
        }
        SpectralScalar jmid = 0.5 * (jb[std::size_t(mu)] + ja[std::size_t(mu)]);
        double v = l2_norm(r - jmid) / std::max(1.0, scale);
        out.per_mu[std::size_t(mu)] = v;
        sq += v * v;
    }
    out.total = std::sqrt(sq);
    return out;
}

// sup-over-times relative gap between the co-evolved F and the F derived
// from the potential
inline double faraday_gap(const Faraday& evolved, const MKGState& state) {
    Faraday ref = faraday_from_potential(state);
    double gap2 = 0, ref2 = 0;
    for (std::size_t i = 0; i < ref.comp.size(); ++i) {
        gap2 += std::pow(l2_norm(evolved.comp[i] - ref.comp[i]), 2);
        ref2 += std::pow(l2_norm(ref.comp[i]), 2);
    }
    return std::sqrt(gap2) / std::max(1.0, std::sqrt(ref2));
}

// Spatial-norm proxies for the Theorem 1 regularity statement.
struct TheoremNormReport {
    double phi_Hs = 0;
    double phi_t_Hs_minus_1 = 0;
    double DA_Hr_minus_1 = 0;
    double A_t_Hr_minus_1 = 0;
    double F_Hs_minus_1 = 0;
};

inline TheoremNormReport theorem_norm_report(const MKGState& state, const SobolevExponents& exps) {
    TheoremNormReport rep;
    rep.phi_Hs = sobolev_norm(state.phi, exps.s);
    rep.phi_t_Hs_minus_1 = sobolev_norm(state.phi_t, exps.s - 1.0);
    const MultiplierSymbol d1 = MultiplierSymbol::d(1.0);
    double da = 0, at = 0;
    for (std::size_t mu = 0; mu < state.a.size(); ++mu) {
        da += std::pow(sobolev_norm(apply_multiplier(state.a[mu], d1), exps.r - 1.0), 2);
        at += std::pow(sobolev_norm(state.a_t[mu], exps.r - 1.0), 2);
    }
    rep.DA_Hr_minus_1 = std::sqrt(da);
    rep.A_t_Hr_minus_1 = std::sqrt(at);
    Faraday F = faraday_from_potential(state);
    double f2 = 0;
    for (const auto& c : F.comp) f2 += std::pow(sobolev_norm(c, exps.s - 1.0), 2);
    rep.F_Hs_minus_1 = std::sqrt(f2);
    return rep;
}

// One diagnostic sample; names fixed, all finite unless blowup is set.
struct DiagnosticRecord {
    double t = 0;
    std::map<std::string, double> values;
    bool blowup = false;
};

inline DiagnosticRecord diagnostic_record(const SystemState& s, const SobolevExponents& exps,
                                          const MKGState* prev) {
    DiagnosticRecord rec;
    rec.t = s.mkg.t;
    rec.values["gauge_residual_L2"] = gauge_residual(s.mkg).second;
    rec.values["charge"] = charge(s.mkg);
    if (prev && prev->t != s.mkg.t)
        rec.values["maxwell_residual_L2"] = maxwell_residual(s.mkg, *prev).total;
    else
        rec.values["maxwell_residual_L2"] = 0.0;
    rec.values["faraday_gap_L2"] = s.coevolve() ? faraday_gap(*s.F, s.mkg) : 0.0;
    auto rep = theorem_norm_report(s.mkg, exps);
    rec.values["phi_Hs"] = rep.phi_Hs;
    rec.values["DA_Hr_minus_1"] = rep.DA_Hr_minus_1;
    SpectralScalar m = rhs_M(s.mkg);
    SpectralScalar mt = rhs_Mtilde(s.mkg);
    rec.values["m_gap_L2"] = l2_norm(mt - m) / std::max(1.0, l2_norm(m));
    for (auto& [k, v] : rec.values)
        if (!std::isfinite(v)) rec.blowup = true;
    return rec;
}

// ---------------------------------------------------------------------------

struct EvolveOptions {
    double T = 1.0;
    int cadence = 10;            // diagnostics every this many steps
    bool coevolve_faraday = false;
    SobolevExponents exps{};
    std::function<void(const SystemState&)> observer;  // optional extra hook
};

struct EvolveResult {
    std::vector<DiagnosticRecord> series;
    SystemState final_state;
    bool blew_up = false;
    double blowup_time = 0;
    double max_gauge_residual = 0;
    double max_faraday_gap = 0;
};

// F(0) from the data, d_t F(0) per section 6:
//   d_t F_{0k}(0) = j_k(0) - d^l F_{kl}(0)
//   d_t F_{jk}(0) = d_j F_{0k}(0) - d_k F_{0j}(0)
inline void seed_faraday(SystemState& s) {
    const TorusGrid& g = s.mkg.grid;
    const int n = g.n;
    s.F = faraday_from_potential(s.mkg);
    Faraday Ft(g);
    auto j = current(s.mkg);
    for (int k = 1; k <= n; ++k) {
        SpectralScalar divF(g, true);
        for (int l = 1; l <= n; ++l) {
            if (l == k) continue;
            divF = divF + deriv(s.F->get(k, l), l);
        }
        Ft.stored(0, k) = j[std::size_t(k)] - divF;
    }
    for (int jj = 1; jj <= n; ++jj)
        for (int k = jj + 1; k <= n; ++k)
            Ft.stored(jj, k) = deriv(s.F->stored(0, k), jj) - deriv(s.F->stored(0, jj), k);
    s.F_t = std::move(Ft);
}

inline EvolveResult evolve(const InitialData& data, double T, const SchemeSpec& scheme,
                           const EvolveOptions& opt_in = {}) {
    if (!(T > 0)) throw std::invalid_argument("evolve: T must be positive");
    scheme.validate();
    EvolveOptions opt = opt_in;
    opt.T = T;

    EvolveResult out;
    SystemState s;
    s.mkg = data.to_state();
    if (opt.coevolve_faraday) seed_faraday(s);

    long nsteps = std::lround(T / scheme.dt);
    if (nsteps < 1) nsteps = 1;

    MKGState prev = s.mkg;
    auto record = [&](const MKGState* prev_state) {
        DiagnosticRecord rec = diagnostic_record(s, opt.exps, prev_state);
        out.max_gauge_residual = std::max(out.max_gauge_residual, rec.values["gauge_residual_L2"]);
        out.max_faraday_gap = std::max(out.max_faraday_gap, rec.values["faraday_gap_L2"]);
        out.series.push_back(std::move(rec));
        if (opt.observer) opt.observer(s);
    };

    record(nullptr);
    for (long k = 0; k < nsteps; ++k) {
        prev = s.mkg;
        try {
            step_system(s, scheme, scheme.dt);
        } catch (const BlowupError& e) {
            out.blew_up = true;
            out.blowup_time = e.t;
            DiagnosticRecord rec;
            rec.t = e.t;
            rec.blowup = true;
            out.series.push_back(rec);
            break;
        }
        if ((k + 1) % opt.cadence == 0 || k + 1 == nsteps) record(&prev);
    }
    out.final_state = std::move(s);
    return out;
}

}  // namespace mkg
