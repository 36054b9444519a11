#pragma once

#include "mkg/state.hpp"

namespace mkg {

// Index/sign table used by every formula in this header (metric diag(-1,1,...,1)):
//   d^0 = -d_0 = -d_t, d^j = d_j
//   Riesz transform    R_k = D^{-1} d_k  (symbol i xi_k/|xi|)
//   Lorenz scalar      u = d^mu A_mu = -d_t A_0 + div A
//   interaction        A^mu d_mu phi = -A_0 d_t phi + A . grad phi
//   Q_ab(u,v)          = d_a u d_b v - d_b u d_a v (d_0 read from stored f_t)
//   Helmholtz          A^df_j = R^k(R_j A_k - R_k A_j), A^cf_j = -R_j R_k A^k;
//                      zero modes of A belong to neither part.
// The Q_jk recombination below sums ordered pairs with factor -1/2
// (equivalently j<k with factor -1) and uses the homogeneous D^{-1} inside
// the argument; both are forced by requiring P1 + P2 = A^mu d_mu phi exactly
// on mean-free Lorenz-compatible fields.

struct FieldWithTimeDeriv {
    SpectralScalar f, f_t;

    FieldWithTimeDeriv() = default;
    FieldWithTimeDeriv(SpectralScalar f_, SpectralScalar ft_) : f(std::move(f_)), f_t(std::move(ft_)) {
        require_same_grid(f, f_t);
    }
};

// Q_ab(u,v) = d_a u d_b v - d_b u d_a v, products in point space, dealiased.
inline SpectralScalar null_form(int alpha, int beta, const FieldWithTimeDeriv& u, const FieldWithTimeDeriv& v) {
    const TorusGrid& g = u.f.grid;
    if (v.f.grid != g) throw std::invalid_argument("null_form: grid mismatch");
    int n = g.n;
    if (alpha < 0 || beta < 0 || alpha > n || beta > n) throw std::invalid_argument("null_form: index out of range");
    if (alpha == beta) return zeros(g);

    auto part = [&](const FieldWithTimeDeriv& w, int idx) {
        return idx == 0 ? w.f_t : deriv(w.f, idx);
    };
    PointField da_u = to_point(part(u, alpha));
    PointField db_v = to_point(part(v, beta));
    PointField db_u = to_point(part(u, beta));
    PointField da_v = to_point(part(v, alpha));
    PointField prod(g);
    for (std::size_t i = 0; i < prod.values.size(); ++i)
        prod.values[i] = da_u.values[i] * db_v.values[i] - db_u.values[i] * da_v.values[i];
    return dealias(to_spectral(prod));
}

struct HelmholtzParts {
    std::vector<SpectralScalar> df, cf;  // indices 1..n stored at 0..n-1
    std::vector<double> dropped_mean;    // zero modes, reported not assigned
};

// A = A^df + A^cf + mean(A), computed with the paper's Riesz formulas.
inline HelmholtzParts helmholtz_split(const std::vector<SpectralScalar>& a) {
    if (a.empty()) throw std::invalid_argument("helmholtz_split: no components");
    const TorusGrid& g = a[0].grid;
    const int n = g.n;
    if (int(a.size()) != n) throw std::invalid_argument("helmholtz_split: expected the n spatial components");
    for (const auto& c : a) require_same_grid(c, a[0]);

    std::vector<SpectralScalar> ra(std::size_t(n) * std::size_t(n), SpectralScalar(g));
    for (int j = 1; j <= n; ++j)
        for (int k = 1; k <= n; ++k)
            ra[std::size_t((j - 1) * n + (k - 1))] = apply_multiplier(a[std::size_t(k - 1)], MultiplierSymbol::riesz(j));

    HelmholtzParts out;
    out.df.assign(std::size_t(n), SpectralScalar(g, true));
    out.cf.assign(std::size_t(n), SpectralScalar(g, true));
    out.dropped_mean.assign(std::size_t(n), 0.0);

    // R_k A^k once
    SpectralScalar div_part(g);
    for (int k = 1; k <= n; ++k) div_part = div_part + ra[std::size_t((k - 1) * n + (k - 1))];

    for (int j = 1; j <= n; ++j) {
        SpectralScalar df_j(g);
        for (int k = 1; k <= n; ++k) {
            SpectralScalar rjak_minus_rkaj =
                ra[std::size_t((j - 1) * n + (k - 1))] - ra[std::size_t((k - 1) * n + (j - 1))];
            df_j = df_j + apply_multiplier(rjak_minus_rkaj, MultiplierSymbol::riesz(k));
        }
        out.df[std::size_t(j - 1)] = df_j;
        out.df[std::size_t(j - 1)].is_real = a[std::size_t(j - 1)].is_real;
        out.cf[std::size_t(j - 1)] = -1.0 * apply_multiplier(div_part, MultiplierSymbol::riesz(j));
        out.cf[std::size_t(j - 1)].is_real = a[std::size_t(j - 1)].is_real;
        out.dropped_mean[std::size_t(j - 1)] = a[std::size_t(j - 1)].coeffs[0].real();
    }
    return out;
}

struct InteractionDecomposition {
    SpectralScalar p1, p2, direct;
    double lorenz_residual = 0;
};

// The section-2 split of A^mu d_mu phi:
//   P1 = -Q_{0j}(D^{-1} R^j A_0, phi)   (time derivative of the argument is
//        D^{-1} R^j d_t A_0, read from a_t[0])
//   P2 = -1/2 Q_{jk}(D^{-1}(R^j A^k - R^k A^j), phi), ordered pairs
//   direct = -A_0 d_t phi + A . grad phi
// The identity P1 + P2 = direct holds exactly on mean-free fields when the
// Lorenz condition holds; the returned residual ||-d_t A_0 + div A|| lets
// callers interpret any mismatch (the defect is linear in it).
inline InteractionDecomposition decompose_interaction(const MKGState& state) {
    const TorusGrid& g = state.grid;
    const int n = g.n;
    FieldWithTimeDeriv phi{state.phi, state.phi_t};

    SpectralScalar div_a(g);
    for (int j = 1; j <= n; ++j) div_a = div_a + deriv(state.a[std::size_t(j)], j);
    double lorenz = l2_norm(div_a - state.a_t[0]);

    const MultiplierSymbol dinv = MultiplierSymbol::d(-1.0);

    // P1: sum_j -Q_{0j}(w_j, phi) with w_j = D^{-1} R^j A_0
    SpectralScalar p1(g);
    for (int j = 1; j <= n; ++j) {
        FieldWithTimeDeriv w{apply_multiplier(apply_multiplier(state.a[0], MultiplierSymbol::riesz(j)), dinv),
                             apply_multiplier(apply_multiplier(state.a_t[0], MultiplierSymbol::riesz(j)), dinv)};
        p1 = p1 - null_form(0, j, w, phi);
    }

    // P2: sum_{j<k} -Q_{jk}(B_jk, phi) with B_jk = D^{-1}(R^j A^k - R^k A^j)
    SpectralScalar p2(g);
    for (int j = 1; j <= n; ++j)
        for (int k = j + 1; k <= n; ++k) {
            SpectralScalar b = apply_multiplier(apply_multiplier(state.a[std::size_t(k)], MultiplierSymbol::riesz(j)) -
                                                    apply_multiplier(state.a[std::size_t(j)], MultiplierSymbol::riesz(k)),
                                                dinv);
            FieldWithTimeDeriv bw{b, zeros(g)};  // time derivative unused by Q_{jk}
            p2 = p2 - null_form(j, k, bw, phi);
        }

    // direct = A^mu d_mu phi
    PointField pphi_t = to_point(state.phi_t);
    PointField pa0 = to_point(state.a[0]);
    PointField acc(g);
    for (std::size_t i = 0; i < acc.values.size(); ++i) acc.values[i] = -pa0.values[i] * pphi_t.values[i];
    for (int j = 1; j <= n; ++j) {
        PointField paj = to_point(state.a[std::size_t(j)]);
        PointField dphi = to_point(deriv(state.phi, j));
        for (std::size_t i = 0; i < acc.values.size(); ++i) acc.values[i] += paj.values[i] * dphi.values[i];
    }
    SpectralScalar direct = dealias(to_spectral(acc));

    return {std::move(p1), std::move(p2), std::move(direct), lorenz};
}

}  // namespace mkg
