#pragma once

#include <map>
#include <optional>

#include "mkg/multiplier.hpp"

namespace mkg {

// Sign conventions, fixed once (see also nullform.hpp):
//   metric diag(-1,+1,...,+1); spatial indices raise trivially, A^0 = -A_0
//   d'Alembertian  box = d^mu d_mu = Laplacian - d_t^2
//   Lorenz scalar  u = d^mu A_mu = -d_t A_0 + sum_j d_j A_j
//   A^mu d_mu phi  = -A_0 d_t phi + sum_j A_j d_j phi
//   evolution      d_t^2 A_mu = Lap A_mu + j_mu,  d_t^2 phi = Lap phi - Mtilde

// (phi, d_t phi, A_0..A_n, d_t A_0..d_t A_n) at one time; the evolved object.
struct MKGState {
    TorusGrid grid;
    double t = 0.0;
    double mass = 1.0;
    SpectralScalar phi, phi_t;
    std::vector<SpectralScalar> a, a_t;  // index mu = 0..n

    MKGState() = default;
    explicit MKGState(const TorusGrid& g, double m = 1.0) : grid(g), mass(m) {
        phi = SpectralScalar(g);
        phi_t = SpectralScalar(g);
        a.assign(std::size_t(g.n) + 1, SpectralScalar(g, true));
        a_t.assign(std::size_t(g.n) + 1, SpectralScalar(g, true));
    }

    int n() const { return grid.n; }
    void check() const {
        if (int(a.size()) != grid.n + 1 || int(a_t.size()) != grid.n + 1)
            throw std::invalid_argument("MKGState: potential arity mismatch");
        for (const auto& f : a)
            if (f.grid != grid || !f.is_real) throw std::invalid_argument("MKGState: a must be real fields on the shared grid");
        for (const auto& f : a_t)
            if (f.grid != grid || !f.is_real) throw std::invalid_argument("MKGState: a_t must be real fields on the shared grid");
    }
};

// Antisymmetric field strength, stored upper-triangular (mu < nu) so
// F_{nu mu} = -F_{mu nu} can never drift.
struct Faraday {
    TorusGrid grid;
    int n = 0;
    std::vector<SpectralScalar> comp;  // pairs (0,1),(0,2),...,(0,n),(1,2),...

    Faraday() = default;
    explicit Faraday(const TorusGrid& g) : grid(g), n(g.n) {
        comp.assign(std::size_t(n) * (std::size_t(n) + 1) / 2, SpectralScalar(g, true));
    }

    static int pair_count(int n) { return n * (n + 1) / 2; }

    int pair_index(int mu, int nu) const {
        if (mu == nu || mu < 0 || nu < 0 || mu > n || nu > n)
            throw std::invalid_argument("Faraday: bad index pair");
        if (mu > nu) std::swap(mu, nu);
        // pairs ordered lexicographically over 0 <= mu < nu <= n
        int idx = 0;
        for (int m = 0; m < mu; ++m) idx += n - m;
        return idx + (nu - mu - 1);
    }

    SpectralScalar& stored(int mu, int nu) { return comp[std::size_t(pair_index(mu, nu))]; }
    const SpectralScalar& stored(int mu, int nu) const { return comp[std::size_t(pair_index(mu, nu))]; }

    // F_{mu nu} with the sign implied by storage
    SpectralScalar get(int mu, int nu) const {
        if (mu < nu) return stored(mu, nu);
        return -1.0 * stored(nu, mu);
    }
};

// F_{mu nu} = d_mu A_nu - d_nu A_mu with spectral spatial derivatives and
// stored time derivatives: F_{0k} = a_t[k] - d_k a[0], F_{jk} = d_j a[k] - d_k a[j].
inline Faraday faraday_from_potential(const MKGState& state) {
    Faraday F(state.grid);
    const int n = state.n();
    for (int k = 1; k <= n; ++k) F.stored(0, k) = state.a_t[std::size_t(k)] - deriv(state.a[0], k);
    for (int j = 1; j <= n; ++j)
        for (int k = j + 1; k <= n; ++k)
            F.stored(j, k) = deriv(state.a[std::size_t(k)], j) - deriv(state.a[std::size_t(j)], k);
    return F;
}

// max over spatial triples (l,j,k) of || d_l F_jk + d_j F_kl + d_k F_lj ||
inline double bianchi_residual(const Faraday& F) {
    double worst = 0;
    for (int l = 1; l <= F.n; ++l)
        for (int j = l + 1; j <= F.n; ++j)
            for (int k = j + 1; k <= F.n; ++k) {
                SpectralScalar r = deriv(F.get(j, k), l) + deriv(F.get(k, l), j) + deriv(F.get(l, j), k);
                worst = std::max(worst, l2_norm(r));
            }
    return worst;
}

inline double sobolev_norm(const SpectralScalar& f, double s) {
    double acc = 0;
    FreqIter it(f.grid);
    for (std::size_t flat = 0; flat < f.coeffs.size(); ++flat) {
        double a2 = freq_abs2(it.freqs(flat), f.grid.n);
        acc += std::pow(1.0 + a2, s) * std::norm(f.coeffs[flat]);
    }
    return std::sqrt(acc);
}

// Theorem-1 exponent bookkeeping; the checker reports exactly which
// hypotheses fail rather than a bare yes/no.
struct SobolevExponents {
    double s = 1.0;
    double r = 1.0;
    double epsilon = 0.05;

    std::vector<std::string> violated(int n) const {
        std::vector<std::string> bad;
        if (!(epsilon > 0)) bad.push_back("epsilon > 0");
        if (!(s > n / 2.0 - 5.0 / 6.0)) bad.push_back("s > n/2 - 5/6");
        if (!(r > n / 2.0 - 1.0)) bad.push_back("r > n/2 - 1");
        if (!(s >= r)) bad.push_back("s >= r");
        if (!(r >= s - 0.5)) bad.push_back("r >= s - 1/2");
        if (!(3 * s - 2 * r > (n - 1) / 2.0)) bad.push_back("3s - 2r > (n-1)/2");
        if (!(2 * r - s > (n - 3) / 2.0)) bad.push_back("2r - s > (n-3)/2");
        return bad;
    }
    bool admissible(int n) const { return violated(n).empty(); }
};

}  // namespace mkg
