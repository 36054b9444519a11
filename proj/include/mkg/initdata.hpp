#pragma once

#include "mkg/nullform.hpp"
#include "mkg/random.hpp"

namespace mkg {

// Initial data (phi0, phi1, a_{0 nu}, adot_{0 nu}, F^0) satisfying the
// compatibility conditions:
//   (10) a_{00} = adot_{00} = 0
//   (12) d^k a_{0k} = 0
//   (13) d_j a_{0k} - d_k a_{0j} = F^0_{jk}
//   (14) adot_{0k} = F^0_{0k}
//   (15) d^k F^0_{0k} = Im(phi0 conj(phi1)) - mean   (torus neutrality:
//        the lattice mean of the charge density has no torus solution and
//        is subtracted and reported as dropped_charge)
struct InitialData {
    SpectralScalar phi0, phi1;
    std::vector<SpectralScalar> a0, a0dot;  // index nu = 0..n
    Faraday F0;
    std::map<std::string, double> residuals;
    double dropped_charge = 0.0;

    MKGState to_state(double mass = 1.0) const {
        MKGState s(phi0.grid, mass);
        s.phi = phi0;
        s.phi_t = phi1;
        s.a = a0;
        s.a_t = a0dot;
        return s;
    }
};

struct BuildOptions {
    bool random_divfree_e_part = false;  // add a divergence-free piece to F^0_{0k}
    bool neutralize_charge = false;      // adjust phi1 so mean Im(phi0 conj phi1) = 0
    double seed_amplitude = 1.0;
    double decay_scale = 0.0;
    std::uint64_t seed = 0;
};

inline std::map<std::string, double> verify_constraints(const InitialData& data);

namespace detail {

// charge density rho = Im(phi0 conj phi1), formed pointwise
inline SpectralScalar charge_density(const SpectralScalar& phi0, const SpectralScalar& phi1) {
    PointField p0 = to_point(phi0), p1 = to_point(phi1);
    PointField rho(phi0.grid);
    for (std::size_t i = 0; i < rho.values.size(); ++i)
        rho.values[i] = std::imag(p0.values[i] * std::conj(p1.values[i]));
    return dealias(to_spectral(rho, true));
}

inline std::vector<SpectralScalar> divfree_random(const TorusGrid& g, std::mt19937_64& rng, double amplitude,
                                                  double decay) {
    std::vector<SpectralScalar> v;
    for (int k = 1; k <= g.n; ++k) v.push_back(random_mean_free(g, rng, {amplitude, decay, true}));
    if (g.n == 1) {  // the only divergence-free field on T^1 is constant; keep zero
        v[0] = zeros(g, true);
        return v;
    }
    auto parts = helmholtz_split(v);
    return parts.df;
}

}  // namespace detail

// F^0 spatial part from a curl seed (guarantees Bianchi, hence (13) solvable).
inline Faraday curl_seed(const TorusGrid& g, std::uint64_t seed, double amplitude = 1.0, double decay = 0.0) {
    auto rng = rng_stream(seed, 0x46535244ull);
    Faraday F(g);
    std::vector<SpectralScalar> w;
    for (int k = 1; k <= g.n; ++k) w.push_back(random_real_field(g, rng, amplitude, decay));
    for (int j = 1; j <= g.n; ++j)
        for (int k = j + 1; k <= g.n; ++k)
            F.stored(j, k) = deriv(w[std::size_t(k - 1)], j) - deriv(w[std::size_t(j - 1)], k);
    return F;
}

inline InitialData build_data(SpectralScalar phi0, SpectralScalar phi1, const Faraday& seedF,
                              const BuildOptions& opt = {}) {
    require_same_grid(phi0, phi1);
    const TorusGrid& g = phi0.grid;
    const int n = g.n;
    if (seedF.grid != g) throw std::invalid_argument("build_data: seed Faraday grid mismatch");

    // a user-supplied spatial F^0 must be close enough to a curl for (13)
    double bianchi = bianchi_residual(seedF);
    if (bianchi > 1e-8)
        throw std::invalid_argument("build_data: seed F violates the Bianchi identity (residual " +
                                    std::to_string(bianchi) + " > 1e-8), no a_{0j} exists");

    InitialData data;
    data.phi0 = std::move(phi0);
    data.phi1 = std::move(phi1);
    data.F0 = Faraday(g);
    for (int j = 1; j <= n; ++j)
        for (int k = j + 1; k <= n; ++k) data.F0.stored(j, k) = dealias(seedF.stored(j, k));

    if (opt.neutralize_charge) {
        // phi1 <- phi1 + i*alpha*phi0 shifts mean(rho) by -alpha*mean|phi0|^2
        SpectralScalar rho = detail::charge_density(data.phi0, data.phi1);
        PointField p0 = to_point(data.phi0);
        double mean_abs2 = 0;
        for (const auto& v : p0.values) mean_abs2 += std::norm(v);
        mean_abs2 /= double(p0.values.size());
        if (mean_abs2 > 0) {
            double alpha = rho.coeffs[0].real() / mean_abs2;
            axpy(data.phi1, Complex(0, alpha), data.phi0);
        }
    }

    // a_{0j} = D^{-2} d^k F^0_{jk}; (12) and (13) then hold identically
    const MultiplierSymbol dinv2 = MultiplierSymbol::d(-2.0);
    data.a0.assign(std::size_t(n) + 1, zeros(g, true));
    data.a0dot.assign(std::size_t(n) + 1, zeros(g, true));
    for (int j = 1; j <= n; ++j) {
        SpectralScalar divF(g, true);
        for (int k = 1; k <= n; ++k) {
            if (k == j) continue;
            divF = divF + deriv(data.F0.get(j, k), k);
        }
        divF.is_real = true;
        data.a0[std::size_t(j)] = apply_multiplier(divF, dinv2);
    }

    // electric part: F^0_{0k} = d_k Lap^{-1}(rho - mean rho) (+ optional
    // divergence-free piece), then (14) fixes adot_{0k}
    SpectralScalar rho = detail::charge_density(data.phi0, data.phi1);
    data.dropped_charge = rho.coeffs[0].real();
    SpectralScalar rho_prime = rho;
    rho_prime.coeffs[0] = 0;
    SpectralScalar psi = inv_laplacian(rho_prime);
    for (int k = 1; k <= n; ++k) data.F0.stored(0, k) = deriv(psi, k);

    if (opt.random_divfree_e_part) {
        auto rng = rng_stream(opt.seed, 0x45504152ull);
        auto extra = detail::divfree_random(g, rng, opt.seed_amplitude, opt.decay_scale);
        for (int k = 1; k <= n; ++k) data.F0.stored(0, k) = data.F0.stored(0, k) + extra[std::size_t(k - 1)];
    }
    for (int k = 1; k <= n; ++k) data.a0dot[std::size_t(k)] = data.F0.stored(0, k);

    // a_{00} = adot_{00} = 0 already by construction (10)
    data.residuals = verify_constraints(data);
    return data;
}

inline InitialData build_data(SpectralScalar phi0, SpectralScalar phi1, std::uint64_t seed,
                              BuildOptions opt = {}) {
    opt.seed = seed;
    Faraday seedF = curl_seed(phi0.grid, seed, opt.seed_amplitude, opt.decay_scale);
    return build_data(std::move(phi0), std::move(phi1), seedF, opt);
}

// Recomputes every constraint residual from scratch with direct spectral
// sums (not the build-time code path).
inline std::map<std::string, double> verify_constraints(const InitialData& data) {
    const TorusGrid& g = data.phi0.grid;
    const int n = g.n;
    std::map<std::string, double> res;

    res["eq10_a00"] = l2_norm(data.a0[0]);
    res["eq10_a00dot"] = l2_norm(data.a0dot[0]);

    SpectralScalar div_a(g);
    for (int k = 1; k <= n; ++k) div_a = div_a + deriv(data.a0[std::size_t(k)], k);
    res["eq12_div_a0"] = l2_norm(div_a);

    double curl_gap = 0;
    for (int j = 1; j <= n; ++j)
        for (int k = j + 1; k <= n; ++k)
            curl_gap = std::max(curl_gap, l2_norm(deriv(data.a0[std::size_t(k)], j) -
                                                  deriv(data.a0[std::size_t(j)], k) - data.F0.stored(j, k)));
    res["eq13_curl_a0"] = curl_gap;

    double adot_gap = 0;
    for (int k = 1; k <= n; ++k)
        adot_gap = std::max(adot_gap, l2_norm(data.a0dot[std::size_t(k)] - data.F0.stored(0, k)));
    res["eq14_a0dot"] = adot_gap;

    SpectralScalar divE(g);
    for (int k = 1; k <= n; ++k) divE = divE + deriv(data.F0.stored(0, k), k);
    SpectralScalar rho = detail::charge_density(data.phi0, data.phi1);
    rho.coeffs[0] = 0;
    res["eq15_gauss"] = l2_norm(divE - rho);

    // section-6 gauge data: u(0) = -adot_{00} + d^k a_{0k},
    // d_t u(0) = d^k F^0_{0k} - rho + mean rho (neutrality correction)
    res["gauge_u0"] = l2_norm(div_a - data.a0dot[0]);
    res["gauge_u0_dot"] = res["eq15_gauss"];
    return res;
}

}  // namespace mkg
