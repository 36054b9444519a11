#pragma once

#include <random>

#include "mkg/multiplier.hpp"

namespace mkg {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// derive independent streams from (seed, lane) so results are reproducible
// regardless of call order elsewhere
inline std::mt19937_64 rng_stream(std::uint64_t seed, std::uint64_t lane) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(lane)));
}

// Random band-limited field with Gaussian spectral decay exp(-(|xi|/xi0)^2),
// normalized to the requested L2 amplitude. decay_scale xi0 defaults to a
// quarter of the kept band so that aliasing residue from cubic terms sits
// near roundoff.
struct RandomFieldSpec {
    double amplitude = 1.0;
    double decay_scale = 0.0;  // 0: use kept_limit/4
    bool real_field = false;
};

inline SpectralScalar random_field(const TorusGrid& g, std::mt19937_64& rng, const RandomFieldSpec& spec = {}) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int keep = g.kept_limit();
    double xi0 = spec.decay_scale > 0 ? spec.decay_scale : std::max(1.0, keep / 4.0);

    SpectralScalar f(g, spec.real_field);
    FreqIter it(g);
    for (std::size_t flat = 0; flat < f.coeffs.size(); ++flat) {
        auto xi = it.freqs(flat);
        bool kept = true;
        for (int d = 0; d < g.n; ++d)
            if (std::abs(xi[std::size_t(d)]) > keep) kept = false;
        // draw in fixed lattice order so the stream is layout-stable
        double gr = gauss(rng), gi = gauss(rng);
        if (!kept) continue;
        double a2 = freq_abs2(xi, g.n);
        double amp = std::exp(-a2 / (xi0 * xi0));
        f.coeffs[flat] = amp * Complex(gr, gi);
    }
    if (spec.real_field) {
        // symmetrize: f <- (f + reflected conjugate)/2
        SpectralScalar sym(g, true);
        for (std::size_t flat = 0; flat < f.coeffs.size(); ++flat) {
            auto xi = it.freqs(flat);
            std::size_t rflat = 0;
            for (int d = 0; d < g.n; ++d) {
                int m = -xi[std::size_t(d)];
                if (m <= -g.N / 2) m += g.N;
                rflat = rflat * std::size_t(g.N) + std::size_t(freq_to_index(m, g.N));
            }
            sym.coeffs[flat] = 0.5 * (f.coeffs[flat] + std::conj(f.coeffs[rflat]));
        }
        f = sym;
    }
    double nf = l2_norm(f);
    if (nf > 0) {
        double s = spec.amplitude / nf;
        for (auto& c : f.coeffs) c *= s;
    }
    return f;
}

inline SpectralScalar random_real_field(const TorusGrid& g, std::mt19937_64& rng, double amplitude = 1.0,
                                        double decay_scale = 0.0) {
    return random_field(g, rng, {amplitude, decay_scale, true});
}

inline SpectralScalar random_mean_free(const TorusGrid& g, std::mt19937_64& rng, const RandomFieldSpec& spec = {}) {
    SpectralScalar f = random_field(g, rng, spec);
    f.coeffs[0] = 0;
    return f;
}

}  // namespace mkg
