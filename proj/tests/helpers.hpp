#pragma once

#include <catch2/catch_amalgamated.hpp>
#include <functional>

#include "mkg/mkg.hpp"

namespace mkgtest {

using namespace mkg;

// point lattice filled from a callback over physical coordinates x in [0,2pi)^n
inline PointField synth(const TorusGrid& g, const std::function<Complex(const std::array<double, 4>&)>& f) {
    PointField p(g);
    std::array<int, 4> idx{0, 0, 0, 0};
    for (std::size_t flat = 0; flat < p.values.size(); ++flat) {
        std::size_t rem = flat;
        for (int d = g.n - 1; d >= 0; --d) {
            idx[std::size_t(d)] = int(rem % g.N);
            rem /= g.N;
        }
        std::array<double, 4> x{0, 0, 0, 0};
        for (int d = 0; d < g.n; ++d) x[std::size_t(d)] = 2.0 * M_PI * idx[std::size_t(d)] / g.N;
        p.values[flat] = f(x);
    }
    return p;
}

inline SpectralScalar unit_mode(const TorusGrid& g, std::vector<int> xi, Complex amp = 1.0) {
    SpectralScalar f(g);
    f.at_freq(xi) = amp;
    return f;
}

// brute-force DFT sum, the independent transform oracle
inline SpectralScalar dft_oracle(const PointField& p) {
    const TorusGrid& g = p.grid;
    SpectralScalar out(g);
    FreqIter it(g);
    for (std::size_t kf = 0; kf < out.coeffs.size(); ++kf) {
        auto xi = it.freqs(kf);
        Complex acc = 0;
        std::array<int, 4> idx{0, 0, 0, 0};
        for (std::size_t flat = 0; flat < p.values.size(); ++flat) {
            std::size_t rem = flat;
            for (int d = g.n - 1; d >= 0; --d) {
                idx[std::size_t(d)] = int(rem % g.N);
                rem /= g.N;
            }
            double phase = 0;
            for (int d = 0; d < g.n; ++d)
                phase += xi[std::size_t(d)] * (2.0 * M_PI * idx[std::size_t(d)] / g.N);
            acc += p.values[flat] * std::exp(Complex(0, -phase));
        }
        out.coeffs[kf] = acc / double(g.size());
    }
    return out;
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

}  // namespace mkgtest
