#pragma once

#include <algorithm>
#include <numeric>

#include "mkg/core.hpp"
#include "mkg/fft.hpp"

namespace mkg {

// Transform normalization (fixed so Parseval has unit constant):
//   forward:  coeffs(xi) = N^{-n} sum_x f(x) e^{-i xi.x}
//   inverse:  f(x)       = sum_xi coeffs(xi) e^{+i xi.x}
//   Parseval: sum_xi |coeffs(xi)|^2 = N^{-n} sum_x |f(x)|^2
// All L2 norms below are therefore lattice RMS norms; a constant field c has
// norm |c| and a single unit mode has norm 1.

struct PointField {
    TorusGrid grid;
    std::vector<Complex> values;  // row-major, axis 0 slowest

    PointField() = default;
    explicit PointField(const TorusGrid& g) : grid(g), values(g.size()) {}
};

// Complex coefficient lattice over integer frequencies, stored in FFT layout
// (index k per axis, xi = k or k-N). The universal field representation.
struct SpectralScalar {
    TorusGrid grid;
    std::vector<Complex> coeffs;  // row-major FFT layout
    bool is_real = false;         // asserts coeffs(-xi) = conj(coeffs(xi))

    SpectralScalar() = default;
    explicit SpectralScalar(const TorusGrid& g, bool real_flag = false)
        : grid(g), coeffs(g.size()), is_real(real_flag) {}

    Complex& at_index(std::size_t flat) { return coeffs[flat]; }
    const Complex& at_index(std::size_t flat) const { return coeffs[flat]; }

    // access by frequency vector (size must be grid.n)
    Complex& at_freq(const std::vector<int>& xi) { return coeffs[flat_of(xi)]; }
    const Complex& at_freq(const std::vector<int>& xi) const { return coeffs[flat_of(xi)]; }

    std::size_t flat_of(const std::vector<int>& xi) const {
        if (int(xi.size()) != grid.n) throw std::invalid_argument("frequency arity mismatch");
        std::size_t flat = 0;
        for (int d = 0; d < grid.n; ++d) {
            int k = freq_to_index(xi[std::size_t(d)], grid.N);
            if (k < 0 || k >= grid.N) throw std::invalid_argument("frequency out of lattice");
            flat = flat * std::size_t(grid.N) + std::size_t(k);
        }
        return flat;
    }

    Complex mean() const { return coeffs[0]; }
};

inline void check_finite(const std::vector<Complex>& v, const char* what) {
    for (const auto& c : v)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw std::invalid_argument(std::string(what) + ": non-finite value");
}

inline SpectralScalar zeros(const TorusGrid& g, bool real_flag = false) {
    return SpectralScalar(g, real_flag);
}

// forward transform: point lattice -> coefficients
inline SpectralScalar to_spectral(const PointField& p, bool real_flag = false) {
    if (p.values.size() != p.grid.size()) throw std::invalid_argument("transform: dimension mismatch");
    check_finite(p.values, "transform input");
    SpectralScalar f(p.grid, real_flag);
    f.coeffs = p.values;
    fft::forward_inplace(f.coeffs, f.grid);
    return f;
}

// inverse transform: coefficients -> point lattice
inline PointField to_point(const SpectralScalar& f) {
    check_finite(f.coeffs, "transform input");
    PointField p(f.grid);
    p.values = f.coeffs;
    fft::inverse_inplace(p.values, f.grid);
    return p;
}

inline double l2_norm(const SpectralScalar& f) {
    double s = 0;
    for (const auto& c : f.coeffs) s += std::norm(c);
    return std::sqrt(s);
}

inline double point_rms(const PointField& p) {
    double s = 0;
    for (const auto& v : p.values) s += std::norm(v);
    return std::sqrt(s / double(p.values.size()));
}

// relative Hermitian-symmetry defect; 0 for exactly real fields
inline double hermitian_defect(const SpectralScalar& f) {
    const int N = f.grid.N;
    const int n = f.grid.n;
    double num = 0, den = 0;
    FreqIter it(f.grid);
    for (std::size_t flat = 0; flat < f.coeffs.size(); ++flat) {
        auto xi = it.freqs(flat);
        std::size_t rflat = 0;
        for (int d = 0; d < n; ++d) {
            int m = -xi[std::size_t(d)];
            if (m <= -N / 2) m += N;  // -N/2 aliases to +N/2
            rflat = rflat * std::size_t(N) + std::size_t(freq_to_index(m, N));
        }
        num += std::norm(f.coeffs[flat] - std::conj(f.coeffs[rflat]));
        den += std::norm(f.coeffs[flat]);
    }
    return den > 0 ? std::sqrt(num / den) : 0.0;
}

// ---- value arithmetic ----------------------------------------------------

inline void require_same_grid(const SpectralScalar& a, const SpectralScalar& b) {
    if (a.grid != b.grid) throw std::invalid_argument("fields live on different grids");
}

inline SpectralScalar operator+(const SpectralScalar& a, const SpectralScalar& b) {
    require_same_grid(a, b);
    SpectralScalar r = a;
    for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] += b.coeffs[i];
    r.is_real = a.is_real && b.is_real;
    return r;
}

inline SpectralScalar operator-(const SpectralScalar& a, const SpectralScalar& b) {
    require_same_grid(a, b);
    SpectralScalar r = a;
    for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] -= b.coeffs[i];
    r.is_real = a.is_real && b.is_real;
    return r;
}

inline SpectralScalar operator*(Complex c, const SpectralScalar& a) {
    SpectralScalar r = a;
    for (auto& v : r.coeffs) v *= c;
    r.is_real = a.is_real && c.imag() == 0.0;
    return r;
}

inline SpectralScalar operator*(double c, const SpectralScalar& a) { return Complex(c, 0) * a; }

inline void axpy(SpectralScalar& y, Complex a, const SpectralScalar& x) {
    require_same_grid(y, x);
    for (std::size_t i = 0; i < y.coeffs.size(); ++i) y.coeffs[i] += a * x.coeffs[i];
}

inline double distance(const SpectralScalar& a, const SpectralScalar& b) { return l2_norm(a - b); }

}  // namespace mkg
