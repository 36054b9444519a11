#pragma once

#include "mkg/field.hpp"

namespace mkg {

// Fourier multipliers of the paper's operator zoo. Spatial symbols act on
// SpectralScalar per frequency:
//   Lambda^a          <xi>^a = (1+|xi|^2)^{a/2}
//   D^a               |xi|^a          (xi=0 amplitude dropped when a < 0)
//   RieszComponent(k) i xi_k / |xi|   (xi=0 dropped)
//   InverseLaplacian  -1/|xi|^2       (xi=0 dropped, exponent fixed)
// Dminus/Dplus/LambdaPlus are space-time symbols (see spacetime.hpp) and are
// rejected here.
enum class SymbolKind { Lambda, D, Dminus, Dplus, LambdaPlus, RieszComponent, InverseLaplacian };

struct MultiplierSymbol {
    SymbolKind kind;
    double alpha = 1.0;
    int component = 0;  // Riesz axis, 1-based

    static MultiplierSymbol lambda(double a) { return {SymbolKind::Lambda, a, 0}; }
    static MultiplierSymbol d(double a) { return {SymbolKind::D, a, 0}; }
    static MultiplierSymbol riesz(int k) { return {SymbolKind::RieszComponent, 1.0, k}; }
    static MultiplierSymbol inverse_laplacian() { return {SymbolKind::InverseLaplacian, -2.0, 0}; }
};

namespace detail {
// test hook: MKG_TEST_FLIP_RIESZ=1 flips the Riesz sign to exercise the
// check-identities negative control
inline bool riesz_sign_flipped() {
    static const bool flipped = [] {
        const char* env = std::getenv("MKG_TEST_FLIP_RIESZ");
        return env && env[0] == '1';
    }();
    return flipped;
}
}  // namespace detail

inline SpectralScalar apply_multiplier(const SpectralScalar& f, const MultiplierSymbol& m) {
    if (m.kind == SymbolKind::Dminus || m.kind == SymbolKind::Dplus ||
        m.kind == SymbolKind::LambdaPlus)
        throw std::invalid_argument("space-time symbol applied to a spatial field");
    if (m.kind == SymbolKind::RieszComponent && (m.component < 1 || m.component > f.grid.n))
        throw std::invalid_argument("Riesz component out of range");

    if (m.kind == SymbolKind::D && m.alpha < 0) {
        double nf = l2_norm(f);
        if (std::abs(f.coeffs[0]) > 1e-10 * nf)
            warn("D^a with a<0: mean dropped (|coeffs(0)| = " + std::to_string(std::abs(f.coeffs[0])) + ")");
    }

    // every spatial symbol here preserves Hermitian symmetry (Riesz is odd
    // and imaginary, the rest even and real)
    SpectralScalar out(f.grid, f.is_real);
    FreqIter it(f.grid);
    const double riesz_sign = detail::riesz_sign_flipped() ? -1.0 : 1.0;
    for (std::size_t flat = 0; flat < f.coeffs.size(); ++flat) {
        auto xi = it.freqs(flat);
        double a2 = freq_abs2(xi, f.grid.n);
        Complex w;
        switch (m.kind) {
            case SymbolKind::Lambda:
                w = std::pow(1.0 + a2, 0.5 * m.alpha);
                break;
            case SymbolKind::D:
                if (a2 == 0.0)
                    w = (m.alpha > 0) ? 0.0 : (m.alpha == 0.0 ? 1.0 : 0.0);
                else
                    w = std::pow(a2, 0.5 * m.alpha);
                break;
            case SymbolKind::RieszComponent:
                w = (a2 == 0.0) ? Complex(0) : riesz_sign * I * double(xi[std::size_t(m.component - 1)]) / std::sqrt(a2);
                break;
            case SymbolKind::InverseLaplacian:
                w = (a2 == 0.0) ? Complex(0) : Complex(-1.0 / a2);
                break;
            default:
                w = 0;
        }
        out.coeffs[flat] = w * f.coeffs[flat];
    }
    return out;
}

// Delta^{-1} with the mean killed: coeffs(xi) /= -|xi|^2, coeffs(0) = 0.
inline SpectralScalar inv_laplacian(const SpectralScalar& f) {
    check_finite(f.coeffs, "inv_laplacian input");
    return apply_multiplier(f, MultiplierSymbol::inverse_laplacian());
}

// spectral derivative along axis (1-based): multiply by i xi_axis
inline SpectralScalar deriv(const SpectralScalar& f, int axis) {
    if (axis < 1 || axis > f.grid.n) throw std::invalid_argument("deriv axis out of range");
    SpectralScalar out(f.grid, f.is_real);
    FreqIter it(f.grid);
    for (std::size_t flat = 0; flat < f.coeffs.size(); ++flat) {
        auto xi = it.freqs(flat);
        out.coeffs[flat] = I * double(xi[std::size_t(axis - 1)]) * f.coeffs[flat];
    }
    return out;
}

inline SpectralScalar laplacian(const SpectralScalar& f) {
    SpectralScalar out(f.grid, f.is_real);
    FreqIter it(f.grid);
    for (std::size_t flat = 0; flat < f.coeffs.size(); ++flat)
        out.coeffs[flat] = -freq_abs2(it.freqs(flat), f.grid.n) * f.coeffs[flat];
    return out;
}

inline SpectralScalar dealias(const SpectralScalar& f) {
    SpectralScalar out = f;
    const int keep = f.grid.kept_limit();
    FreqIter it(f.grid);
    for (std::size_t flat = 0; flat < out.coeffs.size(); ++flat) {
        auto xi = it.freqs(flat);
        for (int d = 0; d < f.grid.n; ++d) {
            if (std::abs(xi[std::size_t(d)]) > keep) {
                out.coeffs[flat] = 0;
                break;
            }
        }
    }
    return out;
}

// Pointwise product of already point-space data, dealiased on return to
// spectral space. Quadratic products of kept-band fields are exact at
// rho <= 1/3; cubic terms are formed as one fused pointwise expression so
// both sides of any identity see the identical lattice object.
inline SpectralScalar product_spectral(const PointField& a, const PointField& b, bool real_flag = false) {
    if (a.grid != b.grid) throw std::invalid_argument("product: grid mismatch");
    PointField prod(a.grid);
    for (std::size_t i = 0; i < prod.values.size(); ++i) prod.values[i] = a.values[i] * b.values[i];
    return dealias(to_spectral(prod, real_flag));
}

inline SpectralScalar product_spectral(const SpectralScalar& a, const SpectralScalar& b) {
    return product_spectral(to_point(a), to_point(b), a.is_real && b.is_real);
}

}  // namespace mkg
