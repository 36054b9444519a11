#pragma once

#include <functional>
#include <random>

#include "mkg/multiplier.hpp"
#include "mkg/random.hpp"

namespace mkg {

// Space-time lattice over (tau, xi) in Z x Z^n, time period 2pi sampled on
// Nt points. The paper's norms live on R^{1+n}; periodizing time smears the
// <|tau|-|xi|> weight, so free waves are tapered by default with the
// cosine-squared window w_m = sin^2(pi m / Nt) before the temporal
// transform.
enum class WindowKind { None, CosineSquared };

inline double window_value(WindowKind w, int m, int Nt) {
    if (w == WindowKind::None) return 1.0;
    double s = std::sin(M_PI * m / Nt);
    return s * s;
}

struct SpaceTimeField {
    TorusGrid grid;   // spatial part
    int Nt = 0;
    WindowKind window = WindowKind::None;
    std::vector<Complex> coeffs;  // tau-major: flat = it * grid.size() + spatial_flat

    SpaceTimeField() = default;
    SpaceTimeField(const TorusGrid& g, int Nt_, WindowKind w = WindowKind::None)
        : grid(g), Nt(Nt_), window(w), coeffs(std::size_t(Nt_) * g.size()) {
        if (Nt < 2 || (Nt & 1)) throw std::invalid_argument("SpaceTimeField: Nt must be even and >= 2");
    }

    std::size_t spatial_size() const { return grid.size(); }
    int tau_of_index(int it) const { return index_to_freq(it, Nt); }

    Complex& at(int it, std::size_t spatial_flat) { return coeffs[std::size_t(it) * spatial_size() + spatial_flat]; }
    const Complex& at(int it, std::size_t spatial_flat) const {
        return coeffs[std::size_t(it) * spatial_size() + spatial_flat];
    }
};

// Build from time slices of spatially-spectral data u(t_m, .): window, then
// normalized temporal DFT coeffs(tau) = Nt^{-1} sum_m u_m e^{-i tau t_m}.
inline SpaceTimeField spacetime_from_slices(const std::vector<SpectralScalar>& slices, WindowKind w) {
    if (slices.empty()) throw std::invalid_argument("spacetime_from_slices: empty");
    const TorusGrid& g = slices[0].grid;
    SpaceTimeField f(g, int(slices.size()), w);
    for (int m = 0; m < f.Nt; ++m) {
        double wm = window_value(w, m, f.Nt);
        const auto& src = slices[std::size_t(m)].coeffs;
        for (std::size_t j = 0; j < f.spatial_size(); ++j) f.at(m, j) = wm * src[j];
    }
    fft::temporal_forward_inplace(f.coeffs, f.Nt, f.spatial_size());
    return f;
}

// time slices u(t_m, .) of a dense field (temporal inverse transform)
inline std::vector<SpectralScalar> spacetime_to_slices(const SpaceTimeField& f) {
    std::vector<Complex> data = f.coeffs;
    fft::temporal_inverse_inplace(data, f.Nt, f.spatial_size());
    std::vector<SpectralScalar> out(std::size_t(f.Nt), SpectralScalar(f.grid));
    for (int m = 0; m < f.Nt; ++m)
        std::copy(data.begin() + std::ptrdiff_t(m) * std::ptrdiff_t(f.spatial_size()),
                  data.begin() + std::ptrdiff_t(m + 1) * std::ptrdiff_t(f.spatial_size()),
                  out[std::size_t(m)].coeffs.begin());
    return out;
}

// pointwise space-time product (dense path; used by unit tests to cross
// check the streaming probe kernels)
inline SpaceTimeField spacetime_product(const SpaceTimeField& a, const SpaceTimeField& b) {
    if (a.grid != b.grid || a.Nt != b.Nt) throw std::invalid_argument("spacetime_product: shape mismatch");
    auto sa = spacetime_to_slices(a);
    auto sb = spacetime_to_slices(b);
    std::vector<SpectralScalar> prod(sa.size(), SpectralScalar(a.grid));
    for (std::size_t m = 0; m < sa.size(); ++m) {
        PointField pa = to_point(sa[m]);
        PointField pb = to_point(sb[m]);
        for (std::size_t i = 0; i < pa.values.size(); ++i) pa.values[i] *= pb.values[i];
        prod[m] = to_spectral(pa);
    }
    return spacetime_from_slices(prod, WindowKind::None);  // factors already carry their windows
}

// weights of the wave-Sobolev norms
inline double hsb_weight(double tau, double xi_abs, double s, double b, bool homogeneous) {
    double spatial = homogeneous ? ((xi_abs == 0.0) ? 0.0 : std::pow(xi_abs, s))
                                 : std::pow(angle_bracket(xi_abs), s);
    double cone = std::pow(angle_bracket(std::abs(tau) - xi_abs), b);
    return spatial * cone;
}

// ||u||_{H^{s,b}} = || <xi>^s <|tau|-|xi|>^b u^ ||_{L2}; homogeneous variant
// uses |xi|^s with the xi = 0 plane excluded (warned about if populated).
inline double hsb_norm(const SpaceTimeField& f, double s, double b, bool homogeneous = false) {
    FreqIter it(f.grid);
    double acc = 0;
    double zero_plane = 0;
    for (int m = 0; m < f.Nt; ++m) {
        double tau = f.tau_of_index(m);
        for (std::size_t j = 0; j < f.spatial_size(); ++j) {
            double xi = std::sqrt(freq_abs2(it.freqs(j), f.grid.n));
            double c2 = std::norm(f.at(m, j));
            if (homogeneous && xi == 0.0) {
                zero_plane += c2;
                continue;
            }
            double w = hsb_weight(tau, xi, s, b, homogeneous);
            acc += w * w * c2;
        }
    }
    if (homogeneous && zero_plane > 1e-28)
        warn("homogeneous H^{s,b} norm: nonzero xi=0 content dropped");
    return std::sqrt(acc);
}

// space-time multipliers D_-, D_+, Lambda_+ (and the spatial ones lifted)
inline SpaceTimeField apply_spacetime_multiplier(const SpaceTimeField& f, const MultiplierSymbol& m) {
    SpaceTimeField out = f;
    FreqIter it(f.grid);
    for (int mm = 0; mm < f.Nt; ++mm) {
        double tau = f.tau_of_index(mm);
        for (std::size_t j = 0; j < f.spatial_size(); ++j) {
            double xi = std::sqrt(freq_abs2(it.freqs(j), f.grid.n));
            double w;
            switch (m.kind) {
                case SymbolKind::Dminus: {
                    double x = std::abs(std::abs(tau) - xi);
                    w = (x == 0.0) ? (m.alpha == 0 ? 1.0 : 0.0) : std::pow(x, m.alpha);
                    break;
                }
                case SymbolKind::Dplus: {
                    double x = std::abs(tau) + xi;
                    w = (x == 0.0) ? (m.alpha == 0 ? 1.0 : 0.0) : std::pow(x, m.alpha);
                    break;
                }
                case SymbolKind::LambdaPlus:
                    w = std::pow(angle_bracket(std::abs(tau) + xi), m.alpha);
                    break;
                case SymbolKind::Lambda:
                    w = std::pow(angle_bracket(xi), m.alpha);
                    break;
                case SymbolKind::D:
                    w = (xi == 0.0) ? (m.alpha == 0 ? 1.0 : 0.0) : std::pow(xi, m.alpha);
                    break;
                default:
                    throw std::invalid_argument("unsupported symbol on space-time field");
            }
            out.at(mm, j) *= w;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// free-wave ensembles (sparse representation used by the estimate probes)

// one lattice mode xi with temporal frequency omega = branch * |xi|
struct WaveMode {
    std::array<int, 4> xi{0, 0, 0, 0};
    int branch = +1;
    Complex amp{1.0, 0.0};

    double xi_abs(int n) const { return std::sqrt(freq_abs2(xi, n)); }
    double omega(int n) const { return branch * xi_abs(n); }
};

// Dirichlet kernel Nt^{-1} sum_m e^{i mu t_m}, mu reduced mod Nt
inline Complex dirichlet(double mu, int Nt) {
    double mur = mu - Nt * std::round(mu / Nt);
    if (std::abs(mur) < 1e-12) return 1.0;
    Complex num = std::exp(I * (2.0 * M_PI * mur)) - 1.0;
    Complex den = std::exp(I * (2.0 * M_PI * mur / double(Nt))) - 1.0;
    return num / den / double(Nt);
}

// temporal spectrum of a windowed unit oscillation e^{i omega t}:
// W(tau; omega) under the chosen taper
inline Complex window_spectrum(WindowKind w, double omega, int tau, int Nt) {
    double d = omega - tau;
    if (w == WindowKind::None) return dirichlet(d, Nt);
    return 0.5 * dirichlet(d, Nt) - 0.25 * dirichlet(d + 1.0, Nt) - 0.25 * dirichlet(d - 1.0, Nt);
}

struct FreeWaveEnsemble {
    TorusGrid grid;
    int Nt = 0;
    WindowKind window = WindowKind::CosineSquared;
    std::vector<WaveMode> modes;  // at most one mode per xi

    double t_of(int m) const { return 2.0 * M_PI * m / Nt; }

    // spatial spectral slice at t_m of the UNwindowed wave (optionally the
    // exact time derivative)
    SpectralScalar slice(int m, bool time_derivative = false) const {
        SpectralScalar s(grid);
        double t = t_of(m);
        for (const auto& mode : modes) {
            double om = mode.omega(grid.n);
            Complex v = mode.amp * std::exp(I * (om * t));
            if (time_derivative) v *= I * om;
            std::vector<int> xi(mode.xi.begin(), mode.xi.begin() + grid.n);
            s.at_freq(xi) += v;
        }
        return s;
    }

    SpaceTimeField materialize() const {
        std::vector<SpectralScalar> slices;
        slices.reserve(std::size_t(Nt));
        for (int m = 0; m < Nt; ++m) slices.push_back(slice(m));
        return spacetime_from_slices(slices, window);
    }

    // closed-form H^{s,b} norm of the windowed field (sums the exact
    // windowed tau-spectrum per mode; modes have distinct xi)
    double hsb_norm_sparse(double s, double b, bool homogeneous = false) const {
        double acc = 0;
        for (const auto& mode : modes) {
            double xi = mode.xi_abs(grid.n);
            if (homogeneous && xi == 0.0) continue;
            double om = mode.omega(grid.n);
            for (int it = 0; it < Nt; ++it) {
                int tau = index_to_freq(it, Nt);
                Complex c = mode.amp * window_spectrum(window, om, tau, Nt);
                double w = hsb_weight(tau, xi, s, b, homogeneous);
                acc += w * w * std::norm(c);
            }
        }
        return std::sqrt(acc);
    }

    void scale(double c) {
        for (auto& m : modes) m.amp *= c;
    }
};

struct EnsembleSpec {
    enum class Kind { RandomFree, Knapp, SingleMode };
    Kind kind = Kind::RandomFree;
    double ball_radius = 0;      // RandomFree support |xi|_2 <= radius (default N/4)
    double decay = 1.0;          // RandomFree amplitude ~ |xi|^{-decay}
    double knapp_center = 0;     // slab: xi.w in [center/2, center] (default N/4)
    double knapp_thickness = 0;  // transverse half-width (default sqrt(center))
    std::array<double, 4> direction{1, 0, 0, 0};
    std::array<int, 4> mode_xi{1, 0, 0, 0};  // SingleMode
    int mode_branch = +1;
};

inline FreeWaveEnsemble make_ensemble(const TorusGrid& g, int Nt, const EnsembleSpec& spec,
                                      std::mt19937_64& rng, WindowKind window = WindowKind::CosineSquared) {
    FreeWaveEnsemble ens;
    ens.grid = g;
    ens.Nt = Nt;
    ens.window = window;

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    if (spec.kind == EnsembleSpec::Kind::SingleMode) {
        WaveMode m;
        m.xi = spec.mode_xi;
        m.branch = spec.mode_branch;
        m.amp = 1.0;
        ens.modes.push_back(m);
        return ens;
    }

    // enumerate the frequency cube [-R, R]^n in a fixed order (cheap and
    // layout-independent, so RNG streams stay stable)
    auto for_each_in_cube = [&](int R, auto&& fn) {
        std::array<int, 4> xi{0, 0, 0, 0};
        std::function<void(int)> rec = [&](int d) {
            if (d == g.n) {
                fn(xi);
                return;
            }
            for (int v = -R; v <= R; ++v) {
                xi[std::size_t(d)] = v;
                rec(d + 1);
            }
        };
        rec(0);
    };

    if (spec.kind == EnsembleSpec::Kind::RandomFree) {
        double radius = spec.ball_radius > 0 ? spec.ball_radius : g.N / 4.0;
        int R = std::min(int(std::floor(radius)), g.N / 2 - 1);
        for_each_in_cube(R, [&](const std::array<int, 4>& xi) {
            double a2 = freq_abs2(xi, g.n);
            double gr = gauss(rng), gi = gauss(rng), pick = unif(rng);
            if (a2 == 0.0 || a2 > radius * radius) return;
            WaveMode m;
            m.xi = xi;
            m.branch = (pick < 0.5) ? +1 : -1;
            m.amp = Complex(gr, gi) * std::pow(a2, -0.5 * spec.decay);
            ens.modes.push_back(m);
        });
    } else {  // Knapp slab around a null direction: the extremizing geometry
        double K = spec.knapp_center > 0 ? spec.knapp_center : g.N / 4.0;
        double thick = spec.knapp_thickness > 0 ? spec.knapp_thickness : std::sqrt(K);
        double dlen = 0;
        for (int d = 0; d < g.n; ++d) dlen += spec.direction[std::size_t(d)] * spec.direction[std::size_t(d)];
        dlen = std::sqrt(dlen);
        if (dlen == 0) throw std::invalid_argument("knapp: zero direction");
        int R = std::min(int(std::ceil(K + thick)) + 1, g.N / 2 - 1);
        for_each_in_cube(R, [&](const std::array<int, 4>& xi) {
            double par = 0;
            for (int d = 0; d < g.n; ++d) par += xi[std::size_t(d)] * spec.direction[std::size_t(d)] / dlen;
            if (par < 0.5 * K - 1e-9 || par > K + 1e-9) return;
            double perp2 = freq_abs2(xi, g.n) - par * par;
            if (perp2 > thick * thick + 1e-9) return;
            WaveMode m;
            m.xi = xi;
            m.branch = +1;
            m.amp = 1.0;  // coherent packet
            ens.modes.push_back(m);
        });
    }
    return ens;
}

// the spec's random_wave operation: generate, window, normalize in (s,b)
inline SpaceTimeField random_wave(const TorusGrid& g, int Nt, const EnsembleSpec& spec, double s, double b,
                                  std::uint64_t seed, WindowKind window = WindowKind::CosineSquared) {
    auto rng = rng_stream(seed, 0x57415645ull);
    FreeWaveEnsemble ens = make_ensemble(g, Nt, spec, rng, window);
    double nrm = ens.hsb_norm_sparse(s, b);
    if (nrm > 0) ens.scale(1.0 / nrm);
    return ens.materialize();
}

}  // namespace mkg
