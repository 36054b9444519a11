#pragma once

#include <cstring>
#include <fstream>

#include "mkg/initdata.hpp"

namespace mkg {

// MKGS snapshot: magic "MKGS", version u32=1, n u32, N u32, m f64, t f64,
// then fields in order (phi, phi_t, a[0..n], a_t[0..n]) as little-endian
// interleaved (re, im) f64 pairs in row-major frequency order (the storage
// layout of SpectralScalar, axis 0 slowest, FFT index order per axis).

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = (v >> (8 * i)) & 0xff;
    os.write(reinterpret_cast<const char*>(b), 4);
}
inline std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
    return v;
}
inline void put_f64(std::ostream& os, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (u >> (8 * i)) & 0xff;
    os.write(reinterpret_cast<const char*>(b), 8);
}
inline double get_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= std::uint64_t(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

inline void put_field(std::ostream& os, const SpectralScalar& f) {
    for (const auto& c : f.coeffs) {
        put_f64(os, c.real());
        put_f64(os, c.imag());
    }
}
inline void get_field(std::istream& is, SpectralScalar& f) {
    for (auto& c : f.coeffs) {
        double re = get_f64(is);
        double im = get_f64(is);
        c = Complex(re, im);
    }
}

}  // namespace detail

inline void save_snapshot(const std::string& path, const MKGState& state) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open snapshot file for writing: " + path);
    os.write("MKGS", 4);
    detail::put_u32(os, 1);
    detail::put_u32(os, std::uint32_t(state.grid.n));
    detail::put_u32(os, std::uint32_t(state.grid.N));
    detail::put_f64(os, state.mass);
    detail::put_f64(os, state.t);
    detail::put_field(os, state.phi);
    detail::put_field(os, state.phi_t);
    for (const auto& f : state.a) detail::put_field(os, f);
    for (const auto& f : state.a_t) detail::put_field(os, f);
    if (!os) throw std::runtime_error("snapshot write failed: " + path);
}

inline MKGState load_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open snapshot file: " + path);
    char magic[4];
    is.read(magic, 4);
    if (std::strncmp(magic, "MKGS", 4) != 0) throw std::runtime_error("bad snapshot magic: " + path);
    std::uint32_t version = detail::get_u32(is);
    if (version != 1) throw std::runtime_error("unsupported snapshot version");
    int n = int(detail::get_u32(is));
    int N = int(detail::get_u32(is));
    TorusGrid g(n, N);
    MKGState state(g);
    state.mass = detail::get_f64(is);
    state.t = detail::get_f64(is);
    detail::get_field(is, state.phi);
    detail::get_field(is, state.phi_t);
    for (auto& f : state.a) detail::get_field(is, f);
    for (auto& f : state.a_t) detail::get_field(is, f);
    if (!is) throw std::runtime_error("snapshot truncated: " + path);
    return state;
}

}  // namespace mkg
