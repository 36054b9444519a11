#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mkg {

using Complex = std::complex<double>;
inline constexpr Complex I{0.0, 1.0};

// Periodic box [0,2pi)^n sampled on N points per axis, so frequencies are
// integers xi in {-N/2+1,...,N/2}^n and h = 2pi/N. dealias_fraction rho is
// the kept-mode fraction: modes with any |xi_i| > rho*N are zeroed before
// nonlinear products re-enter spectral space (rho = 1/3 is exact for
// quadratic terms).
struct TorusGrid {
    int n = 1;
    int N = 4;
    double dealias_fraction = 1.0 / 3.0;

    TorusGrid() = default;
    TorusGrid(int n_, int N_, double rho = 1.0 / 3.0)
        : n(n_), N(N_), dealias_fraction(rho) {
        validate();
    }

    void validate() const {
        if (n < 1 || n > 4) throw std::invalid_argument("grid.n: dimension must be 1..4");
        if (N < 4 || (N & 1)) throw std::invalid_argument("grid.N: need N >= 4 and even");
        if ((N & (N - 1)) != 0) throw std::invalid_argument("grid.N: N must be a power of two");
        if (!(dealias_fraction > 0.0 && dealias_fraction <= 0.5))
            throw std::invalid_argument("grid.dealias_fraction: need rho in (0, 1/2]");
        double logsz = n * std::log2(double(N));
        if (logsz > 26.0 + 1e-9) throw std::invalid_argument("grid: total lattice exceeds 2^26 points");
    }

    std::size_t size() const {
        std::size_t s = 1;
        for (int d = 0; d < n; ++d) s *= std::size_t(N);
        return s;
    }
    double spacing() const { return 2.0 * M_PI / N; }
    // largest |xi_i| surviving dealias
    int kept_limit() const { return int(std::floor(dealias_fraction * N + 1e-9)); }

    bool operator==(const TorusGrid& o) const { return n == o.n && N == o.N; }
    bool operator!=(const TorusGrid& o) const { return !(*this == o); }
};

// FFT-layout index k in [0,N) <-> integer frequency xi in {-N/2+1,...,N/2}
inline int index_to_freq(int k, int N) { return k <= N / 2 ? k : k - N; }
inline int freq_to_index(int xi, int N) { return xi >= 0 ? xi : xi + N; }

// Decode flat row-major index (axis 0 slowest) into per-axis frequencies.
struct FreqIter {
    const TorusGrid& g;
    explicit FreqIter(const TorusGrid& grid) : g(grid) {}
    std::array<int, 4> freqs(std::size_t flat) const {
        std::array<int, 4> xi{0, 0, 0, 0};
        for (int d = g.n - 1; d >= 0; --d) {
            int k = int(flat % g.N);
            flat /= g.N;
            xi[d] = index_to_freq(k, g.N);
        }
        return xi;
    }
};

inline double freq_abs2(const std::array<int, 4>& xi, int n) {
    double s = 0;
    for (int d = 0; d < n; ++d) s += double(xi[d]) * xi[d];
    return s;
}

// <x> = (1+|x|^2)^{1/2}
inline double angle_bracket(double x) { return std::sqrt(1.0 + x * x); }

// Warning records: non-fatal convention notices (e.g. mean dropped by a
// negative-power multiplier). Collected process-wide, queryable by tests.
class WarningLog {
  public:
    static WarningLog& instance() {
        static WarningLog log;
        return log;
    }
    void emit(std::string msg) {
        std::lock_guard<std::mutex> lock(mu_);
        messages_.push_back(std::move(msg));
    }
    std::vector<std::string> drain() {
        std::lock_guard<std::mutex> lock(mu_);
        auto out = std::move(messages_);
        messages_.clear();
        return out;
    }
    std::size_t count() {
        std::lock_guard<std::mutex> lock(mu_);
        return messages_.size();
    }
    void clear() {
        std::lock_guard<std::mutex> lock(mu_);
        messages_.clear();
    }

  private:
    std::mutex mu_;
    std::vector<std::string> messages_;
};

inline void warn(std::string msg) { WarningLog::instance().emit(std::move(msg)); }

// Thread budget for internal parallelism, capped by MKG_THREADS.
inline int max_threads() {
    static const int cap = [] {
        int hw = int(std::thread::hardware_concurrency());
        if (hw <= 0) hw = 1;
        if (const char* env = std::getenv("MKG_THREADS")) {
            int v = std::atoi(env);
            if (v >= 1) hw = v;
        }
        return hw;
    }();
    return cap;
}

}  // namespace mkg
