#pragma once

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "mkg/core.hpp"

namespace mkg {
namespace fft {

// Cached FFTW c2c plans, keyed by (rank dims..., sign). Plan creation is
// serialized; execution goes through fftw_execute_dft which is thread-safe
// on distinct arrays of identical layout.
class PlanCache {
  public:
    static PlanCache& instance() {
        static PlanCache c;
        return c;
    }

    fftw_plan get(const std::vector<int>& dims, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = dims;
        key.push_back(sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        std::size_t total = 1;
        for (int d : dims) total *= std::size_t(d);
        fftw_complex* buf = fftw_alloc_complex(total);
        fftw_plan p = fftw_plan_dft(int(dims.size()), dims.data(), buf, buf, sign,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        plans_.emplace(std::move(key), p);
        return p;
    }

  private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& [k, p] : plans_) fftw_destroy_plan(p);
    }
    std::mutex mu_;
    std::map<std::vector<int>, fftw_plan> plans_;
};

// In-place unnormalized c2c transform over an n-dimensional row-major array.
inline void execute(std::vector<Complex>& data, const std::vector<int>& dims, int sign) {
    fftw_plan p = PlanCache::instance().get(dims, sign);
    auto* raw = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, raw, raw);
}

inline void forward_inplace(std::vector<Complex>& data, const TorusGrid& g) {
    std::vector<int> dims(std::size_t(g.n), g.N);
    execute(data, dims, FFTW_FORWARD);
    const double scale = 1.0 / double(g.size());
    for (auto& c : data) c *= scale;
}

inline void inverse_inplace(std::vector<Complex>& data, const TorusGrid& g) {
    std::vector<int> dims(std::size_t(g.n), g.N);
    execute(data, dims, FFTW_BACKWARD);
}

// 1-d transforms along the slowest axis of a (Nt x inner) row-major array,
// used for the temporal direction of space-time fields. Normalized forward
// (1/Nt), unnormalized inverse, matching the spatial convention.
inline void temporal_forward_inplace(std::vector<Complex>& data, int Nt, std::size_t inner) {
    std::vector<Complex> line(static_cast<std::size_t>(Nt));
    std::vector<int> dims{Nt};
    fftw_plan p = PlanCache::instance().get(dims, FFTW_FORWARD);
    const double scale = 1.0 / Nt;
    for (std::size_t j = 0; j < inner; ++j) {
        for (int m = 0; m < Nt; ++m) line[std::size_t(m)] = data[std::size_t(m) * inner + j];
        auto* raw = reinterpret_cast<fftw_complex*>(line.data());
        fftw_execute_dft(p, raw, raw);
        for (int m = 0; m < Nt; ++m) data[std::size_t(m) * inner + j] = line[std::size_t(m)] * scale;
    }
}

inline void temporal_inverse_inplace(std::vector<Complex>& data, int Nt, std::size_t inner) {
    std::vector<Complex> line(static_cast<std::size_t>(Nt));
    std::vector<int> dims{Nt};
    fftw_plan p = PlanCache::instance().get(dims, FFTW_BACKWARD);
    for (std::size_t j = 0; j < inner; ++j) {
        for (int m = 0; m < Nt; ++m) line[std::size_t(m)] = data[std::size_t(m) * inner + j];
        auto* raw = reinterpret_cast<fftw_complex*>(line.data());
        fftw_execute_dft(p, raw, raw);
        for (int m = 0; m < Nt; ++m) data[std::size_t(m) * inner + j] = line[std::size_t(m)];
    }
}

}  // namespace fft
}  // namespace mkg
