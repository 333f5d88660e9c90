#pragma once

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

#include "narrowband/common.hpp"

namespace narrowband {

namespace detail {

/// Process-wide FFTW plan cache. Plan creation is not thread-safe, so it is
/// mutex-guarded; execution through fftw_execute_dft on caller arrays is safe.
class fft_plans {
  public:
    static fftw_plan get(int n, int sign) {
        static fft_plans cache;
        std::lock_guard<std::mutex> lock(cache.mutex_);
        auto key = std::make_pair(n, sign);
        auto it = cache.plans_.find(key);
        if (it != cache.plans_.end()) return it->second;
        std::vector<cplx> a(n), b(n);
        fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                       reinterpret_cast<fftw_complex*>(b.data()), sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) throw error("fftw plan creation failed for n=" + std::to_string(n));
        cache.plans_.emplace(key, p);
        return p;
    }

  private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

}  // namespace detail

/// Centered DFT on n nodes indexed against the centered lattice
///   out_m = sum_j in_j * exp(sign * i * (2 pi / n) * (j - n/2) * (m - n/2)).
/// Requires n divisible by 4 (grid sizes here are powers of two >= 64).
inline std::vector<cplx> centered_dft(const std::vector<cplx>& in, int sign) {
    int n = static_cast<int>(in.size());
    if (n % 4 != 0) throw error("centered_dft requires n divisible by 4");
    std::vector<cplx> tmp(n), out(n);
    for (int j = 0; j < n; ++j) tmp[j] = (j & 1) ? -in[j] : in[j];
    fftw_plan plan = detail::fft_plans::get(n, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(tmp.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    for (int m = 0; m < n; ++m)
        if (m & 1) out[m] = -out[m];
    return out;
}

}  // namespace narrowband
