#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

#include "kcurves/errors.hpp"

namespace kcurves {

namespace detail {
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

/// In-place d-dimensional DFT of an m^d row-major array:
/// out[k] = sum_j in[j] exp(sign * 2 pi i k.j / m), unnormalized. sign is -1 or +1.
inline void dft_inplace(std::vector<std::complex<double>>& data, int m, int d, int sign) {
    if (m < 1 || d < 1 || d > 8) throw SizeError("dft: unsupported shape");
    std::size_t n = 1;
    for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(m);
    if (data.size() != n) throw SizeError("dft: buffer size is not m^d");
    std::vector<int> dims(static_cast<std::size_t>(d), m);
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        // the FFTW planner is not thread safe; execution is
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft(d, dims.data(), buf, buf, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    if (!plan) throw NumericalError("dft: FFTW could not create a plan");
    fftw_execute(plan);
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
}

}  // namespace kcurves
