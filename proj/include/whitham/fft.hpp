#pragma once

// Thin cache around FFTW's real-to-complex transforms. Plans are created
// once per size under a lock and executed via the new-array interface,
// which is safe to call concurrently.

#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace whitham::fft {

struct PlanPair {
    fftw_plan fwd = nullptr;  // r2c
    fftw_plan bwd = nullptr;  // c2r
};

namespace detail {

inline PlanPair& plans_for(int n) {
    static std::mutex mtx;
    static std::map<int, PlanPair> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> re(n);
    std::vector<std::complex<double>> cx(n / 2 + 1);
    PlanPair p;
    p.fwd = fftw_plan_dft_r2c_1d(n, re.data(),
                                 reinterpret_cast<fftw_complex*>(cx.data()),
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(cx.data()),
                                 re.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p.fwd || !p.bwd) throw std::runtime_error("fftw plan creation failed");
    return cache.emplace(n, p).first->second;
}

}  // namespace detail

// values[n] -> coeffs[n/2+1], normalized so that coeffs are the actual
// Fourier coefficients: u(x) = sum_k c_k exp(i 2 pi k x / L).
inline std::vector<std::complex<double>> forward(const std::vector<double>& values) {
    const int n = static_cast<int>(values.size());
    auto& p = detail::plans_for(n);
    std::vector<double> in(values);
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_execute_dft_r2c(p.fwd, in.data(),
                         reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / n;
    for (auto& c : out) c *= scale;
    return out;
}

// coeffs[n/2+1] -> values[n].
inline std::vector<double> inverse(const std::vector<std::complex<double>>& coeffs, int n) {
    auto& p = detail::plans_for(n);
    std::vector<std::complex<double>> in(coeffs);
    std::vector<double> out(n);
    fftw_execute_dft_c2r(p.bwd, reinterpret_cast<fftw_complex*>(in.data()),
                         out.data());
    return out;
}

}  // namespace whitham::fft
