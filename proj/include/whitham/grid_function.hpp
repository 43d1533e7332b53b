#pragma once

// Real periodic field on a uniform grid, carried in both physical and
// spectral form. The two representations are synchronized lazily: an
// instance is constructed from one of them and the other is produced on
// first access. After construction a GridFunction behaves as an
// immutable value; it may be moved between threads but a single instance
// must not be read from two threads while a representation is still
// pending.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "whitham/fft.hpp"

namespace whitham {

using cxd = std::complex<double>;

class numeric_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Dispersion exponent. The sub-range predicates mirror the regimes the
// breaking theorems live in.
struct Alpha {
    double value;

    explicit Alpha(double v) : value(v) {
        if (!(v > 0.0) || !(v <= 3.0))
            throw std::domain_error("Alpha: value must be in (0, 3], got " + std::to_string(v));
    }
    bool below_one() const { return value < 1.0; }
    bool below_half() const { return value < 0.5; }
    bool below_third() const { return value < 1.0 / 3.0; }
};

class GridFunction {
  public:
    static GridFunction from_values(double domain_length, std::vector<double> values) {
        GridFunction g(domain_length, static_cast<int>(values.size()));
        g.vals_ = std::move(values);
        g.vals_ok_ = true;
        return g;
    }

    static GridFunction from_coeffs(double domain_length, std::vector<cxd> coeffs) {
        const int n = 2 * (static_cast<int>(coeffs.size()) - 1);
        GridFunction g(domain_length, n);
        // real field: mean and Nyquist coefficients are real
        coeffs.front() = cxd(coeffs.front().real(), 0.0);
        coeffs.back() = cxd(coeffs.back().real(), 0.0);
        g.cfs_ = std::move(coeffs);
        g.cfs_ok_ = true;
        return g;
    }

    double domain_length() const { return length_; }
    int n_points() const { return n_; }
    double dx() const { return length_ / n_; }
    double node(int j) const { return length_ * j / n_; }
    // wavenumber of spectral index k (k = 0..n/2)
    double xi(int k) const { return 2.0 * M_PI * k / length_; }

    const std::vector<double>& values() const {
        if (!vals_ok_) {
            vals_ = fft::inverse(cfs_, n_);
            vals_ok_ = true;
        }
        return vals_;
    }

    const std::vector<cxd>& coeffs() const {
        if (!cfs_ok_) {
            cfs_ = fft::forward(vals_);
            cfs_.front() = cxd(cfs_.front().real(), 0.0);
            cfs_.back() = cxd(cfs_.back().real(), 0.0);
            cfs_ok_ = true;
        }
        return cfs_;
    }

    bool finite() const {
        for (double v : values())
            if (!std::isfinite(v)) return false;
        return true;
    }

  private:
    GridFunction(double length, int n) : length_(length), n_(n) {
        if (!(length > 0.0)) throw std::domain_error("GridFunction: period must be positive");
        if (n < 16 || (n & (n - 1)) != 0)
            throw std::domain_error("GridFunction: n_points must be a power of two >= 16, got " +
                                    std::to_string(n));
    }

    double length_;
    int n_;
    mutable std::vector<double> vals_;
    mutable std::vector<cxd> cfs_;
    mutable bool vals_ok_ = false;
    mutable bool cfs_ok_ = false;
};

}  // namespace whitham
