#include "blowup/numerics/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "blowup/error.hpp"

namespace blowup::numerics {

BandedMatrix::BandedMatrix(std::size_t n, std::size_t lower, std::size_t upper)
    : n_(n), kl_(lower), ku_(upper), width_(lower + upper + 1), data_(n * (lower + upper + 1)) {}

BandedMatrix::value_type& BandedMatrix::at(std::size_t i, std::size_t j) {
    if (!in_band(i, j))
        throw Error(ErrorCode::OutOfRange, "entry (" + std::to_string(i) + ", " + std::to_string(j) + ") outside band");
    return data_[index(i, j)];
}

std::vector<BandedMatrix::value_type> BandedMatrix::multiply(std::span<const value_type> x) const {
    if (x.size() != n_) throw Error(ErrorCode::InvalidArgument, "vector size does not match matrix");
    std::vector<value_type> y(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j0 = i > kl_ ? i - kl_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + ku_);
        value_type s{};
        for (std::size_t j = j0; j <= j1; ++j) s += data_[index(i, j)] * x[j];
        y[i] = s;
    }
    return y;
}

void BandedMatrix::factorize() {
    if (factorized_) return;
    for (std::size_t k = 0; k < n_; ++k) {
        const value_type pivot = data_[index(k, k)];
        double row_scale = 0.0;
        for (std::size_t j = (k > kl_ ? k - kl_ : 0); j <= std::min(n_ - 1, k + ku_); ++j)
            row_scale = std::max(row_scale, std::abs(data_[index(k, j)]));
        if (!(std::abs(pivot) > 64.0 * std::numeric_limits<double>::epsilon() * row_scale) ||
            !std::isfinite(std::abs(pivot)))
            throw Error(ErrorCode::SingularPivot, "numerically singular pivot at row " + std::to_string(k));
        const std::size_t i1 = std::min(n_ - 1, k + kl_);
        const std::size_t j1 = std::min(n_ - 1, k + ku_);
        for (std::size_t i = k + 1; i <= i1; ++i) {
            value_type& lik = data_[index(i, k)];
            if (lik == value_type{}) continue;
            lik /= pivot;
            for (std::size_t j = k + 1; j <= j1; ++j) data_[index(i, j)] -= lik * data_[index(k, j)];
        }
    }
    factorized_ = true;
}

void BandedMatrix::solve_in_place(std::span<value_type> b) const {
    if (!factorized_) throw Error(ErrorCode::InvalidArgument, "solve_in_place called before factorize");
    if (b.size() != n_) throw Error(ErrorCode::InvalidArgument, "right-hand side size does not match matrix");
    for (std::size_t i = 1; i < n_; ++i) {
        const std::size_t j0 = i > kl_ ? i - kl_ : 0;
        value_type s = b[i];
        for (std::size_t j = j0; j < i; ++j) s -= data_[index(i, j)] * b[j];
        b[i] = s;
    }
    for (std::size_t ii = n_; ii-- > 0;) {
        const std::size_t j1 = std::min(n_ - 1, ii + ku_);
        value_type s = b[ii];
        for (std::size_t j = ii + 1; j <= j1; ++j) s -= data_[index(ii, j)] * b[j];
        b[ii] = s / data_[index(ii, ii)];
    }
}

}  // namespace blowup::numerics
