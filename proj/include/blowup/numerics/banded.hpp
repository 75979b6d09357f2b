#pragma once

#include <complex>
#include <span>
#include <vector>

namespace blowup::numerics {

/// Square complex matrix with `lower` sub-diagonals and `upper` super-diagonals
/// in packed band storage. Reads outside the band return zero.
///
/// factorize() performs LU without pivoting in place, so the factors keep the
/// same band. A pivot that is zero or tiny relative to its row throws
/// SingularPivot instead of producing NaN.
class BandedMatrix {
public:
    using value_type = std::complex<double>;

    BandedMatrix() = default;
    BandedMatrix(std::size_t n, std::size_t lower, std::size_t upper);

    std::size_t size() const noexcept { return n_; }
    std::size_t lower() const noexcept { return kl_; }
    std::size_t upper() const noexcept { return ku_; }
    bool in_band(std::size_t i, std::size_t j) const noexcept {
        return j + kl_ >= i && i + ku_ >= j && i < n_ && j < n_;
    }

    value_type operator()(std::size_t i, std::size_t j) const noexcept {
        return in_band(i, j) ? data_[index(i, j)] : value_type{};
    }
    /// Throws OutOfRange for entries outside the band.
    value_type& at(std::size_t i, std::size_t j);

    /// y = A x (valid only before factorize()).
    std::vector<value_type> multiply(std::span<const value_type> x) const;

    void factorize();
    bool factorized() const noexcept { return factorized_; }

    /// Solves A x = b in place using the stored factors.
    void solve_in_place(std::span<value_type> b) const;

private:
    std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * width_ + (j + kl_ - i); }

    std::size_t n_ = 0, kl_ = 0, ku_ = 0, width_ = 0;
    std::vector<value_type> data_;
    bool factorized_ = false;
};

}  // namespace blowup::numerics
