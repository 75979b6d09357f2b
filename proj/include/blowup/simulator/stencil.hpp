#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace blowup::simulator {

/// Sixth-order central differences on the uniform radial grid xi_j = j h,
/// j = 0..N, with fictitious points folded into the rows: v_{-j} = v_j on the
/// left and, on the right, v_{N+1..N+3} from the vanishing eighth difference
/// v_m = 8 v_{m-1} - 28 v_{m-2} + ... - v_{m-8}.
///
/// Row j holds coefficients for columns j-7 .. j+3.
class RadialStencil {
public:
    static constexpr int kWidth = 11;
    static constexpr int kBack = 7;
    using Row = std::array<double, kWidth>;

    /// Throws InvalidArgument unless intervals >= 16, h > 0 and d >= 1.
    RadialStencil(std::size_t intervals, double h, double d);

    std::size_t intervals() const noexcept { return n_; }
    double spacing() const noexcept { return h_; }
    double dimension() const noexcept { return d_; }

    /// Radial Laplacian; at j = 0 it is d times the second difference.
    const Row& laplacian_row(std::size_t j) const { return lap_[j]; }
    const Row& derivative_row(std::size_t j) const { return d1_[j]; }

    std::complex<double> laplacian_at(std::span<const std::complex<double>> v, std::size_t j) const;
    std::complex<double> derivative_at(std::span<const std::complex<double>> v, std::size_t j) const;

    /// Applies the operator at every node j = 0..N.
    void laplacian(std::span<const std::complex<double>> v, std::span<std::complex<double>> out) const;
    void derivative(std::span<const std::complex<double>> v, std::span<std::complex<double>> out) const;

    /// Coefficients of the right fictitious point N + g (g = 1, 2, 3) over
    /// columns N-7 .. N.
    const std::array<double, 8>& ghost(int g) const { return ghost_[g - 1]; }

private:
    std::complex<double> apply_row(const Row& row, std::span<const std::complex<double>> v, std::size_t j) const;

    std::size_t n_;
    double h_, d_;
    std::array<std::array<double, 8>, 3> ghost_{};
    std::vector<Row> lap_, d1_;
};

}  // namespace blowup::simulator
