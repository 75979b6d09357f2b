#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace blowup::numerics {

/// Extended precision used where the collocation residual must sit below 1e-12.
using ext_real = long double;
using MatrixXe = Eigen::Matrix<ext_real, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXe = Eigen::Matrix<ext_real, Eigen::Dynamic, 1>;

/// Chebyshev-Gauss-Lobatto points mapped onto [0, domain_length], ascending.
///
/// Node k is domain_length * (1 - cos(k pi / (n - 1))) / 2; the endpoints are
/// exactly 0 and domain_length.
class ChebyshevGrid {
public:
    ChebyshevGrid() = default;

    std::size_t size() const noexcept { return nodes_.size(); }
    double domain_length() const noexcept { return domain_length_; }
    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const ext_real> nodes_ext() const noexcept { return nodes_ext_; }
    double operator[](std::size_t k) const noexcept { return nodes_[k]; }

    friend ChebyshevGrid build_grid(std::size_t n, double domain_length);

private:
    double domain_length_ = 0.0;
    std::vector<double> nodes_;
    std::vector<ext_real> nodes_ext_;
};

/// Throws InvalidArgument if n < 8 or domain_length <= 0.
ChebyshevGrid build_grid(std::size_t n, double domain_length);

/// First and second derivative matrices on a mapped grid, held in extended
/// precision with rounded double copies for Jacobian assembly.
struct DiffMatrices {
    MatrixXe d1;
    MatrixXe d2;
    Eigen::MatrixXd d1_f64;
    Eigen::MatrixXd d2_f64;
};

/// d2 is formed as d1 * d1; d1 uses the trigonometric node-difference
/// identity and the negative-sum diagonal.
DiffMatrices build_diff_matrices(const ChebyshevGrid& grid);

/// Clenshaw-Curtis weights on the grid's own nodes (they integrate over
/// [0, domain_length]).
std::vector<ext_real> clenshaw_curtis_weights(const ChebyshevGrid& grid);

/// Value at x of the polynomial interpolant through (grid nodes, values).
/// Barycentric form; x outside the domain is evaluated by extrapolation.
double chebyshev_interpolate(const ChebyshevGrid& grid, std::span<const double> values, double x);
std::complex<double> chebyshev_interpolate(const ChebyshevGrid& grid,
                                           std::span<const std::complex<double>> values, double x);

/// Resample the interpolant through (grid, values) onto `targets`.
std::vector<double> chebyshev_resample(const ChebyshevGrid& grid, std::span<const double> values,
                                       std::span<const double> targets);
std::vector<std::complex<double>> chebyshev_resample(const ChebyshevGrid& grid,
                                                     std::span<const std::complex<double>> values,
                                                     std::span<const double> targets);

/// Integral of f(xi) xi^(d-1) over [0, domain_length] with f sampled on the nodes.
double integrate_radial(std::span<const double> f, const ChebyshevGrid& grid, double d);

/// Integral of f(xi) xi^(d-1) over [0, upper] for upper <= domain_length. The
/// interpolant of f is resampled on a Chebyshev grid of the same size spanning
/// [0, upper] and integrated there by Clenshaw-Curtis.
double integrate_radial_to(std::span<const double> f, const ChebyshevGrid& grid, double d,
                           double upper);

}  // namespace blowup::numerics
