#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "blowup/numerics/chebyshev.hpp"

namespace blowup::profile {

using numerics::ext_real;

/// Dimension d and nonlinearity sigma (p = 2 sigma + 1).
struct ProblemParams {
    double d = 3.0;
    double sigma = 1.0;

    double s_c() const noexcept { return d / 2.0 - 1.0 / sigma; }
    double p() const noexcept { return 2.0 * sigma + 1.0; }
    /// Throws InvalidArgument unless d >= 2, sigma > 0 and s_c > 0.
    void validate() const;
    bool operator==(const ProblemParams&) const = default;
};

/// Grid plus differentiation matrices, shared between solutions on the same mesh.
struct Discretization {
    numerics::ChebyshevGrid grid;
    numerics::DiffMatrices mats;
};

/// Cached per (n, domain_length); safe to call from several threads.
std::shared_ptr<const Discretization> make_discretization(std::size_t n, double domain_length);

/// Collocation system for the real and imaginary parts of the profile equation.
///
/// Unknowns are packed as [P_0..P_{n-1}, W_0..W_{n-1}, a]. Rows 0..n-3 hold the
/// P equation at nodes 1..n-2, rows n-2..2n-5 the W equation, then
/// P_xi(0), W(0), W_xi(0) and the two far-field rows at xi = K.
class ProfileSystem {
public:
    ProfileSystem(ProblemParams params, std::shared_ptr<const Discretization> disc);

    std::size_t nodes() const noexcept { return n_; }
    std::size_t unknowns() const noexcept { return 2 * n_ + 1; }
    const ProblemParams& params() const noexcept { return params_; }
    const Discretization& discretization() const noexcept { return *disc_; }

    /// Evaluated in extended precision. Throws NonFinite on non-finite input.
    std::vector<ext_real> residual(const std::vector<ext_real>& x) const;
    /// Analytic Jacobian of residual(), in double.
    Eigen::MatrixXd jacobian(const std::vector<ext_real>& x) const;

private:
    ProblemParams params_;
    std::shared_ptr<const Discretization> disc_;
    std::size_t n_;
};

std::vector<ext_real> assemble_residual(const std::vector<ext_real>& x, const ProblemParams& params,
                                        std::shared_ptr<const Discretization> disc);
Eigen::MatrixXd assemble_jacobian(const std::vector<ext_real>& x, const ProblemParams& params,
                                  std::shared_ptr<const Discretization> disc);

}  // namespace blowup::profile
