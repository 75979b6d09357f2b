#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include "blowup/error.hpp"
#include "blowup/numerics/newton.hpp"
#include "blowup/numerics/rk45.hpp"
#include "blowup/profile/system.hpp"

namespace blowup::profile {

/// Converged profile Q = P + iW on a Chebyshev grid together with a.
/// P, W and a are held in extended precision.
struct ProfileSolution {
    ProblemParams params;
    std::shared_ptr<const Discretization> disc;
    std::vector<ext_real> p;
    std::vector<ext_real> w;
    ext_real a_ext = 0.0L;
    double residual_norm = 0.0;
    int iterations = 0;

    const numerics::ChebyshevGrid& grid() const { return disc->grid; }
    std::size_t size() const { return p.size(); }
    double a() const { return static_cast<double>(a_ext); }
    double q0() const { return static_cast<double>(p.front()); }
    std::vector<std::complex<double>> q() const;
    /// Collocation derivative D1 Q.
    std::vector<std::complex<double>> q_xi() const;
    std::vector<ext_real> packed() const;
    /// Builds a solution view of a packed vector without any checks.
    static ProfileSolution unpack(const ProblemParams& params, std::shared_ptr<const Discretization> disc,
                                  const std::vector<ext_real>& x);
};

struct ProfileSettings {
    std::size_t n = 257;
    double domain_length = 200.0;
    numerics::NewtonSettings newton{};
    double trivial_tol = 1e-6;
};

struct ShootingSettings {
    double epsilon = 1e-6;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double amplitude_bound = 1e3;
};

/// Integrates the profile ODE as an initial value problem from xi = epsilon
/// with the series start Q(eps) = q0 + eps^2/(2d) (q0 - i a q0/sigma - q0^{2 sigma + 1}).
/// State is [Q, Q_xi]. Integration stops early once |Q| exceeds the amplitude bound.
numerics::Trajectory shoot_profile_ivp(const ProblemParams& params, double a, double q0, double xi_end,
                                       const ShootingSettings& settings = {});

/// Shooting trajectory sampled onto the grid, packed as [P; W; a_est].
/// Throws IvpDiverged if the trajectory exceeds the amplitude bound or the
/// integrator underflows.
std::vector<ext_real> initial_guess_by_shooting(const ProblemParams& params, double a_est, double q0_est,
                                                const numerics::ChebyshevGrid& grid,
                                                const ShootingSettings& settings = {});

/// Newton solve from a packed guess. The result is normalised to W(0) = 0,
/// P(0) > 0 and a > 0 using the symmetries Q -> -Q and (Q, a) -> (conj Q, -a).
/// Throws NoConvergence, SingularJacobian, ConvergedToTrivial.
ProfileSolution solve_profile(const ProblemParams& params, std::shared_ptr<const Discretization> disc,
                              const std::vector<ext_real>& guess, const ProfileSettings& settings = {});

/// Shooting guess from (a_est, q0_est) followed by solve_profile.
ProfileSolution solve_profile(const ProblemParams& params, double a_est, double q0_est,
                              const ProfileSettings& settings = {});

/// Number of strict local maxima of |Q| over the nodes (branch label, descriptive only).
int count_local_maxima(const ProfileSolution& sol);

struct ContinuationEntry {
    ProblemParams params;
    double a = 0.0;
    double q0 = 0.0;
    bool converged = false;
    int iterations = 0;
    double residual_norm = 0.0;
};

struct ContinuationRecord {
    std::vector<ContinuationEntry> entries;  // converged and failed attempts, in order
    std::vector<double> step_history;        // step used for each attempt
    std::vector<ProfileSolution> solutions;  // one per converged entry
};

/// Thrown when the step has been halved below min_step without convergence.
/// Carries everything computed before the stall.
class ContinuationStalled : public Error {
public:
    ContinuationStalled(const std::string& what, ContinuationRecord partial)
        : Error(ErrorCode::ContinuationStalled, what), partial_(std::move(partial)) {}
    const ContinuationRecord& partial() const noexcept { return partial_; }

private:
    ContinuationRecord partial_;
};

struct ContinuationSettings {
    double step = 0.1;
    double min_step = 1e-3;
    ProfileSettings profile{};
};

/// Walks d first, then sigma, from start.params to target. The predictor is
/// the Lagrange extrapolation of the last three converged solutions along the
/// current leg (3u1 - 3u2 + u3 for equal spacing), linear with two, warm start
/// with one. A failed Newton solve halves the step.
ContinuationRecord continue_in_parameter(const ProfileSolution& start, const ProblemParams& target,
                                         const ContinuationSettings& settings = {});

}  // namespace blowup::profile
