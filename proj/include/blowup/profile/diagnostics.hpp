#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "blowup/numerics/rk45.hpp"
#include "blowup/profile/solver.hpp"

namespace blowup::profile {

/// Pseudo-phase plane samples (C, D) = (|Q|, Re(Q_xi / Q)), ordered by xi.
/// psi is the phase gradient Im(Q_xi / Q).
struct PhasePath {
    std::vector<double> xi;
    std::vector<double> c;
    std::vector<double> d_log;
    std::vector<double> psi;

    std::size_t size() const noexcept { return c.size(); }
};

/// Nodes with |Q| <= 1e-30 are skipped.
PhasePath phase_path(const ProfileSolution& sol);

/// Phase path from an IVP trajectory whose state is [Q, Q_xi], sampled at the
/// integrator's accepted steps.
PhasePath phase_path_from_trajectory(const numerics::Trajectory& traj);

struct OscillationReport {
    bool oscillating = false;
    int sign_changes = 0;
    double c_threshold = 0.0;
};

/// Default threshold for detect_oscillation: half of the last local maximum of
/// C that rises to at least twice the smallest C before it (the first point
/// always qualifies), so small ripples on a decaying tail are ignored.
double default_oscillation_threshold(const PhasePath& path);

/// Counts sign changes of D over the terminal sub-path with C < c_threshold
/// (the points after the last one with C >= c_threshold).
OscillationReport detect_oscillation(const PhasePath& path, std::optional<double> c_threshold = std::nullopt,
                                     int min_sign_changes = 3);

struct HamiltonianStudy {
    std::vector<double> k_trunc;
    std::vector<double> h_value;
};

/// H(k) = int_0^k (|Q_xi|^2 - |Q|^{2 sigma + 2} / (sigma + 1)) xi^{d-1} dxi.
HamiltonianStudy hamiltonian_study(const ProfileSolution& sol, std::span<const double> k_values);

struct C0Check {
    double xi_star = 0.0;
    double c_num = 0.0;
    double c_pred = 0.0;
    double abs_err = 0.0;
    double rel_err = 0.0;
};

/// C0 = [(sigma + 1)(1/sigma^2 + 1/a^2)]^{1/(2 sigma)}.
double c0_formula(double sigma, double a);

/// Throws NotEnergyCritical unless |s_c - 1| <= 1e-12. The default far-field
/// node is the largest node with xi <= 0.9 K.
C0Check c0_check(const ProfileSolution& sol, std::optional<double> xi_star = std::nullopt);

struct IdentityResiduals {
    double res1 = 0.0;
    double res2 = 0.0;
};

/// Absolute residuals of the two integral identities satisfied by every
/// solution, evaluated at xi in (0, K].
IdentityResiduals identity_residuals(const ProfileSolution& sol, double xi);

/// sup over nodes with 0 < xi <= xi_max of |Q(xi) - RHS(xi)| for the Volterra
/// form of the profile equation (log kernel when d = 2). Uses only
/// interpolation and quadrature of Q.
double volterra_residual(const ProfileSolution& sol, double xi_max = 50.0);

/// Member of the scaling family with sup |Q~| = target_sup:
/// Q~(eta) = lambda Q(lambda^sigma eta), lambda = target_sup / Q(0),
/// a~ = a lambda^{2 sigma}. It solves the profile equation with the linear
/// coefficient omega = lambda^{2 sigma} in place of 1.
struct RescaledProfile {
    std::vector<double> eta;
    std::vector<std::complex<double>> q;
    double a_tilde = 0.0;
    double lambda = 1.0;
    double omega = 1.0;
};

RescaledProfile rescale_family(const ProfileSolution& sol, double target_sup);

}  // namespace blowup::profile
