#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blowup/error.hpp"

namespace blowup::numerics {

struct NewtonSettings {
    double residual_tol = 1e-15;  // sup norm
    int max_iterations = 100;
    double backtrack = 0.5;
    double min_step_fraction = 0x1p-20;
    // A line search that cannot lower the residual means rounding noise has
    // been reached. Such an iterate is accepted when its residual is below this.
    double stagnation_tol = 1e-12;

    void validate() const {
        if (!(residual_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "residual_tol must be positive");
        if (max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "max_iterations must be >= 1");
        if (!(backtrack > 0.0 && backtrack < 1.0))
            throw Error(ErrorCode::InvalidArgument, "backtrack factor must lie in (0, 1)");
        if (!(min_step_fraction > 0.0 && min_step_fraction <= 1.0))
            throw Error(ErrorCode::InvalidArgument, "min_step_fraction must lie in (0, 1]");
    }
};

template <class Real>
struct NewtonResult {
    std::vector<Real> solution;
    double final_residual = 0.0;
    int iterations = 0;
    bool stagnated = false;             // accepted at the rounding floor
    std::vector<double> residual_history;  // sup norm per iterate, starting with x0
};

template <class Real>
double sup_norm(const std::vector<Real>& v) {
    double m = 0.0;
    for (const auto& x : v) {
        const double a = std::abs(static_cast<double>(x));
        if (!(a <= m)) m = a;  // NaN propagates
    }
    return m;
}

/// Damped Newton iteration for F(x) = 0.
///
/// The iterate and residual use `Real` (double or long double); the Jacobian and
/// the linear solve are in double. Each step is halved until the sup-norm
/// residual decreases or the step fraction drops below min_step_fraction.
template <class Real>
NewtonResult<Real> newton_solve(const std::function<std::vector<Real>(const std::vector<Real>&)>& residual_fn,
                                const std::function<Eigen::MatrixXd(const std::vector<Real>&)>& jacobian_fn,
                                std::vector<Real> x0, const NewtonSettings& settings = {}) {
    settings.validate();
    for (const auto& v : x0)
        if (!std::isfinite(static_cast<double>(v))) throw Error(ErrorCode::NonFinite, "non-finite Newton start");

    NewtonResult<Real> out;
    std::vector<Real> x = std::move(x0);
    std::vector<Real> r = residual_fn(x);
    if (r.size() != x.size()) throw Error(ErrorCode::InvalidArgument, "residual and unknown sizes differ");
    double rnorm = sup_norm(r);
    if (!std::isfinite(rnorm)) throw Error(ErrorCode::NonFinite, "non-finite residual at Newton start");
    out.residual_history.push_back(rnorm);

    const std::size_t n = x.size();
    for (int it = 0; it < settings.max_iterations; ++it) {
        if (rnorm <= settings.residual_tol) {
            out.solution = std::move(x);
            out.final_residual = rnorm;
            out.iterations = it;
            return out;
        }
        const Eigen::MatrixXd J = jacobian_fn(x);
        if (J.rows() != static_cast<Eigen::Index>(n) || J.cols() != static_cast<Eigen::Index>(n))
            throw Error(ErrorCode::InvalidArgument, "Jacobian has wrong shape");
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
        if (!(lu.rcond() > std::numeric_limits<double>::epsilon()))
            throw Error(ErrorCode::SingularJacobian, "Jacobian is numerically singular at iteration " + std::to_string(it));
        Eigen::VectorXd rhs(n);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = -static_cast<double>(r[i]);
        const Eigen::VectorXd dx = lu.solve(rhs);
        if (!dx.allFinite()) throw Error(ErrorCode::SingularJacobian, "non-finite Newton step");

        double t = 1.0;
        bool accepted = false;
        std::vector<Real> trial(n);
        std::vector<Real> rtrial;
        double rtrial_norm = 0.0;
        while (t >= settings.min_step_fraction) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + static_cast<Real>(t * dx[i]);
            rtrial = residual_fn(trial);
            rtrial_norm = sup_norm(rtrial);
            if (rtrial_norm < rnorm) {
                accepted = true;
                break;
            }
            t *= settings.backtrack;
        }
        if (!accepted) {
            if (rnorm <= settings.stagnation_tol) {
                out.solution = std::move(x);
                out.final_residual = rnorm;
                out.iterations = it;
                out.stagnated = true;
                return out;
            }
            throw Error(ErrorCode::NoConvergence,
                        "line search stalled at residual " + std::to_string(rnorm) + " after " + std::to_string(it) +
                            " iterations");
        }
        x.swap(trial);
        r.swap(rtrial);
        rnorm = rtrial_norm;
        out.residual_history.push_back(rnorm);
    }
    if (rnorm <= settings.residual_tol || rnorm <= settings.stagnation_tol) {
        out.solution = std::move(x);
        out.final_residual = rnorm;
        out.iterations = settings.max_iterations;
        out.stagnated = rnorm > settings.residual_tol;
        return out;
    }
    throw Error(ErrorCode::NoConvergence, "max_iterations reached with residual " + std::to_string(rnorm));
}

}  // namespace blowup::numerics
