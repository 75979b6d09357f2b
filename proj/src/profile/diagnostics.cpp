#include "blowup/profile/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace blowup::profile {

using cd = std::complex<double>;

namespace {

void push_point(PhasePath& path, double xi, cd q, cd qp) {
    const double c2 = std::norm(q);
    const double c = std::sqrt(c2);
    if (!(c > 1e-30) || !std::isfinite(c)) return;
    path.xi.push_back(xi);
    path.c.push_back(c);
    path.d_log.push_back((q.real() * qp.real() + q.imag() * qp.imag()) / c2);
    path.psi.push_back((q.real() * qp.imag() - q.imag() * qp.real()) / c2);
}

std::vector<double> real_part_of(const std::vector<cd>& v, auto&& f) {
    std::vector<double> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = f(k);
    return out;
}

}  // namespace

PhasePath phase_path(const ProfileSolution& sol) {
    const auto q = sol.q();
    const auto qp = sol.q_xi();
    PhasePath path;
    for (std::size_t k = 0; k < q.size(); ++k) push_point(path, sol.grid()[k], q[k], qp[k]);
    return path;
}

PhasePath phase_path_from_trajectory(const numerics::Trajectory& traj) {
    if (traj.dimension() < 2) throw Error(ErrorCode::InvalidArgument, "trajectory state must hold [Q, Q_xi]");
    PhasePath path;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto& y = traj.state(k);
        push_point(path, traj.xs()[k], y[0], y[1]);
    }
    return path;
}

double default_oscillation_threshold(const PhasePath& path) {
    const auto& c = path.c;
    const std::size_t n = c.size();
    if (n == 0) return 0.0;
    double best = c[0];
    double prefix_min = c[0];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (c[i] > c[i - 1] && c[i] >= c[i + 1] && c[i] >= 2.0 * prefix_min) best = c[i];
        prefix_min = std::min(prefix_min, c[i]);
    }
    return 0.5 * best;
}

OscillationReport detect_oscillation(const PhasePath& path, std::optional<double> c_threshold, int min_sign_changes) {
    OscillationReport rep;
    if (path.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty phase path");
    rep.c_threshold = c_threshold ? *c_threshold : default_oscillation_threshold(path);
    std::size_t start = 0;
    for (std::size_t i = 0; i < path.size(); ++i)
        if (path.c[i] >= rep.c_threshold) start = i + 1;
    int last_sign = 0;
    for (std::size_t i = start; i < path.size(); ++i) {
        const double v = path.d_log[i];
        const int sgn = (v > 0.0) - (v < 0.0);
        if (sgn == 0) continue;
        if (last_sign != 0 && sgn != last_sign) ++rep.sign_changes;
        last_sign = sgn;
    }
    rep.oscillating = rep.sign_changes >= min_sign_changes;
    return rep;
}

HamiltonianStudy hamiltonian_study(const ProfileSolution& sol, std::span<const double> k_values) {
    const double K = sol.grid().domain_length();
    for (std::size_t i = 0; i < k_values.size(); ++i) {
        if (!(k_values[i] >= 0.0) || k_values[i] > K * (1.0 + 1e-14))
            throw Error(ErrorCode::OutOfRange, "truncation radius outside [0, K]");
        if (i > 0 && !(k_values[i] > k_values[i - 1]))
            throw Error(ErrorCode::InvalidArgument, "truncation radii must be ascending");
    }
    const auto q = sol.q();
    const auto qp = sol.q_xi();
    const double s = sol.params.sigma;
    const auto f = real_part_of(q, [&](std::size_t k) {
        return std::norm(qp[k]) - std::pow(std::norm(q[k]), s + 1.0) / (s + 1.0);
    });
    HamiltonianStudy out;
    for (double k : k_values) {
        out.k_trunc.push_back(k);
        out.h_value.push_back(numerics::integrate_radial_to(f, sol.grid(), sol.params.d, std::min(k, K)));
    }
    return out;
}

double c0_formula(double sigma, double a) {
    const double inv_a2 = std::isinf(a) ? 0.0 : 1.0 / (a * a);
    return std::pow((sigma + 1.0) * (1.0 / (sigma * sigma) + inv_a2), 1.0 / (2.0 * sigma));
}

C0Check c0_check(const ProfileSolution& sol, std::optional<double> xi_star) {
    if (std::abs(sol.params.s_c() - 1.0) > 1e-12)
        throw Error(ErrorCode::NotEnergyCritical, "c0_check requires s_c = 1, got " + std::to_string(sol.params.s_c()));
    const auto& g = sol.grid();
    const auto q = sol.q();
    C0Check out;
    cd q_star;
    if (xi_star) {
        if (!(*xi_star > 0.0) || *xi_star > g.domain_length())
            throw Error(ErrorCode::OutOfRange, "far-field node outside (0, K]");
        out.xi_star = *xi_star;
        q_star = numerics::chebyshev_interpolate(g, q, *xi_star);
    } else {
        std::size_t k = 0;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (g[i] <= 0.9 * g.domain_length()) k = i;
        out.xi_star = g[k];
        q_star = q[k];
    }
    const double s = sol.params.sigma;
    out.c_num = std::abs(q_star) * std::pow(out.xi_star, 1.0 / s);
    out.c_pred = c0_formula(s, sol.a());
    out.abs_err = std::abs(out.c_num - out.c_pred);
    out.rel_err = out.abs_err / out.c_pred;
    return out;
}

IdentityResiduals identity_residuals(const ProfileSolution& sol, double xi) {
    const auto& g = sol.grid();
    if (!(xi > 0.0) || xi > g.domain_length()) throw Error(ErrorCode::OutOfRange, "identity point outside (0, K]");
    const auto q = sol.q();
    const auto qp = sol.q_xi();
    const double d = sol.params.d, s = sol.params.sigma, a = sol.a();

    const auto mod_qp2 = real_part_of(q, [&](std::size_t k) { return std::norm(qp[k]); });
    const auto mod_q2 = real_part_of(q, [&](std::size_t k) { return std::norm(q[k]); });
    const auto mod_qp = real_part_of(q, [&](std::size_t k) { return std::pow(std::norm(q[k]), s + 1.0); });
    const auto im_qsq = real_part_of(q, [&](std::size_t k) { return (qp[k] * std::conj(q[k])).imag(); });

    // weight s^{d-1} with d = 2 gives the factor s; d = 1 gives none
    const double i_sqp2 = numerics::integrate_radial_to(mod_qp2, g, 2.0, xi);
    const double i_sq2 = numerics::integrate_radial_to(mod_q2, g, 2.0, xi);
    const double i_sqp = numerics::integrate_radial_to(mod_qp, g, 2.0, xi);
    const double i_im = numerics::integrate_radial_to(im_qsq, g, 1.0, xi);

    const cd Q = numerics::chebyshev_interpolate(g, q, xi);
    const cd Qp = numerics::chebyshev_interpolate(g, qp, xi);
    const double q2 = std::norm(Q);
    const double q00 = std::norm(q.front());

    IdentityResiduals r;
    r.res1 = std::abs(std::norm(xi * Qp + Q / s) + 2.0 * (d - 2.0 - 1.0 / s) * i_sqp2 + (2.0 - 2.0 / s) * i_sq2 -
                      (d - 2.0) / s * q00 - xi * xi * q2 + ((d - 2.0) / s - 1.0 / (s * s)) * q2 +
                      xi * xi * std::pow(q2, s + 1.0) / (s + 1.0) + 2.0 / (s * (s + 1.0)) * i_sqp);
    r.res2 = std::abs(2.0 * (xi * Qp * std::conj(Q)).imag() + 2.0 * (d - 2.0) * i_im + 2.0 * a * (1.0 / s - 1.0) * i_sq2 +
                      a * xi * xi * q2);
    return r;
}

double volterra_residual(const ProfileSolution& sol, double xi_max) {
    const auto& g = sol.grid();
    const std::size_t n = g.size();
    const auto q = sol.q();
    const double d = sol.params.d, s = sol.params.sigma, a = sol.a();
    const cd i(0.0, 1.0);
    const bool log_kernel = std::abs(d - 2.0) < 1e-12;

    const auto unit = numerics::build_grid(n, 1.0);
    const auto unit_w = numerics::clenshaw_curtis_weights(unit);

    double worst = 0.0;
    std::vector<double> sub(n);
    for (std::size_t k = 1; k < n; ++k) {
        const double xi = g[k];
        if (xi > xi_max) break;
        for (std::size_t j = 0; j < n; ++j) sub[j] = xi * unit[j];
        sub.back() = xi;
        const auto qs = numerics::chebyshev_resample(g, q, sub);
        cd acc_lin = 0.0, acc_nl = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double sj = sub[j];
            const double wj = static_cast<double>(unit_w[j]) * xi;
            const cd gj = (1.0 + i * a * (d - 1.0 / s) - std::pow(std::norm(qs[j]), s)) * qs[j];
            double kernel;
            if (log_kernel)
                kernel = (sj > 0.0) ? sj * std::log(xi / sj) : 0.0;
            else
                kernel = (sj - sj * std::pow(sj / xi, d - 2.0)) / (d - 2.0);
            acc_lin += wj * sj * qs[j];
            acc_nl += wj * kernel * gj;
        }
        const cd rhs = q.front() - i * a * acc_lin + acc_nl;
        worst = std::max(worst, std::abs(q[k] - rhs));
    }
    return worst;
}

RescaledProfile rescale_family(const ProfileSolution& sol, double target_sup) {
    if (!(target_sup > 0.0) || !std::isfinite(target_sup))
        throw Error(ErrorCode::InvalidArgument, "target_sup must be positive");
    const double s = sol.params.sigma;
    RescaledProfile out;
    out.lambda = target_sup / sol.q0();
    out.omega = std::pow(out.lambda, 2.0 * s);
    out.a_tilde = sol.a() * out.omega;
    const double stretch = std::pow(out.lambda, s);
    const auto q = sol.q();
    out.eta.resize(q.size());
    out.q.resize(q.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
        out.eta[k] = sol.grid()[k] / stretch;
        out.q[k] = out.lambda * q[k];
    }
    out.q.front() = cd(target_sup, 0.0) * (q.front() / std::abs(q.front()));
    return out;
}

}  // namespace blowup::profile
