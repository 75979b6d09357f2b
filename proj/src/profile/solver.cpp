#include "blowup/profile/solver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

namespace blowup::profile {

using cd = std::complex<double>;

std::vector<cd> ProfileSolution::q() const {
    std::vector<cd> out(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) out[k] = cd(static_cast<double>(p[k]), static_cast<double>(w[k]));
    return out;
}

std::vector<cd> ProfileSolution::q_xi() const {
    const Eigen::Index n = static_cast<Eigen::Index>(p.size());
    Eigen::Map<const numerics::VectorXe> P(p.data(), n), W(w.data(), n);
    const numerics::VectorXe Pd = disc->mats.d1 * P, Wd = disc->mats.d1 * W;
    std::vector<cd> out(p.size());
    for (Eigen::Index k = 0; k < n; ++k) out[k] = cd(static_cast<double>(Pd[k]), static_cast<double>(Wd[k]));
    return out;
}

std::vector<ext_real> ProfileSolution::packed() const {
    std::vector<ext_real> x;
    x.reserve(2 * p.size() + 1);
    x.insert(x.end(), p.begin(), p.end());
    x.insert(x.end(), w.begin(), w.end());
    x.push_back(a_ext);
    return x;
}

ProfileSolution ProfileSolution::unpack(const ProblemParams& params, std::shared_ptr<const Discretization> disc,
                                        const std::vector<ext_real>& x) {
    const std::size_t n = disc->grid.size();
    if (x.size() != 2 * n + 1) throw Error(ErrorCode::InvalidArgument, "packed profile has wrong length");
    ProfileSolution s;
    s.params = params;
    s.disc = std::move(disc);
    s.p.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
    s.w.assign(x.begin() + static_cast<std::ptrdiff_t>(n), x.begin() + static_cast<std::ptrdiff_t>(2 * n));
    s.a_ext = x.back();
    return s;
}

numerics::Trajectory shoot_profile_ivp(const ProblemParams& params, double a, double q0, double xi_end,
                                       const ShootingSettings& settings) {
    if (!std::isfinite(a) || !std::isfinite(q0)) throw Error(ErrorCode::NonFinite, "non-finite shooting estimates");
    if (!(settings.epsilon > 0.0) || !(xi_end > settings.epsilon))
        throw Error(ErrorCode::InvalidArgument, "shooting span must satisfy 0 < epsilon < xi_end");
    const double d = params.d, s = params.sigma;
    const cd i(0.0, 1.0);
    const auto rhs = [=](double xi, std::span<const cd> y, std::span<cd> f) {
        const cd Q = y[0], Qp = y[1];
        const double m = std::pow(std::norm(Q), s);
        f[0] = Qp;
        f[1] = -(d - 1.0) / xi * Qp - i * a * xi * Qp + (1.0 - i * a / s - m) * Q;
    };
    const double e = settings.epsilon;
    const cd c = (q0 - i * a * q0 / s - std::pow(std::abs(q0), 2.0 * s) * q0) / (2.0 * d);
    const numerics::cvector y0{q0 + c * e * e, 2.0 * c * e};
    return numerics::rk45_integrate(rhs, y0, e, xi_end,
                                    numerics::Rk45Settings{.rel_tol = settings.rel_tol,
                                                           .abs_tol = settings.abs_tol,
                                                           .amplitude_bound = settings.amplitude_bound});
}

std::vector<ext_real> initial_guess_by_shooting(const ProblemParams& params, double a_est, double q0_est,
                                                const numerics::ChebyshevGrid& grid,
                                                const ShootingSettings& settings) {
    if (!(a_est > 0.0)) throw Error(ErrorCode::InvalidArgument, "a estimate must be positive");
    if (!(q0_est >= 0.0)) throw Error(ErrorCode::InvalidArgument, "Q(0) estimate must be non-negative");
    numerics::Trajectory traj;
    try {
        traj = shoot_profile_ivp(params, a_est, q0_est, grid.domain_length(), settings);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::StepUnderflow || e.code() == ErrorCode::NonFinite)
            throw Error(ErrorCode::IvpDiverged, e.what());
        throw;
    }
    if (traj.stopped_on_amplitude())
        throw Error(ErrorCode::IvpDiverged, "shooting trajectory exceeded the amplitude bound near xi = " +
                                                std::to_string(traj.x_end()));
    const std::size_t n = grid.size();
    std::vector<ext_real> x(2 * n + 1);
    for (std::size_t k = 0; k < n; ++k) {
        const cd q = traj.sample(std::max(grid[k], settings.epsilon))[0];
        x[k] = q.real();
        x[n + k] = q.imag();
    }
    x[2 * n] = a_est;
    return x;
}

ProfileSolution solve_profile(const ProblemParams& params, std::shared_ptr<const Discretization> disc,
                              const std::vector<ext_real>& guess, const ProfileSettings& settings) {
    params.validate();
    const ProfileSystem sys(params, disc);
    if (guess.size() != sys.unknowns()) throw Error(ErrorCode::InvalidArgument, "guess has wrong length");
    for (const auto& v : guess)
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "non-finite profile guess");
    if (guess.back() == 0.0L) throw Error(ErrorCode::InvalidArgument, "guess for a must be nonzero");

    const auto res = numerics::newton_solve<ext_real>([&](const std::vector<ext_real>& x) { return sys.residual(x); },
                                                      [&](const std::vector<ext_real>& x) { return sys.jacobian(x); },
                                                      guess, settings.newton);
    ProfileSolution sol = ProfileSolution::unpack(params, disc, res.solution);
    sol.residual_norm = res.final_residual;
    sol.iterations = res.iterations;

    ext_real pmax = 0.0L;
    for (const auto& v : sol.p) pmax = std::max(pmax, std::abs(v));
    if (pmax < settings.trivial_tol)
        throw Error(ErrorCode::ConvergedToTrivial, "Newton converged to the zero solution");

    if (sol.p.front() < 0.0L) {
        for (auto& v : sol.p) v = -v;
        for (auto& v : sol.w) v = -v;
    }
    if (sol.a_ext < 0.0L) {
        for (auto& v : sol.w) v = -v;
        sol.a_ext = -sol.a_ext;
    }
    return sol;
}

ProfileSolution solve_profile(const ProblemParams& params, double a_est, double q0_est,
                              const ProfileSettings& settings) {
    params.validate();
    auto disc = make_discretization(settings.n, settings.domain_length);
    const auto guess = initial_guess_by_shooting(params, a_est, q0_est, disc->grid);
    return solve_profile(params, disc, guess, settings);
}

int count_local_maxima(const ProfileSolution& sol) {
    const auto q = sol.q();
    int count = 0;
    for (std::size_t k = 0; k < q.size(); ++k) {
        const double c = std::abs(q[k]);
        const bool left = (k == 0) || c > std::abs(q[k - 1]);
        const bool right = (k + 1 == q.size()) || c > std::abs(q[k + 1]);
        if (left && right && k + 1 < q.size()) ++count;
    }
    return count;
}

namespace {

// Parameter values are kept on a short decimal grid so that 3 + 7 * 0.1 is 3.7.
double tidy(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    double out = v;
    std::from_chars(buf, res.ptr, out);
    return out;
}

ContinuationEntry entry_of(const ProfileSolution& s) {
    return {s.params, s.a(), s.q0(), true, s.iterations, s.residual_norm};
}

std::vector<ext_real> extrapolate(const std::vector<std::pair<double, std::vector<ext_real>>>& hist, double t) {
    const std::size_t m = std::min<std::size_t>(3, hist.size());
    const std::size_t first = hist.size() - m;
    std::vector<ext_real> out(hist.back().second.size(), 0.0L);
    for (std::size_t j = first; j < hist.size(); ++j) {
        long double wj = 1.0L;
        for (std::size_t k = first; k < hist.size(); ++k)
            if (k != j)
                wj *= (static_cast<long double>(t) - hist[k].first) /
                      (static_cast<long double>(hist[j].first) - hist[k].first);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += wj * hist[j].second[i];
    }
    return out;
}

}  // namespace

ContinuationRecord continue_in_parameter(const ProfileSolution& start, const ProblemParams& target,
                                         const ContinuationSettings& settings) {
    if (!(settings.step > 0.0) || !(settings.min_step > 0.0))
        throw Error(ErrorCode::InvalidArgument, "continuation steps must be positive");
    target.validate();

    ContinuationRecord rec;
    rec.entries.push_back(entry_of(start));
    rec.step_history.push_back(0.0);
    rec.solutions.push_back(start);

    ProfileSolution current = start;
    for (int leg = 0; leg < 2; ++leg) {
        const auto value_of = [leg](const ProblemParams& p) { return leg == 0 ? p.d : p.sigma; };
        const auto with_value = [leg](ProblemParams p, double v) {
            (leg == 0 ? p.d : p.sigma) = v;
            return p;
        };
        const double goal = value_of(target);
        if (value_of(current.params) == goal) continue;
        const double dir = goal > value_of(current.params) ? 1.0 : -1.0;

        std::vector<std::pair<double, std::vector<ext_real>>> hist{{value_of(current.params), current.packed()}};
        double h = settings.step;
        double anchor = value_of(current.params);
        long long k = 0;
        while (value_of(current.params) != goal) {
            double next = tidy(anchor + dir * static_cast<double>(k + 1) * h);
            const double tol = 1e-9 * std::max(1.0, std::abs(goal));
            if (dir * (next - goal) > -tol) next = goal;
            const ProblemParams p = with_value(current.params, next);
            const auto guess = extrapolate(hist, next);

            ContinuationEntry attempt{p, 0.0, 0.0, false, 0, 0.0};
            try {
                ProfileSolution sol = solve_profile(p, current.disc, guess, settings.profile);
                if (!(sol.a() > 0.0) || !(sol.q0() > 0.0))
                    throw Error(ErrorCode::NoConvergence, "continuation produced a non-positive a or Q(0)");
                rec.entries.push_back(entry_of(sol));
                rec.step_history.push_back(h);
                rec.solutions.push_back(sol);
                hist.emplace_back(next, sol.packed());
                if (hist.size() > 3) hist.erase(hist.begin());
                current = std::move(sol);
                ++k;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NoConvergence && e.code() != ErrorCode::SingularJacobian &&
                    e.code() != ErrorCode::ConvergedToTrivial && e.code() != ErrorCode::NonFinite)
                    throw;
                rec.entries.push_back(attempt);
                rec.step_history.push_back(h);
                h *= 0.5;
                if (h < settings.min_step)
                    throw ContinuationStalled("step fell below " + std::to_string(settings.min_step) + " near " +
                                                  (leg == 0 ? "d = " : "sigma = ") + std::to_string(next),
                                              rec);
                anchor = value_of(current.params);
                k = 0;
            }
        }
    }
    return rec;
}

}  // namespace blowup::profile
