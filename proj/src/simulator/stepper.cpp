#include <algorithm>
#include <cmath>

#include "blowup/numerics/spline.hpp"
#include "blowup/simulator/simulator.hpp"

namespace blowup::simulator {

namespace {

constexpr cd I{0.0, 1.0};

double mod_pow(double n2, double sigma) {
    if (sigma == 1.0) return n2;
    if (sigma == 2.0) return n2 * n2;
    if (sigma == 3.0) return n2 * n2 * n2;
    return std::pow(n2, sigma);
}

bool finite(const cd& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

Stepper::Stepper(const SimConfig& config)
    : cfg_((config.validate(), config)), stencil_(config.intervals(), config.h, config.params.d) {
    const std::size_t n = cfg_.intervals();
    const cd c = -0.5 * I * cfg_.dtau;
    implicit_ = numerics::BandedMatrix(n, RadialStencil::kBack, 3);
    boundary_column_.assign(n, cd{});
    for (std::size_t j = 0; j < n; ++j) {
        const auto& row = stencil_.laplacian_row(j);
        for (int k = 0; k < RadialStencil::kWidth; ++k) {
            const long long col = static_cast<long long>(j) - RadialStencil::kBack + k;
            if (col < 0 || row[k] == 0.0) continue;
            const auto uc = static_cast<std::size_t>(col);
            if (uc == n)
                boundary_column_[j] += c * row[k];
            else
                implicit_.at(j, uc) += c * row[k];
        }
        implicit_.at(j, j) += 1.0;
    }
    implicit_.factorize();
    xi_ = cfg_.nodes();
    for (auto* buf : {&lap_, &nl_m_, &nl_prev_, &nl_pred_, &base_, &rhs_, &pred_, &work_}) buf->assign(n + 1, cd{});
}

double Stepper::compute_a(std::span<const cd> v) const {
    return simulator::compute_a(v, stencil_, cfg_.params.sigma);
}

void Stepper::nonlinearity(std::span<const cd> v, double a, std::span<cd> out) const {
    stencil_.derivative(v, out);
    const double inv_s = 1.0 / cfg_.params.sigma;
    const double s = cfg_.params.sigma;
    for (std::size_t j = 0; j < v.size(); ++j) {
        const cd vj = v[j];
        out[j] = I * a * (xi_[j] * out[j] + vj * inv_s) + mod_pow(std::norm(vj), s) * vj;
    }
}

double Stepper::ratio_estimate(const RescaledState& s) const {
    return std::exp(0.5 * cfg_.dtau * (s.a_prev + s.a)) - 2.0 * cfg_.dtau * s.a;
}

cd Stepper::interpolate_tail(std::span<const cd> v, double ratio) const {
    const std::size_t n = cfg_.intervals();
    if (ratio == 1.0) return v[n];
    const double zeta = cfg_.domain_length * ratio;
    const auto cell = static_cast<long long>(std::floor(zeta / cfg_.h));
    const long long lo = std::max(0LL, std::min(static_cast<long long>(n) - 31, cell - 16));
    const std::span<const double> xs(xi_.data() + lo, n + 1 - static_cast<std::size_t>(lo));
    const numerics::CubicSpline spline(xs, v.subspan(static_cast<std::size_t>(lo)), numerics::SplineEnd::NotAKnot);
    return spline(std::min(zeta, xi_[n])) * std::pow(ratio, 1.0 / cfg_.params.sigma);
}

cd Stepper::ode_boundary(const RescaledState& s) const {
    const std::size_t n = cfg_.intervals();
    const double inv_s = 1.0 / cfg_.params.sigma, L = cfg_.domain_length;
    const cd g_m = s.v[n] * inv_s + L * stencil_.derivative_at(s.v, n);
    const cd g_p = s.v_prev[n] * inv_s + L * stencil_.derivative_at(s.v_prev, n);
    return s.v[n] - 0.5 * cfg_.dtau * (3.0 * s.a * g_m - s.a_prev * g_p);
}

cd Stepper::apply_boundary(const RescaledState& s) const {
    if (cfg_.bc_kind == BoundaryKind::AdamsBashforthOde) return ode_boundary(s);
    const double r = ratio_estimate(s);
    if (!(r > 0.0) || r > 1.0)
        throw Error(ErrorCode::ZetaOutOfRange,
                    "L ratio " + std::to_string(r) + " puts zeta outside [0, L_D] at step " +
                        std::to_string(s.step_index));
    return interpolate_tail(s.v, r);
}

void Stepper::solve_implicit(std::span<cd> rhs, cd boundary, std::span<cd> out) const {
    const std::size_t n = cfg_.intervals();
    for (std::size_t j = n >= 8 ? n - 8 : 0; j < n; ++j) rhs[j] -= boundary_column_[j] * boundary;
    implicit_.solve_in_place(rhs.first(n));
    std::copy(rhs.begin(), rhs.begin() + static_cast<std::ptrdiff_t>(n), out.begin());
    out[n] = boundary;
}

void Stepper::bootstrap_first_step(RescaledState& s) const {
    if (s.step_index != 0) throw Error(ErrorCode::InvalidArgument, "bootstrap requires step_index == 0");
    const std::size_t n = cfg_.intervals();
    const double dt = cfg_.dtau, inv_s = 1.0 / cfg_.params.sigma, L = cfg_.domain_length;
    const auto tail_rate = [&](std::span<const cd> v) { return v[n] * inv_s + L * stencil_.derivative_at(v, n); };
    const auto boundary = [&](double ratio, double a0, double a1, std::span<const cd> v1) -> cd {
        if (cfg_.bc_kind == BoundaryKind::ExactInterpolation && ratio > 0.0 && ratio <= 1.0)
            return interpolate_tail(s.v, ratio);
        if (cfg_.bc_kind == BoundaryKind::ExactInterpolation) ++fallbacks_;
        if (v1.empty()) return s.v[n] - dt * a0 * tail_rate(s.v);
        return s.v[n] - 0.5 * dt * (a0 * tail_rate(s.v) + a1 * tail_rate(v1));
    };

    stencil_.laplacian(s.v, lap_);
    nonlinearity(s.v, s.a, nl_m_);
    for (std::size_t j = 0; j < n; ++j) {
        base_[j] = I * (lap_[j] + nl_m_[j]);
        pred_[j] = s.v[j] + dt * base_[j];
    }
    pred_[n] = boundary(std::exp(-dt * s.a), s.a, 0.0, {});
    const double a_star = compute_a(pred_);

    stencil_.laplacian(pred_, lap_);
    nonlinearity(pred_, a_star, nl_pred_);
    for (std::size_t j = 0; j < n; ++j) work_[j] = s.v[j] + 0.5 * dt * (base_[j] + I * (lap_[j] + nl_pred_[j]));
    work_[n] = boundary(std::exp(-0.5 * dt * (s.a + a_star)), s.a, a_star, pred_);

    const double a_new = compute_a(work_);
    s.v_prev.swap(s.v);
    s.v.swap(work_);
    s.ln_L -= 0.5 * dt * (s.a + a_new);
    s.a_prev = s.a;
    s.a = a_new;
    s.tau += dt;
    s.step_index = 1;
}

void Stepper::step(RescaledState& s) const {
    if (s.step_index < 1) throw Error(ErrorCode::InvalidArgument, "step requires a bootstrapped state");
    const std::size_t n = cfg_.intervals();
    const double dt = cfg_.dtau;

    cd b;
    if (cfg_.bc_kind == BoundaryKind::ExactInterpolation && ratio_estimate(s) > 1.0) {
        ++fallbacks_;
        b = ode_boundary(s);
    } else {
        b = apply_boundary(s);
    }

    stencil_.laplacian(s.v, lap_);
    nonlinearity(s.v, s.a, nl_m_);
    nonlinearity(s.v_prev, s.a_prev, nl_prev_);
    for (std::size_t j = 0; j < n; ++j) {
        base_[j] = s.v[j] + 0.5 * I * dt * lap_[j];
        rhs_[j] = base_[j] + I * dt * (1.5 * nl_m_[j] - 0.5 * nl_prev_[j]);
    }
    solve_implicit(rhs_, b, pred_);

    const double a_pred = compute_a(pred_);
    nonlinearity(pred_, a_pred, nl_pred_);
    for (std::size_t j = 0; j < n; ++j) rhs_[j] = base_[j] + 0.5 * I * dt * (nl_pred_[j] + nl_m_[j]);
    solve_implicit(rhs_, b, work_);

    const double a_new = compute_a(work_);
    s.v_prev.swap(s.v);
    s.v.swap(work_);
    s.ln_L -= 0.5 * dt * (s.a + a_new);
    s.a_prev = s.a;
    s.a = a_new;
    s.tau += dt;
    ++s.step_index;
}

void Stepper::advance(RescaledState& s) const {
    if (s.v.size() != cfg_.intervals() + 1 || s.v_prev.size() != s.v.size())
        throw Error(ErrorCode::InvalidArgument, "state does not match the grid");
    if (s.step_index == 0)
        bootstrap_first_step(s);
    else
        step(s);
    bool ok = std::isfinite(s.a) && std::isfinite(s.ln_L);
    for (std::size_t j = 0; ok && j < s.v.size(); ++j) ok = finite(s.v[j]);
    if (!ok) throw Error(ErrorCode::Instability, "non-finite field at step " + std::to_string(s.step_index));
}

}  // namespace blowup::simulator
