#include "blowup/numerics/rk45.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "blowup/error.hpp"

namespace blowup::numerics {

namespace {

// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

bool all_finite(const cvector& y) {
    return std::all_of(y.begin(), y.end(), [](const auto& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double sup_abs(const cvector& y) {
    double m = 0.0;
    for (const auto& z : y) m = std::max(m, std::abs(z));
    return m;
}

}  // namespace

cvector Trajectory::sample(double x) const {
    if (xs_.empty()) throw Error(ErrorCode::OutOfRange, "empty trajectory");
    const double tol = 1e-12 * std::max(1.0, std::abs(xs_.back()));
    if (x < xs_.front() - tol || x > xs_.back() + tol)
        throw Error(ErrorCode::OutOfRange, "sample point outside the integrated span");
    x = std::clamp(x, xs_.front(), xs_.back());
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t k = (it == xs_.begin()) ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
    if (k + 1 >= xs_.size()) return ys_.back();
    const double h = xs_[k + 1] - xs_[k];
    const double t = (x - xs_[k]) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    cvector out(ys_[k].size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = h00 * ys_[k][i] + h10 * h * fs_[k][i] + h01 * ys_[k + 1][i] + h11 * h * fs_[k + 1][i];
    return out;
}

std::vector<cvector> Trajectory::sample(std::span<const double> x) const {
    std::vector<cvector> out;
    out.reserve(x.size());
    for (double v : x) out.push_back(sample(v));
    return out;
}

Trajectory rk45_integrate(const OdeRhs& rhs, const cvector& y0, double x_start, double x_end,
                          const Rk45Settings& settings) {
    if (!(x_start < x_end)) throw Error(ErrorCode::InvalidArgument, "rk45 span must satisfy x_start < x_end");
    if (!(settings.rel_tol > 0.0) || !(settings.abs_tol > 0.0))
        throw Error(ErrorCode::InvalidArgument, "rk45 tolerances must be positive");
    if (!all_finite(y0)) throw Error(ErrorCode::NonFinite, "non-finite initial state");

    const std::size_t n = y0.size();
    const double span = x_end - x_start;
    const double h_min = settings.min_step * std::max(1.0, span);

    Trajectory traj;
    cvector y = y0;
    cvector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y_new(n);
    double x = x_start;
    rhs(x, y, k1);
    traj.xs_.push_back(x);
    traj.ys_.push_back(y);
    traj.fs_.push_back(k1);

    double h = settings.initial_step;
    if (!(h > 0.0)) {
        const double sy = std::max(sup_abs(y), settings.abs_tol);
        const double sf = std::max(sup_abs(k1), 1e-300);
        h = std::min(span, 0.01 * sy / sf);
        h = std::max(h, 1e-6 * span);
    }

    const auto stage = [&](double xs, std::initializer_list<std::pair<double, const cvector*>> terms, cvector& out) {
        for (std::size_t i = 0; i < n; ++i) {
            std::complex<double> s = y[i];
            for (const auto& [c, k] : terms) s += h * c * (*k)[i];
            tmp[i] = s;
        }
        rhs(xs, tmp, out);
    };

    std::size_t steps = 0;
    while (x < x_end) {
        if (++steps > settings.max_steps) throw Error(ErrorCode::StepUnderflow, "rk45 exceeded max_steps");
        bool last = false;
        if (x + h >= x_end) {
            h = x_end - x;
            last = true;
        }
        stage(x + c2 * h, {{a21, &k1}}, k2);
        stage(x + c3 * h, {{a31, &k1}, {a32, &k2}}, k3);
        stage(x + c4 * h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, k4);
        stage(x + c5 * h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, k5);
        stage(x + h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, k6);
        for (std::size_t i = 0; i < n; ++i)
            y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(x + h, y_new, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::complex<double> e =
                h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double scale = settings.abs_tol + settings.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            err = std::max(err, std::abs(e) / scale);
        }
        if (!std::isfinite(err)) err = 1e10;

        if (err <= 1.0) {
            x = last ? x_end : x + h;
            y = y_new;
            k1 = k7;
            if (!all_finite(y)) throw Error(ErrorCode::NonFinite, "rk45 produced a non-finite state");
            traj.xs_.push_back(x);
            traj.ys_.push_back(y);
            traj.fs_.push_back(k1);
            if (settings.amplitude_bound > 0.0 && sup_abs(y) > settings.amplitude_bound) {
                traj.stopped_on_amplitude_ = true;
                break;
            }
        }
        const double factor = (err == 0.0) ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h *= (err <= 1.0) ? factor : std::min(factor, 1.0);
        if (x < x_end && h < h_min)
            throw Error(ErrorCode::StepUnderflow, "rk45 step underflow at x = " + std::to_string(x));
    }
    return traj;
}

}  // namespace blowup::numerics
