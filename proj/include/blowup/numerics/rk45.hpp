#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace blowup::numerics {

using cvector = std::vector<std::complex<double>>;

/// Right-hand side y' = f(x, y). Writes f into `dydx` (already sized).
using OdeRhs = std::function<void(double x, std::span<const std::complex<double>> y,
                                  std::span<std::complex<double>> dydx)>;

struct Rk45Settings {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 0.0;  // 0 picks a step from the rhs scale
    double min_step = 1e-14;    // relative to the span length
    std::size_t max_steps = 2'000'000;
    /// Stop early (without error) once any |y_i| exceeds this bound. 0 disables.
    double amplitude_bound = 0.0;
};

/// Accepted steps of a Dormand-Prince 5(4) integration. Between accepted steps
/// the solution is evaluated by cubic Hermite interpolation using the stored
/// derivatives.
class Trajectory {
public:
    std::span<const double> xs() const noexcept { return xs_; }
    const cvector& state(std::size_t k) const { return ys_[k]; }
    std::size_t size() const noexcept { return xs_.size(); }
    std::size_t dimension() const noexcept { return ys_.empty() ? 0 : ys_.front().size(); }
    double x_begin() const { return xs_.front(); }
    double x_end() const { return xs_.back(); }
    /// True when integration stopped because amplitude_bound was exceeded.
    bool stopped_on_amplitude() const noexcept { return stopped_on_amplitude_; }

    /// Throws OutOfRange if x lies outside [x_begin, x_end].
    cvector sample(double x) const;
    std::vector<cvector> sample(std::span<const double> x) const;

    friend Trajectory rk45_integrate(const OdeRhs&, const cvector&, double, double, const Rk45Settings&);

private:
    std::vector<double> xs_;
    std::vector<cvector> ys_;
    std::vector<cvector> fs_;
    bool stopped_on_amplitude_ = false;
};

/// Integrates from x_start to x_end (x_start < x_end). Throws StepUnderflow when
/// the controller needs a step below min_step, NonFinite on NaN/Inf states.
Trajectory rk45_integrate(const OdeRhs& rhs, const cvector& y0, double x_start, double x_end,
                          const Rk45Settings& settings = {});

}  // namespace blowup::numerics
