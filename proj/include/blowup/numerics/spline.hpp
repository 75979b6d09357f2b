#pragma once

#include <complex>
#include <span>
#include <vector>

namespace blowup::numerics {

/// End condition: natural (zero second derivative) or not-a-knot (continuous
/// third derivative at the second and penultimate knots, exact for cubics).
/// Not-a-knot needs 4 knots and falls back to natural below that.
enum class SplineEnd { Natural, NotAKnot };

/// Cubic spline through complex samples at strictly increasing knots.
class CubicSpline {
public:
    /// Throws InvalidArgument for fewer than 2 knots, size mismatch, or
    /// non-increasing knots.
    CubicSpline(std::span<const double> xs, std::span<const std::complex<double>> ys,
                SplineEnd end = SplineEnd::Natural);

    /// Throws OutOfRange outside [xs.front(), xs.back()].
    std::complex<double> operator()(double x) const;

    double x_begin() const noexcept { return xs_.front(); }
    double x_end() const noexcept { return xs_.back(); }

private:
    std::vector<double> xs_;
    std::vector<std::complex<double>> ys_;
    std::vector<std::complex<double>> m_;  // second derivatives at knots
};

/// One-shot natural spline evaluation.
std::complex<double> cubic_spline_eval(std::span<const double> xs, std::span<const std::complex<double>> ys,
                                       double query);

}  // namespace blowup::numerics
