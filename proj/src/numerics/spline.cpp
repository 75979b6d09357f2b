#include "blowup/numerics/spline.hpp"

#include <algorithm>
#include <cmath>

#include "blowup/error.hpp"

namespace blowup::numerics {

CubicSpline::CubicSpline(std::span<const double> xs, std::span<const std::complex<double>> ys, SplineEnd end)
    : xs_(xs.begin(), xs.end()), ys_(ys.begin(), ys.end()), m_(xs.size()) {
    const std::size_t n = xs_.size();
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "spline needs at least two knots");
    if (ys_.size() != n) throw Error(ErrorCode::InvalidArgument, "spline knot and value counts differ");
    for (std::size_t i = 1; i < n; ++i)
        if (!(xs_[i] > xs_[i - 1])) throw Error(ErrorCode::InvalidArgument, "spline knots must be strictly increasing");
    if (n == 2) return;

    // Tridiagonal system for interior second derivatives (Thomas algorithm).
    const std::size_t k = n - 2;
    std::vector<double> diag(k), upper(k), lower(k);
    std::vector<std::complex<double>> rhs(k);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = xs_[i] - xs_[i - 1];
        const double h1 = xs_[i + 1] - xs_[i];
        lower[i - 1] = h0;
        diag[i - 1] = 2.0 * (h0 + h1);
        upper[i - 1] = h1;
        rhs[i - 1] = 6.0 * ((ys_[i + 1] - ys_[i]) / h1 - (ys_[i] - ys_[i - 1]) / h0);
    }
    const bool not_a_knot = end == SplineEnd::NotAKnot && n >= 4;
    if (not_a_knot) {
        // m_0 and m_{n-1} eliminated through continuity of the third derivative at x_1 and x_{n-2}
        const double a0 = xs_[1] - xs_[0], a1 = xs_[2] - xs_[1];
        diag[0] = (a0 + a1) * (2.0 + a0 / a1);
        upper[0] = a1 - a0 * a0 / a1;
        const double b0 = xs_[n - 2] - xs_[n - 3], b1 = xs_[n - 1] - xs_[n - 2];
        diag[k - 1] = (b0 + b1) * (2.0 + b1 / b0);
        lower[k - 1] = b0 - b1 * b1 / b0;
    }
    for (std::size_t i = 1; i < k; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    m_[k] = rhs[k - 1] / diag[k - 1];
    for (std::size_t i = k - 1; i-- > 0;) m_[i + 1] = (rhs[i] - upper[i] * m_[i + 2]) / diag[i];
    if (not_a_knot) {
        const double a0 = xs_[1] - xs_[0], a1 = xs_[2] - xs_[1];
        m_[0] = ((a0 + a1) * m_[1] - a0 * m_[2]) / a1;
        const double b0 = xs_[n - 2] - xs_[n - 3], b1 = xs_[n - 1] - xs_[n - 2];
        m_[n - 1] = ((b0 + b1) * m_[n - 2] - b1 * m_[n - 3]) / b0;
    }
}

std::complex<double> CubicSpline::operator()(double x) const {
    if (!(x >= xs_.front() && x <= xs_.back())) throw Error(ErrorCode::OutOfRange, "spline query outside knot range");
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t i = (it == xs_.end()) ? xs_.size() - 2 : static_cast<std::size_t>(it - xs_.begin()) - 1;
    if (x == xs_[i]) return ys_[i];
    if (x == xs_[i + 1]) return ys_[i + 1];
    const double h = xs_[i + 1] - xs_[i];
    const double A = (xs_[i + 1] - x) / h;
    const double B = (x - xs_[i]) / h;
    return A * ys_[i] + B * ys_[i + 1] +
           ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * (h * h / 6.0);
}

std::complex<double> cubic_spline_eval(std::span<const double> xs, std::span<const std::complex<double>> ys,
                                       double query) {
    return CubicSpline(xs, ys)(query);
}

}  // namespace blowup::numerics
