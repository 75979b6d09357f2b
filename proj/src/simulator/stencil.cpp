#include "blowup/simulator/stencil.hpp"

#include <cmath>

#include "blowup/error.hpp"

namespace blowup::simulator {

namespace {

constexpr std::array<double, 7> kD1{-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0};
constexpr std::array<double, 7> kD2{2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0};
constexpr std::array<double, 8> kExtrap{8.0, -28.0, 56.0, -70.0, 56.0, -28.0, 8.0, -1.0};

}  // namespace

RadialStencil::RadialStencil(std::size_t intervals, double h, double d) : n_(intervals), h_(h), d_(d) {
    if (intervals < 16) throw Error(ErrorCode::InvalidArgument, "radial grid needs at least 16 intervals");
    if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::InvalidArgument, "grid spacing must be positive");
    if (!(d >= 1.0)) throw Error(ErrorCode::InvalidArgument, "dimension must be at least 1");

    // ghost N+g expressed over columns N-7..N (index 0..7)
    for (int g = 1; g <= 3; ++g) {
        auto& out = ghost_[g - 1];
        out.fill(0.0);
        for (int t = 1; t <= 8; ++t) {
            const int m = g - t;  // offset from N of the referenced point
            if (m > 0) {
                for (int c = 0; c < 8; ++c) out[c] += kExtrap[t - 1] * ghost_[m - 1][c];
            } else {
                out[7 + m] += kExtrap[t - 1];
            }
        }
    }

    const long long N = static_cast<long long>(n_);
    const auto build = [&](std::size_t j, const std::array<double, 7>& st, double scale, Row& row) {
        const long long base = static_cast<long long>(j) - kBack;
        for (int k = -3; k <= 3; ++k) {
            const double coef = st[k + 3] * scale;
            long long col = static_cast<long long>(j) + k;
            if (col < 0) col = -col;
            if (col <= N) {
                row[col - base] += coef;
            } else {
                const auto& gh = ghost_[col - N - 1];
                for (int c = 0; c < 8; ++c) row[N - 7 + c - base] += coef * gh[c];
            }
        }
    };

    lap_.assign(n_ + 1, Row{});
    d1_.assign(n_ + 1, Row{});
    const double s1 = 1.0 / (60.0 * h);
    const double s2 = 1.0 / (180.0 * h * h);
    for (std::size_t j = 0; j <= n_; ++j) {
        build(j, kD1, s1, d1_[j]);
        if (j == 0) {
            build(j, kD2, d * s2, lap_[j]);
        } else {
            build(j, kD2, s2, lap_[j]);
            build(j, kD1, (d - 1.0) / (static_cast<double>(j) * h) * s1, lap_[j]);
        }
    }
}

std::complex<double> RadialStencil::apply_row(const Row& row, std::span<const std::complex<double>> v,
                                              std::size_t j) const {
    const std::size_t lo = j >= static_cast<std::size_t>(kBack) ? 0 : kBack - j;
    const std::size_t hi = std::min<std::size_t>(kWidth - 1, n_ + kBack - j);
    const std::size_t base = j + lo - kBack;
    double re = 0.0, im = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) {
        const auto& x = v[base + k - lo];
        re += row[k] * x.real();
        im += row[k] * x.imag();
    }
    return {re, im};
}

std::complex<double> RadialStencil::laplacian_at(std::span<const std::complex<double>> v, std::size_t j) const {
    return apply_row(lap_[j], v, j);
}

std::complex<double> RadialStencil::derivative_at(std::span<const std::complex<double>> v, std::size_t j) const {
    return apply_row(d1_[j], v, j);
}

void RadialStencil::laplacian(std::span<const std::complex<double>> v, std::span<std::complex<double>> out) const {
    const double s2 = 1.0 / (180.0 * h_ * h_);
    const double s1 = 1.0 / (60.0 * h_);
    for (std::size_t j = 0; j <= n_; ++j) {
        if (j < 3 || j + 3 > n_) {
            out[j] = apply_row(lap_[j], v, j);
            continue;
        }
        const double c = (d_ - 1.0) / (static_cast<double>(j) * h_) * s1;
        const std::complex<double> a1 = v[j + 1] - v[j - 1], a2 = v[j + 2] - v[j - 2], a3 = v[j + 3] - v[j - 3];
        const std::complex<double> b1 = v[j + 1] + v[j - 1], b2 = v[j + 2] + v[j - 2], b3 = v[j + 3] + v[j - 3];
        out[j] = s2 * (2.0 * b3 - 27.0 * b2 + 270.0 * b1 - 490.0 * v[j]) + c * (a3 - 9.0 * a2 + 45.0 * a1);
    }
}

void RadialStencil::derivative(std::span<const std::complex<double>> v, std::span<std::complex<double>> out) const {
    const double s1 = 1.0 / (60.0 * h_);
    for (std::size_t j = 0; j <= n_; ++j) {
        if (j < 3 || j + 3 > n_) {
            out[j] = apply_row(d1_[j], v, j);
            continue;
        }
        out[j] = s1 * ((v[j + 3] - v[j - 3]) - 9.0 * (v[j + 2] - v[j - 2]) + 45.0 * (v[j + 1] - v[j - 1]));
    }
}

}  // namespace blowup::simulator
