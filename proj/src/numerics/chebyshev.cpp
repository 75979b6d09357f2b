#include "blowup/numerics/chebyshev.hpp"

#include <cmath>
#include <numbers>

#include "blowup/error.hpp"

namespace blowup::numerics {

namespace {

constexpr ext_real kPi = std::numbers::pi_v<ext_real>;

// Clenshaw-Curtis weights on [-1, 1] for the n Chebyshev-Lobatto points.
std::vector<ext_real> unit_cc_weights(std::size_t n) {
    const std::size_t N = n - 1;
    std::vector<ext_real> w(n, 0.0L);
    std::vector<ext_real> v(N - 1, 1.0L);
    const auto theta = [N](std::size_t k) { return kPi * static_cast<ext_real>(k) / static_cast<ext_real>(N); };
    const ext_real NN = static_cast<ext_real>(N) * static_cast<ext_real>(N);
    if (N % 2 == 0) {
        w[0] = w[N] = 1.0L / (NN - 1.0L);
        for (std::size_t k = 1; k < N / 2; ++k) {
            const ext_real kk = static_cast<ext_real>(k);
            for (std::size_t i = 1; i < N; ++i)
                v[i - 1] -= 2.0L * std::cos(2.0L * kk * theta(i)) / (4.0L * kk * kk - 1.0L);
        }
        for (std::size_t i = 1; i < N; ++i)
            v[i - 1] -= std::cos(static_cast<ext_real>(N) * theta(i)) / (NN - 1.0L);
    } else {
        w[0] = w[N] = 1.0L / NN;
        for (std::size_t k = 1; k <= (N - 1) / 2; ++k) {
            const ext_real kk = static_cast<ext_real>(k);
            for (std::size_t i = 1; i < N; ++i)
                v[i - 1] -= 2.0L * std::cos(2.0L * kk * theta(i)) / (4.0L * kk * kk - 1.0L);
        }
    }
    for (std::size_t i = 1; i < N; ++i) w[i] = 2.0L * v[i - 1] / static_cast<ext_real>(N);
    return w;
}

ext_real lobatto_node(std::size_t k, std::size_t n, ext_real length) {
    // (1 - cos t) / 2 == sin^2(t / 2), which keeps the nodes near 0 accurate.
    const ext_real half = kPi * static_cast<ext_real>(k) / (2.0L * static_cast<ext_real>(n - 1));
    const ext_real s = std::sin(half);
    return length * s * s;
}

std::vector<double> lobatto_nodes(std::size_t n, double length) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = static_cast<double>(lobatto_node(k, n, length));
    out.front() = 0.0;
    out.back() = length;
    return out;
}

template <class T>
T barycentric(std::span<const double> nodes, std::span<const T> values, double x) {
    const std::size_t n = nodes.size();
    T num{};
    double den = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double diff = x - nodes[k];
        if (diff == 0.0) return values[k];
        double w = (k % 2 == 0) ? 1.0 : -1.0;
        if (k == 0 || k == n - 1) w *= 0.5;
        const double c = w / diff;
        num += c * values[k];
        den += c;
    }
    return num / den;
}

}  // namespace

ChebyshevGrid build_grid(std::size_t n, double domain_length) {
    if (n < 8) throw Error(ErrorCode::InvalidArgument, "Chebyshev grid needs n >= 8");
    if (!(domain_length > 0.0) || !std::isfinite(domain_length))
        throw Error(ErrorCode::InvalidArgument, "domain length must be positive");
    ChebyshevGrid g;
    g.domain_length_ = domain_length;
    g.nodes_.resize(n);
    g.nodes_ext_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        g.nodes_ext_[k] = lobatto_node(k, n, domain_length);
        g.nodes_[k] = static_cast<double>(g.nodes_ext_[k]);
    }
    g.nodes_ext_.front() = 0.0L;
    g.nodes_ext_.back() = domain_length;
    g.nodes_.front() = 0.0;
    g.nodes_.back() = domain_length;
    return g;
}

DiffMatrices build_diff_matrices(const ChebyshevGrid& grid) {
    const std::size_t n = grid.size();
    const std::size_t N = n - 1;
    const auto c = [N](std::size_t i) { return (i == 0 || i == N) ? 2.0L : 1.0L; };

    // Differentiation in the reference variable x = cos(k pi / N), which
    // decreases with k; the map to xi contributes the factor -2 / length.
    MatrixXe dx(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const ext_real sum_angle = kPi * static_cast<ext_real>(i + j) / (2.0L * N);
            const ext_real diff_angle = kPi * (static_cast<ext_real>(j) - static_cast<ext_real>(i)) / (2.0L * N);
            const ext_real xdiff = 2.0L * std::sin(sum_angle) * std::sin(diff_angle);
            const ext_real sign = ((i + j) % 2 == 0) ? 1.0L : -1.0L;
            dx(i, j) = c(i) / c(j) * sign / xdiff;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        ext_real s = 0.0L;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) s += dx(i, j);
        dx(i, i) = -s;
    }

    DiffMatrices m;
    const ext_real scale = -2.0L / static_cast<ext_real>(grid.domain_length());
    m.d1 = scale * dx;
    m.d2 = m.d1 * m.d1;
    m.d1_f64 = m.d1.cast<double>();
    m.d2_f64 = m.d2.cast<double>();
    return m;
}

std::vector<ext_real> clenshaw_curtis_weights(const ChebyshevGrid& grid) {
    auto w = unit_cc_weights(grid.size());
    const ext_real half = static_cast<ext_real>(grid.domain_length()) / 2.0L;
    for (auto& x : w) x *= half;
    return w;
}

double chebyshev_interpolate(const ChebyshevGrid& grid, std::span<const double> values, double x) {
    return barycentric<double>(grid.nodes(), values, x);
}

std::complex<double> chebyshev_interpolate(const ChebyshevGrid& grid,
                                           std::span<const std::complex<double>> values, double x) {
    return barycentric<std::complex<double>>(grid.nodes(), values, x);
}

std::vector<double> chebyshev_resample(const ChebyshevGrid& grid, std::span<const double> values,
                                       std::span<const double> targets) {
    std::vector<double> out(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) out[i] = barycentric<double>(grid.nodes(), values, targets[i]);
    return out;
}

std::vector<std::complex<double>> chebyshev_resample(const ChebyshevGrid& grid,
                                                     std::span<const std::complex<double>> values,
                                                     std::span<const double> targets) {
    std::vector<std::complex<double>> out(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i)
        out[i] = barycentric<std::complex<double>>(grid.nodes(), values, targets[i]);
    return out;
}

double integrate_radial(std::span<const double> f, const ChebyshevGrid& grid, double d) {
    if (f.size() != grid.size()) throw Error(ErrorCode::InvalidArgument, "sample count does not match grid");
    const auto w = clenshaw_curtis_weights(grid);
    const auto xi = grid.nodes_ext();
    ext_real acc = 0.0L;
    for (std::size_t k = 0; k < f.size(); ++k) {
        const ext_real r = (d == 1.0) ? 1.0L : std::pow(xi[k], static_cast<ext_real>(d) - 1.0L);
        acc += w[k] * static_cast<ext_real>(f[k]) * r;
    }
    return static_cast<double>(acc);
}

double integrate_radial_to(std::span<const double> f, const ChebyshevGrid& grid, double d, double upper) {
    if (f.size() != grid.size()) throw Error(ErrorCode::InvalidArgument, "sample count does not match grid");
    if (upper < 0.0 || upper > grid.domain_length() * (1.0 + 1e-14))
        throw Error(ErrorCode::OutOfRange, "upper limit outside the grid domain");
    if (upper == 0.0) return 0.0;
    if (upper >= grid.domain_length()) return integrate_radial(f, grid, d);
    const auto sub = lobatto_nodes(grid.size(), upper);
    const auto fs = chebyshev_resample(grid, f, sub);
    const auto w = unit_cc_weights(grid.size());
    const ext_real half = static_cast<ext_real>(upper) / 2.0L;
    ext_real acc = 0.0L;
    for (std::size_t k = 0; k < sub.size(); ++k) {
        const ext_real r = (d == 1.0) ? 1.0L : std::pow(static_cast<ext_real>(sub[k]), static_cast<ext_real>(d) - 1.0L);
        acc += w[k] * half * static_cast<ext_real>(fs[k]) * r;
    }
    return static_cast<double>(acc);
}

}  // namespace blowup::numerics
