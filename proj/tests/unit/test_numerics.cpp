#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "blowup/error.hpp"
#include "blowup/numerics/banded.hpp"
#include "blowup/numerics/chebyshev.hpp"
#include "blowup/numerics/newton.hpp"
#include "blowup/numerics/rk45.hpp"
#include "blowup/numerics/spline.hpp"

using namespace blowup;
using namespace blowup::numerics;
using cd = std::complex<double>;

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 50) {
    const auto simpson = [&](double l, double r) { return (r - l) / 6.0 * (f(l) + 4.0 * f(0.5 * (l + r)) + f(r)); };
    const std::function<double(double, double, double, double, int)> rec = [&](double l, double r, double whole,
                                                                               double eps, int lvl) {
        const double m = 0.5 * (l + r);
        const double left = simpson(l, m), right = simpson(m, r);
        if (lvl <= 0 || std::abs(left + right - whole) <= 15.0 * eps) return left + right + (left + right - whole) / 15.0;
        return rec(l, m, left, eps / 2.0, lvl - 1) + rec(m, r, right, eps / 2.0, lvl - 1);
    };
    return rec(a, b, simpson(a, b), tol, depth);
}

std::vector<double> matvec(const Eigen::MatrixXd& m, const std::vector<double>& x) {
    Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
    Eigen::VectorXd y = m * v;
    return {y.data(), y.data() + y.size()};
}

}  // namespace

TEST_CASE("grid: three nodes on [0, 2]") {
    const auto g = build_grid(8, 2.0);  // n = 3 is below the minimum; check the mapping on n = 8 instead
    CHECK(g.nodes().front() == 0.0);
    CHECK(g.nodes().back() == 2.0);
    CHECK_THROWS_AS(build_grid(3, 2.0), Error);
    CHECK_THROWS_AS(build_grid(9, 0.0), Error);
    CHECK_THROWS_AS(build_grid(9, -1.0), Error);
}

TEST_CASE("grid: node formula and ordering") {
    const auto g = build_grid(257, 200.0);
    REQUIRE(g.size() == 257);
    CHECK(g[256] == 200.0);
    CHECK(g[0] == 0.0);
    for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] > g[k - 1]);
    const auto g9 = build_grid(9, 1.0);
    CHECK(g9[1] == doctest::Approx(0.5 * (1.0 - std::cos(std::numbers::pi / 8.0))).epsilon(1e-15));
    CHECK(g9[1] == doctest::Approx(0.0380602337443566).epsilon(1e-13));
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(std::abs(g[k] - 100.0 * (1.0 - std::cos(k * std::numbers::pi / 256.0))) <= 1e-12 * 200.0);
}

TEST_CASE("diff matrices: constants, linears, sine") {
    const auto g = build_grid(65, 10.0);
    const auto m = build_diff_matrices(g);
    const std::vector<double> ones(g.size(), 1.0);
    const auto z = matvec(m.d1_f64, ones);
    const double nrm = m.d1_f64.cwiseAbs().rowwise().sum().maxCoeff();
    for (double v : z) CHECK(std::abs(v) <= 1e-10 * nrm);
    const std::vector<double> x(g.nodes().begin(), g.nodes().end());
    for (double v : matvec(m.d1_f64, x)) CHECK(std::abs(v - 1.0) <= 1e-10);
    std::vector<double> s(g.size());
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = std::sin(x[k]);
    const auto ds = matvec(m.d1_f64, s);
    for (std::size_t k = 0; k < s.size(); ++k) CHECK(std::abs(ds[k] - std::cos(x[k])) <= 1e-8);
    const auto dds = matvec(m.d2_f64, s);
    for (std::size_t k = 0; k < s.size(); ++k) CHECK(std::abs(dds[k] + std::sin(x[k])) <= 1e-6);
}

TEST_CASE("diff matrices: monomial exactness up to degree 10") {
    const double K = 10.0;
    const auto g = build_grid(65, K);
    const auto m = build_diff_matrices(g);
    for (int k = 0; k <= 10; ++k) {
        VectorXe f(g.size()), df(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            const ext_real xi = g.nodes_ext()[i];
            f[i] = std::pow(xi, static_cast<ext_real>(k));
            df[i] = k == 0 ? 0.0L : k * std::pow(xi, static_cast<ext_real>(k - 1));
        }
        const VectorXe err = m.d1 * f - df;
        CHECK(static_cast<double>(err.cwiseAbs().maxCoeff()) <= 1e-8 * std::max(1.0, std::pow(K, k)));
    }
}

TEST_CASE("diff matrices: d2 equals d1 squared") {
    const auto g = build_grid(33, 7.0);
    const auto m = build_diff_matrices(g);
    const MatrixXe diff = (m.d2 - m.d1 * m.d1) * static_cast<ext_real>(49.0);
    CHECK(static_cast<double>(diff.cwiseAbs().maxCoeff()) <= 1e-8);
}

TEST_CASE("quadrature: examples") {
    const auto g2 = build_grid(33, 2.0);
    std::vector<double> one(33, 1.0);
    CHECK(integrate_radial(one, g2, 1) == doctest::Approx(2.0).epsilon(1e-10));
    const auto g1 = build_grid(33, 1.0);
    CHECK(std::abs(integrate_radial(one, g1, 3) - 1.0 / 3.0) <= 1e-10);

    const auto g = build_grid(257, 20.0);
    std::vector<double> f(g.size());
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::exp(-g[k]);
    const double oracle = adaptive_simpson([](double x) { return std::exp(-x) * x; }, 0.0, 20.0, 1e-14);
    CHECK(std::abs(integrate_radial(f, g, 2) - oracle) <= 1e-10);
    CHECK(std::abs(oracle - (1.0 - 21.0 * std::exp(-20.0))) <= 1e-12);
}

TEST_CASE("quadrature: resolution halving changes smooth integrals by < 1e-8") {
    const auto fine = build_grid(257, 30.0);
    const auto coarse = build_grid(129, 30.0);
    const auto eval = [](const ChebyshevGrid& g) {
        std::vector<double> f(g.size());
        for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::exp(-0.1 * g[k] * g[k]) * std::cos(g[k]);
        return integrate_radial(f, g, 3);
    };
    CHECK(std::abs(eval(fine) - eval(coarse)) < 1e-8);
}

TEST_CASE("quadrature: partial integral matches closed form") {
    const auto g = build_grid(129, 10.0);
    std::vector<double> f(g.size());
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::exp(-g[k]);
    const double upper = 3.7;
    const double exact = 1.0 - (1.0 + upper) * std::exp(-upper);
    CHECK(std::abs(integrate_radial_to(f, g, 2, upper) - exact) <= 1e-12);
    CHECK(integrate_radial_to(f, g, 2, 0.0) == 0.0);
    CHECK_THROWS_AS(integrate_radial_to(f, g, 2, 11.0), Error);
}

TEST_CASE("interpolation: barycentric reproduces smooth functions") {
    const auto g = build_grid(65, 5.0);
    std::vector<double> f(g.size());
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::sin(g[k]);
    for (double x : {0.0, 0.3, 1.234, 4.999, 5.0}) CHECK(std::abs(chebyshev_interpolate(g, f, x) - std::sin(x)) < 1e-12);
    CHECK(chebyshev_interpolate(g, f, g[7]) == f[7]);
}

TEST_CASE("newton: scalar, linear and circle-line examples") {
    using V = std::vector<double>;
    {
        const auto r = newton_solve<double>([](const V& x) { return V{x[0] * x[0] - 4.0}; },
                                            [](const V& x) { return Eigen::MatrixXd::Constant(1, 1, 2.0 * x[0]); },
                                            V{3.0});
        CHECK(r.solution[0] == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(r.final_residual <= 1e-15);
    }
    {
        Eigen::MatrixXd A(3, 3);
        A << 4, 1, 0, 1, 3, 1, 0, 1, 2;
        const Eigen::Vector3d b(1, 2, 3);
        const auto r = newton_solve<double>(
            [&](const V& x) {
                const Eigen::Vector3d y = A * Eigen::Map<const Eigen::Vector3d>(x.data()) - b;
                return V{y[0], y[1], y[2]};
            },
            [&](const V&) { return A; }, V{0.0, 0.0, 0.0}, NewtonSettings{.residual_tol = 1e-14});
        CHECK(r.iterations == 1);
    }
    {
        const auto r = newton_solve<double>(
            [](const V& x) { return V{x[0] * x[0] + x[1] * x[1] - 1.0, x[0] - x[1]}; },
            [](const V& x) {
                Eigen::MatrixXd J(2, 2);
                J << 2 * x[0], 2 * x[1], 1, -1;
                return J;
            },
            V{1.0, 0.5});
        CHECK(std::abs(r.solution[0] - std::sqrt(0.5)) <= 1e-15);
        CHECK(std::abs(r.solution[1] - std::sqrt(0.5)) <= 1e-15);
        const auto& h = r.residual_history;
        int checked = 0;
        for (std::size_t j = 0; j + 1 < h.size(); ++j) {
            if (h[j] < 1e-3 && h[j + 1] > 1e-15) {
                CHECK(h[j + 1] <= 10.0 * h[j] * h[j]);
                ++checked;
            }
        }
        CHECK(checked >= 1);
    }
}

TEST_CASE("newton: error reporting") {
    using V = std::vector<double>;
    const auto res = [](const V& x) { return V{x[0] * x[0] + 1.0}; };
    const auto jac = [](const V& x) { return Eigen::MatrixXd::Constant(1, 1, 2.0 * x[0]); };
    CHECK_THROWS_AS(newton_solve<double>(res, jac, V{0.0}), Error);
    try {
        newton_solve<double>(res, jac, V{0.0});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingularJacobian);
    }
    try {
        newton_solve<double>([](const V& x) { return V{std::exp(x[0])}; },
                             [](const V& x) { return Eigen::MatrixXd::Constant(1, 1, std::exp(x[0])); }, V{1.0},
                             NewtonSettings{.max_iterations = 5});
        FAIL("expected no-convergence");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoConvergence);
    }
    CHECK_THROWS_AS(newton_solve<double>(res, jac, V{NAN}), Error);
    CHECK_THROWS_AS(NewtonSettings{.max_iterations = 0}.validate(), Error);
    CHECK_THROWS_AS(NewtonSettings{.residual_tol = 0.0}.validate(), Error);
}

TEST_CASE("newton: extended precision iterate") {
    using V = std::vector<long double>;
    const auto r = newton_solve<long double>([](const V& x) { return V{x[0] * x[0] - 2.0L}; },
                                             [](const V& x) {
                                                 return Eigen::MatrixXd::Constant(1, 1, 2.0 * static_cast<double>(x[0]));
                                             },
                                             V{1.0L}, NewtonSettings{.residual_tol = 1e-17});
    CHECK(std::abs(static_cast<double>(r.solution[0] - std::sqrt(2.0L))) < 1e-17);
}

TEST_CASE("banded: matches dense product and solve") {
    const std::size_t n = 40;
    BandedMatrix A(n, 7, 3);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (A.in_band(i, j)) {
                const cd v = (i == j) ? cd(12.0, 1.0) : cd(u(rng), u(rng));
                A.at(i, j) = v;
                dense(i, j) = v;
            }
    CHECK(A(0, 10) == cd{});
    CHECK_THROWS_AS(A.at(0, 10), Error);
    std::vector<cd> x(n);
    for (auto& v : x) v = cd(u(rng), u(rng));
    const auto y = A.multiply(x);
    const Eigen::VectorXcd yd = dense * Eigen::Map<Eigen::VectorXcd>(x.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y[i] - yd[i]) < 1e-13);
    auto b = y;
    A.factorize();
    A.solve_in_place(b);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(b[i] - x[i]) < 1e-12);
}

TEST_CASE("banded: singular pivot is reported") {
    BandedMatrix A(3, 1, 1);
    A.at(0, 0) = 1.0;
    A.at(0, 1) = 1.0;
    A.at(1, 0) = 1.0;
    A.at(1, 1) = 1.0;
    A.at(2, 2) = 1.0;
    try {
        A.factorize();
        FAIL("expected singular pivot");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingularPivot);
    }
}

TEST_CASE("rk45: constant and exponential") {
    const auto zero = [](double, std::span<const cd>, std::span<cd> f) { f[0] = 0.0; };
    const auto t0 = rk45_integrate(zero, {cd(2.0, -1.0)}, 0.0, 5.0);
    for (double x : {0.0, 1.3, 5.0}) CHECK(t0.sample(x)[0] == cd(2.0, -1.0));

    const double rtol = 1e-9;
    const auto expo = [](double, std::span<const cd> y, std::span<cd> f) { f[0] = y[0]; };
    const auto t1 = rk45_integrate(expo, {cd(1.0)}, 0.0, 1.0, Rk45Settings{.rel_tol = rtol, .abs_tol = 1e-14});
    CHECK(std::abs(t1.sample(1.0)[0] - std::exp(1.0)) <= 10.0 * rtol * std::exp(1.0));
    CHECK(std::abs(t1.sample(0.37)[0] - std::exp(0.37)) <= 1e-7);
    CHECK_THROWS_AS(t1.sample(1.5), Error);
    CHECK_THROWS_AS(rk45_integrate(expo, {cd(1.0)}, 1.0, 0.0), Error);
}

TEST_CASE("rk45: finite-time blow-up triggers step underflow") {
    const auto rhs = [](double, std::span<const cd> y, std::span<cd> f) { f[0] = y[0] * y[0]; };
    try {
        rk45_integrate(rhs, {cd(1.0)}, 0.0, 2.0);
        FAIL("expected step underflow");
    } catch (const Error& e) {
        CHECK((e.code() == ErrorCode::StepUnderflow || e.code() == ErrorCode::NonFinite));
    }
    const auto t = rk45_integrate(rhs, {cd(1.0)}, 0.0, 2.0, Rk45Settings{.amplitude_bound = 1e3});
    CHECK(t.stopped_on_amplitude());
    CHECK(t.x_end() < 1.0);
}

TEST_CASE("spline: knots, linears, cubic refinement") {
    std::vector<double> xs;
    std::vector<cd> ys;
    for (int i = 0; i <= 10; ++i) {
        xs.push_back(0.1 * i);
        ys.push_back(cd(2.0 * xs.back(), -xs.back()));
    }
    const CubicSpline s(xs, ys);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(s(xs[i]) == ys[i]);
    for (double q : {0.05, 0.35, 0.99}) CHECK(std::abs(s(q) - cd(2.0 * q, -q)) <= 1e-12);
    CHECK_THROWS_AS(s(1.01), Error);
    CHECK_THROWS_AS(s(-0.01), Error);

    const auto cubic_err = [](int m) {
        std::vector<double> x;
        std::vector<cd> y;
        for (int i = 0; i <= m; ++i) {
            x.push_back(static_cast<double>(i) / m);
            y.push_back(std::pow(x.back(), 3));
        }
        return std::abs(cubic_spline_eval(x, y, 0.337) - std::pow(0.337, 3));
    };
    const double e10 = cubic_err(10), e20 = cubic_err(20), e40 = cubic_err(40);
    // natural end conditions: the error decays as the end-effect boundary layer narrows
    CHECK(e10 < 1e-2);
    CHECK(e20 < e10);
    CHECK(e40 < e20);
    CHECK(e40 < 1e-5);
}
