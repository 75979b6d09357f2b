#include <algorithm>
#include <charconv>
#include <cmath>

#include "blowup/numerics/spline.hpp"
#include "blowup/simulator/simulator.hpp"

namespace blowup::simulator {

std::string to_string(BoundaryKind kind) {
    return kind == BoundaryKind::ExactInterpolation ? "exact-interpolation" : "adams-bashforth-ode";
}

BoundaryKind parse_boundary_kind(const std::string& name) {
    if (name == "exact-interpolation") return BoundaryKind::ExactInterpolation;
    if (name == "adams-bashforth-ode") return BoundaryKind::AdamsBashforthOde;
    throw Error(ErrorCode::InvalidArgument, "unknown boundary kind '" + name + "'");
}

SimConfig SimConfig::defaults(const profile::ProblemParams& params) {
    SimConfig c;
    c.params = params;
    c.dtau = 1e-4 / std::pow(2.0, params.sigma - 2.0);
    c.domain_length = params.d < 4.0 ? 100.0 : 200.0;
    return c;
}

std::size_t SimConfig::intervals() const {
    return static_cast<std::size_t>(std::llround(domain_length / h));
}

std::vector<double> SimConfig::nodes() const {
    const std::size_t n = intervals();
    std::vector<double> xi(n + 1);
    for (std::size_t j = 0; j <= n; ++j) xi[j] = static_cast<double>(j) * h;
    return xi;
}

void SimConfig::validate() const {
    params.validate();
    const auto bad = [](const std::string& m) { throw Error(ErrorCode::InvalidArgument, m); };
    if (!(h > 0.0) || !std::isfinite(h)) bad("h must be positive");
    if (!(dtau > 0.0) || !std::isfinite(dtau)) bad("dtau must be positive");
    if (!(stop_L > 0.0)) bad("stop_L must be positive");
    if (!(tau_max > 0.0)) bad("tau_max must be positive");
    if (!(domain_length > 0.0) || !std::isfinite(domain_length)) bad("domain length must be positive");
    const double ratio = domain_length / h;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) bad("domain_length / h must be an integer");
    if (intervals() < 16) bad("grid needs at least 16 intervals");
    if (record_every < 1) bad("record_every must be at least 1");
    if (!(amplitude_tol > 0.0)) bad("amplitude_tol must be positive");
    if (not_blowing_up_steps < 1) bad("not_blowing_up_steps must be at least 1");
}

cd InitialData::operator()(double r) const {
    const double r2 = r * r;
    if (family == Family::Gaussian) return amplitude * std::exp(-r2);
    const double q = 1.0 + r2;
    return amplitude / (q * q * q * q);
}

std::string InitialData::to_string() const {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, amplitude);
    return std::string(family == Family::Gaussian ? "gaussian:" : "rational:") + std::string(buf, res.ptr);
}

InitialData InitialData::parse(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::InvalidArgument, "initial data must look like 'gaussian:5'");
    InitialData out;
    const std::string fam = spec.substr(0, colon);
    if (fam == "gaussian")
        out.family = Family::Gaussian;
    else if (fam == "rational")
        out.family = Family::Rational;
    else
        throw Error(ErrorCode::InvalidArgument, "unknown initial data family '" + fam + "'");
    const std::string amp = spec.substr(colon + 1);
    const auto res = std::from_chars(amp.data(), amp.data() + amp.size(), out.amplitude);
    if (res.ec != std::errc{} || res.ptr != amp.data() + amp.size() || !(out.amplitude > 0.0) ||
        !std::isfinite(out.amplitude))
        throw Error(ErrorCode::InvalidArgument, "initial data amplitude must be a positive number");
    return out;
}

std::optional<double> table_amplitude(const profile::ProblemParams& p, InitialData::Family family) {
    struct Row {
        double d, sigma, gaussian, rational;
    };
    static constexpr Row rows[] = {{3, 1, 5, 6}, {4, 1, 6, 8}, {5, 1, 6, 8}, {2, 2, 2, 2.5},
                                   {3, 2, 3, 3}, {4, 2, 3, 3}, {3, 3, 2.5, 2.5}};
    for (const auto& r : rows)
        if (r.d == p.d && r.sigma == p.sigma)
            return family == InitialData::Family::Gaussian ? r.gaussian : r.rational;
    return std::nullopt;
}

double compute_a(std::span<const cd> v, const RadialStencil& stencil, double sigma) {
    return -sigma * (std::conj(v[0]) * stencil.laplacian_at(v, 0)).imag();
}

RescaledState init_from_samples(std::vector<cd> v0, double ln_L0, const SimConfig& config) {
    config.validate();
    if (v0.size() != config.intervals() + 1)
        throw Error(ErrorCode::InvalidArgument, "initial samples do not match the grid");
    for (const auto& x : v0)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
            throw Error(ErrorCode::NonFinite, "non-finite initial sample");
    if (!std::isfinite(ln_L0)) throw Error(ErrorCode::NonFinite, "non-finite ln L0");
    const RadialStencil st(config.intervals(), config.h, config.params.d);
    RescaledState s;
    s.v = std::move(v0);
    s.v_prev = s.v;
    s.ln_L = ln_L0;
    s.a = compute_a(s.v, st, config.params.sigma);
    s.a_prev = s.a;
    return s;
}

RescaledState init_from_physical(const std::function<cd(double)>& u0, const SimConfig& config) {
    config.validate();
    const cd u00 = u0(0.0);
    const double peak = std::abs(u00);
    if (!std::isfinite(peak)) throw Error(ErrorCode::NonFinite, "non-finite u0(0)");
    if (!(peak > 0.0)) throw Error(ErrorCode::SupNotAtOrigin, "u0 vanishes at the origin");
    const double sigma = config.params.sigma;
    const double L0 = std::pow(peak, -sigma);
    const auto xi = config.nodes();
    std::vector<cd> v(xi.size());
    for (std::size_t j = 0; j < xi.size(); ++j) {
        const cd u = u0(xi[j] * L0);
        if (!std::isfinite(u.real()) || !std::isfinite(u.imag()))
            throw Error(ErrorCode::NonFinite, "non-finite initial sample");
        v[j] = u / peak;
        if (std::abs(v[j]) > 1.0 + 1e-12)
            throw Error(ErrorCode::SupNotAtOrigin, "|u0| exceeds |u0(0)| at r = " + std::to_string(xi[j] * L0));
    }
    return init_from_samples(std::move(v), -sigma * std::log(peak), config);
}

std::vector<double> sample_profile_modulus(const profile::RescaledProfile& q_tilde, std::span<const double> nodes) {
    if (q_tilde.eta.size() < 2) throw Error(ErrorCode::EmptyOverlap, "reference profile has no samples");
    std::vector<cd> mod(q_tilde.q.size());
    for (std::size_t k = 0; k < mod.size(); ++k) mod[k] = std::abs(q_tilde.q[k]);
    const numerics::CubicSpline spline(q_tilde.eta, mod);
    std::vector<double> out;
    for (double x : nodes) {
        if (x < q_tilde.eta.front() || x > q_tilde.eta.back()) break;
        out.push_back(spline(x).real());
    }
    if (out.empty()) throw Error(ErrorCode::EmptyOverlap, "profile and simulator grids do not overlap");
    return out;
}

double profile_distance(std::span<const cd> v, std::span<const double> q_abs) {
    if (q_abs.empty() || v.empty()) throw Error(ErrorCode::EmptyOverlap, "empty overlap for profile distance");
    const std::size_t m = std::min(v.size(), q_abs.size());
    double worst = 0.0;
    for (std::size_t j = 0; j < m; ++j) worst = std::max(worst, std::abs(std::abs(v[j]) - q_abs[j]));
    return worst;
}

}  // namespace blowup::simulator
