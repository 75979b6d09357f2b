#include "blowup/profile/system.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "blowup/error.hpp"

namespace blowup::profile {

void ProblemParams::validate() const {
    if (!std::isfinite(d) || !(d >= 2.0)) throw Error(ErrorCode::InvalidArgument, "dimension d must be >= 2");
    if (!std::isfinite(sigma) || !(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
    if (!(s_c() > 0.0))
        throw Error(ErrorCode::InvalidArgument, "s_c = d/2 - 1/sigma must be positive (mass-supercritical)");
}

std::shared_ptr<const Discretization> make_discretization(std::size_t n, double domain_length) {
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, double>, std::weak_ptr<const Discretization>> cache;
    const std::lock_guard lock(mutex);
    auto& slot = cache[{n, domain_length}];
    if (auto hit = slot.lock()) return hit;
    auto disc = std::make_shared<Discretization>();
    disc->grid = numerics::build_grid(n, domain_length);
    disc->mats = numerics::build_diff_matrices(disc->grid);
    slot = disc;
    return disc;
}

ProfileSystem::ProfileSystem(ProblemParams params, std::shared_ptr<const Discretization> disc)
    : params_(params), disc_(std::move(disc)), n_(disc_ ? disc_->grid.size() : 0) {
    if (!disc_) throw Error(ErrorCode::InvalidArgument, "missing discretization");
    if (!(params_.d >= 1.0) || !(params_.sigma > 0.0))
        throw Error(ErrorCode::InvalidArgument, "profile system needs d >= 1 and sigma > 0");
}

std::vector<ext_real> ProfileSystem::residual(const std::vector<ext_real>& x) const {
    if (x.size() != unknowns()) throw Error(ErrorCode::InvalidArgument, "unknown vector has wrong length");
    for (const auto& v : x)
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "non-finite profile unknown");

    const std::size_t n = n_;
    const auto& m = disc_->mats;
    const auto xi = disc_->grid.nodes_ext();
    const ext_real d = params_.d, s = params_.sigma, K = disc_->grid.domain_length();
    const ext_real a = x[2 * n];

    Eigen::Map<const numerics::VectorXe> P(x.data(), static_cast<Eigen::Index>(n));
    Eigen::Map<const numerics::VectorXe> W(x.data() + n, static_cast<Eigen::Index>(n));
    const numerics::VectorXe Pd = m.d1 * P, Wd = m.d1 * W, Pdd = m.d2 * P, Wdd = m.d2 * W;

    std::vector<ext_real> r(unknowns());
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const ext_real q = P[k] * P[k] + W[k] * W[k];
        const ext_real nl = (s == 1.0L) ? q : std::pow(q, s);
        const ext_real c = (d - 1.0L) / xi[k];
        r[k - 1] = Pdd[k] + c * Pd[k] - P[k] - a * (W[k] / s + xi[k] * Wd[k]) + nl * P[k];
        r[n - 2 + k - 1] = Wdd[k] + c * Wd[k] - W[k] + a * (P[k] / s + xi[k] * Pd[k]) + nl * W[k];
    }
    const std::size_t b = 2 * n - 4;
    r[b] = Pd[0];
    r[b + 1] = W[0];
    r[b + 2] = Wd[0];
    r[b + 3] = P[n - 1] / s - W[n - 1] / a + K * Pd[n - 1];
    r[b + 4] = P[n - 1] / a + W[n - 1] / s + K * Wd[n - 1];
    return r;
}

Eigen::MatrixXd ProfileSystem::jacobian(const std::vector<ext_real>& x) const {
    if (x.size() != unknowns()) throw Error(ErrorCode::InvalidArgument, "unknown vector has wrong length");
    for (const auto& v : x)
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "non-finite profile unknown");

    const std::size_t n = n_;
    const Eigen::Index N = static_cast<Eigen::Index>(n);
    const auto& D1 = disc_->mats.d1_f64;
    const auto& D2 = disc_->mats.d2_f64;
    const auto xi = disc_->grid.nodes();
    const double d = params_.d, s = params_.sigma, K = disc_->grid.domain_length();
    const double a = static_cast<double>(x[2 * n]);

    Eigen::VectorXd P(N), W(N);
    for (std::size_t k = 0; k < n; ++k) {
        P[k] = static_cast<double>(x[k]);
        W[k] = static_cast<double>(x[n + k]);
    }
    const Eigen::VectorXd Pd = D1 * P, Wd = D1 * W;

    const Eigen::Index M = 2 * N + 1;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(M, M);
    for (Eigen::Index k = 1; k + 1 < N; ++k) {
        const Eigen::Index r1 = k - 1, r2 = N - 2 + k - 1;
        const double c = (d - 1.0) / xi[k];
        const double q = P[k] * P[k] + W[k] * W[k];
        const double nl = (s == 1.0) ? q : std::pow(q, s);
        const double dnl = (s == 1.0) ? 1.0 : (q > 0.0 ? s * std::pow(q, s - 1.0) : 0.0);

        // Laplacian blocks, advection blocks
        J.row(r1).segment(0, N) = D2.row(k) + c * D1.row(k);
        J.row(r1).segment(N, N) = -a * xi[k] * D1.row(k);
        J.row(r2).segment(N, N) = D2.row(k) + c * D1.row(k);
        J.row(r2).segment(0, N) = a * xi[k] * D1.row(k);

        J(r1, k) += -1.0 + nl + 2.0 * P[k] * P[k] * dnl;
        J(r1, N + k) += 2.0 * P[k] * W[k] * dnl - a / s;
        J(r1, M - 1) = -(W[k] / s + xi[k] * Wd[k]);

        J(r2, N + k) += -1.0 + nl + 2.0 * W[k] * W[k] * dnl;
        J(r2, k) += 2.0 * P[k] * W[k] * dnl + a / s;
        J(r2, M - 1) = P[k] / s + xi[k] * Pd[k];
    }
    const Eigen::Index b = 2 * N - 4;
    J.row(b).segment(0, N) = D1.row(0);
    J(b + 1, N) = 1.0;
    J.row(b + 2).segment(N, N) = D1.row(0);
    J.row(b + 3).segment(0, N) = K * D1.row(N - 1);
    J(b + 3, N - 1) += 1.0 / s;
    J(b + 3, 2 * N - 1) += -1.0 / a;
    J(b + 3, M - 1) = W[N - 1] / (a * a);
    J.row(b + 4).segment(N, N) = K * D1.row(N - 1);
    J(b + 4, 2 * N - 1) += 1.0 / s;
    J(b + 4, N - 1) += 1.0 / a;
    J(b + 4, M - 1) = -P[N - 1] / (a * a);
    return J;
}

std::vector<ext_real> assemble_residual(const std::vector<ext_real>& x, const ProblemParams& params,
                                        std::shared_ptr<const Discretization> disc) {
    return ProfileSystem(params, std::move(disc)).residual(x);
}

Eigen::MatrixXd assemble_jacobian(const std::vector<ext_real>& x, const ProblemParams& params,
                                  std::shared_ptr<const Discretization> disc) {
    return ProfileSystem(params, std::move(disc)).jacobian(x);
}

}  // namespace blowup::profile
