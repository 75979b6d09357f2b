#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blowup/error.hpp"
#include "blowup/numerics/banded.hpp"
#include "blowup/profile/diagnostics.hpp"
#include "blowup/profile/system.hpp"
#include "blowup/simulator/stencil.hpp"

namespace blowup::simulator {

using cd = std::complex<double>;

enum class BoundaryKind { ExactInterpolation, AdamsBashforthOde };

std::string to_string(BoundaryKind kind);
/// Accepts "exact-interpolation" and "adams-bashforth-ode"; throws InvalidArgument.
BoundaryKind parse_boundary_kind(const std::string& name);

struct SimConfig {
    profile::ProblemParams params;
    double h = 0.1;
    double dtau = 2e-4;
    double domain_length = 100.0;
    double stop_L = 1e-24;
    double tau_max = 2000.0;
    BoundaryKind bc_kind = BoundaryKind::ExactInterpolation;
    int record_every = 100;
    /// Allowed drift of sup |v| away from 1 before the run aborts.
    double amplitude_tol = 1e-2;
    /// Consecutive steps with L(tau_{m+1}) >= L(tau_m) before a not-blowing-up abort.
    int not_blowing_up_steps = 1000;

    /// dtau = 1e-4 / 2^{sigma-2}; L_D = 100 for d < 4 and 200 otherwise.
    static SimConfig defaults(const profile::ProblemParams& params);

    std::size_t intervals() const;
    std::vector<double> nodes() const;
    void validate() const;
};

struct RescaledState {
    std::vector<cd> v;
    std::vector<cd> v_prev;
    double tau = 0.0;
    double ln_L = 0.0;
    double a = 0.0;
    double a_prev = 0.0;
    long long step_index = 0;
};

/// Radial initial data u0(r). Gaussian is A e^{-r^2}, rational is A / (1 + r^2)^4.
struct InitialData {
    enum class Family { Gaussian, Rational };
    Family family = Family::Gaussian;
    double amplitude = 1.0;

    cd operator()(double r) const;
    std::string to_string() const;
    /// Parses "gaussian:5" or "rational:2.5"; throws InvalidArgument.
    static InitialData parse(const std::string& spec);
};

/// Amplitudes of the standard blow-up examples for each family, or nullopt
/// when the (d, sigma) pair has none.
std::optional<double> table_amplitude(const profile::ProblemParams& params, InitialData::Family family);

/// L0 = |u0(0)|^{-sigma}, v0(xi) = L0^{1/sigma} u0(xi L0). Throws
/// SupNotAtOrigin if a sample exceeds |u0(0)| and NonFinite for bad samples.
RescaledState init_from_physical(const std::function<cd(double)>& u0, const SimConfig& config);

/// State built from samples already normalized on the simulator grid.
RescaledState init_from_samples(std::vector<cd> v0, double ln_L0, const SimConfig& config);

/// a = -sigma Im(conj(v) Delta_h v) at the origin.
double compute_a(std::span<const cd> v, const RadialStencil& stencil, double sigma);

/// One dynamic-rescaling integrator for a fixed configuration. The implicit
/// Crank-Nicolson matrix is factorized once at construction. Scratch buffers
/// are members, so a Stepper must not be shared between threads.
class Stepper {
public:
    explicit Stepper(const SimConfig& config);

    const SimConfig& config() const noexcept { return cfg_; }
    const RadialStencil& stencil() const noexcept { return stencil_; }

    double compute_a(std::span<const cd> v) const;

    /// N(v) = i a (xi v_xi + v / sigma) + |v|^{2 sigma} v at every node.
    void nonlinearity(std::span<const cd> v, double a, std::span<cd> out) const;

    /// Far-field value v(L_D, tau_{m+1}) from the current and previous steps.
    /// The exact-interpolation kind throws ZetaOutOfRange unless
    /// 0 < L_{m+1}/L_m <= 1.
    cd apply_boundary(const RescaledState& s) const;

    /// Heun step producing v^(1); requires step_index == 0.
    void bootstrap_first_step(RescaledState& s) const;

    /// Predictor-corrector step; requires step_index >= 1. When the exact
    /// interpolation boundary would need a point beyond L_D (a defocusing
    /// step) the transport ODE closes that step instead.
    void step(RescaledState& s) const;

    /// bootstrap_first_step at step 0, step afterwards. Throws Instability on
    /// non-finite values.
    void advance(RescaledState& s) const;

    /// Number of steps so far that fell back from interpolation to the ODE closure.
    long long boundary_fallbacks() const noexcept { return fallbacks_; }

private:
    double ratio_estimate(const RescaledState& s) const;
    cd interpolate_tail(std::span<const cd> v, double ratio) const;
    cd ode_boundary(const RescaledState& s) const;
    void solve_implicit(std::span<cd> rhs, cd boundary, std::span<cd> out) const;

    SimConfig cfg_;
    RadialStencil stencil_;
    numerics::BandedMatrix implicit_;
    std::vector<cd> boundary_column_;
    std::vector<double> xi_;
    mutable std::vector<cd> lap_, nl_m_, nl_prev_, nl_pred_, base_, rhs_, pred_, work_;
    mutable long long fallbacks_ = 0;
};

/// |Q~| resampled by cubic spline onto the simulator nodes xi_j <= min(L_D, eta_max).
std::vector<double> sample_profile_modulus(const profile::RescaledProfile& q_tilde, std::span<const double> nodes);

/// sup over the overlap of ||v_j| - q_abs_j|; throws EmptyOverlap if q_abs is empty.
double profile_distance(std::span<const cd> v, std::span<const double> q_abs);

struct TraceRecord {
    long long step_index = 0;
    double tau = 0.0;
    double delta_t = 0.0;
    double ln_L = 0.0;
    double a = 0.0;
    double sup_v = 0.0;
    std::optional<double> dist_to_q;
};

struct SimulationTrace {
    SimConfig config;
    std::string initial_data;
    double ln_L0 = 0.0;
    std::vector<TraceRecord> records;
    double T = 0.0;
    double a_end = 0.0;
    long long steps = 0;
    bool reached_stop = false;
};

/// Run failure carrying the trace recorded up to the last valid step.
class RunAborted : public Error {
public:
    RunAborted(ErrorCode code, const std::string& what, SimulationTrace partial)
        : Error(code, what), trace_(std::move(partial)) {}
    const SimulationTrace& trace() const noexcept { return trace_; }

private:
    SimulationTrace trace_;
};

/// Optional observer called after every step with the new state.
using StepObserver = std::function<void(const RescaledState&)>;

/// Steps until L < stop_L or tau >= tau_max. Records every record_every steps
/// plus a final record; delta_t is the compensated sum of dtau L^2 over the
/// interval. Throws RunAborted (Instability, NotBlowingUp) with the partial trace.
SimulationTrace run(RescaledState initial, const SimConfig& config,
                    const profile::RescaledProfile* q_reference = nullptr, const StepObserver& observer = {});

SimulationTrace run(const InitialData& u0, const SimConfig& config,
                    const profile::RescaledProfile* q_reference = nullptr);

}  // namespace blowup::simulator
