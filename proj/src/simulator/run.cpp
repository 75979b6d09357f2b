#include <algorithm>
#include <cmath>

#include "blowup/numerics/summation.hpp"
#include "blowup/simulator/simulator.hpp"

namespace blowup::simulator {

namespace {

double sup_abs(std::span<const cd> v) {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::norm(z));
    return std::sqrt(m);
}

void finalize(SimulationTrace& trace, double a, long long steps) {
    numerics::CompensatedSum total;
    for (const auto& r : trace.records) total.add(r.delta_t);
    trace.T = total.value();
    trace.a_end = a;
    trace.steps = steps;
}

}  // namespace

SimulationTrace run(RescaledState state, const SimConfig& config, const profile::RescaledProfile* q_reference,
                    const StepObserver& observer) {
    const Stepper stepper(config);
    SimulationTrace trace;
    trace.config = config;
    trace.ln_L0 = state.ln_L;

    std::vector<double> q_abs;
    if (q_reference) q_abs = sample_profile_modulus(*q_reference, config.nodes());

    const double ln_stop = std::log(config.stop_L);
    const auto max_steps = static_cast<long long>(std::ceil(config.tau_max / config.dtau - 1e-9));
    numerics::CompensatedSum interval;
    int non_focusing = 0;
    double last_a = state.a;
    long long last_step = state.step_index;

    const auto abort = [&](ErrorCode code, const std::string& what) {
        finalize(trace, last_a, last_step);
        throw RunAborted(code, what, trace);
    };

    while (true) {
        const double prev_ln_L = state.ln_L;
        try {
            stepper.advance(state);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::Instability || e.code() == ErrorCode::ZetaOutOfRange ||
                e.code() == ErrorCode::OutOfRange)
                abort(e.code(), e.what());
            throw;
        }
        const double sup = sup_abs(state.v);
        if (!(std::abs(sup - 1.0) <= config.amplitude_tol))
            abort(ErrorCode::Instability, "sup |v| = " + std::to_string(sup) + " drifted from 1 at step " +
                                              std::to_string(state.step_index));
        non_focusing = state.ln_L >= prev_ln_L ? non_focusing + 1 : 0;
        const bool defocusing = non_focusing >= config.not_blowing_up_steps;

        interval.add(config.dtau * std::exp(2.0 * state.ln_L));
        if (observer) observer(state);

        const bool stop = state.ln_L < ln_stop;
        const bool cap = state.step_index >= max_steps;
        if (state.step_index % config.record_every == 0 || stop || cap || defocusing) {
            TraceRecord rec;
            rec.step_index = state.step_index;
            rec.tau = state.tau;
            rec.delta_t = interval.value();
            rec.ln_L = state.ln_L;
            rec.a = state.a;
            rec.sup_v = sup;
            if (!q_abs.empty()) rec.dist_to_q = profile_distance(state.v, q_abs);
            trace.records.push_back(rec);
            interval.reset();
        }
        last_a = state.a;
        last_step = state.step_index;
        if (defocusing)
            abort(ErrorCode::NotBlowingUp, "L failed to decrease for " + std::to_string(non_focusing) +
                                               " consecutive steps (tau = " + std::to_string(state.tau) + ")");
        if (stop || cap) {
            trace.reached_stop = stop;
            break;
        }
    }
    finalize(trace, state.a, state.step_index);
    return trace;
}

SimulationTrace run(const InitialData& u0, const SimConfig& config, const profile::RescaledProfile* q_reference) {
    try {
        auto trace = run(init_from_physical(u0, config), config, q_reference);
        trace.initial_data = u0.to_string();
        return trace;
    } catch (const RunAborted& e) {
        auto partial = e.trace();
        partial.initial_data = u0.to_string();
        throw RunAborted(e.code(), std::string(e.what()).substr(to_string(e.code()).size() + 2), partial);
    }
}

}  // namespace blowup::simulator
