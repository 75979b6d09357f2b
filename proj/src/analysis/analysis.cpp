#include "blowup/analysis/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "blowup/io/table.hpp"
#include "blowup/numerics/summation.hpp"
#include "blowup/profile/diagnostics.hpp"

namespace blowup::analysis {

TimeReconstruction reconstruct_times(const SimulationTrace& trace) {
    const auto& recs = trace.records;
    if (recs.empty()) throw Error(ErrorCode::EmptyTrace, "trace has no records");
    TimeReconstruction out;
    out.t_minus.assign(recs.size() + 1, 0.0);
    numerics::CompensatedSum suffix;
    for (std::size_t i = recs.size(); i-- > 0;) {
        if (!(recs[i].delta_t >= 0.0)) throw Error(ErrorCode::FileFormat, "negative or missing delta_t");
        suffix.add(recs[i].delta_t);
        out.t_minus[i] = suffix.value();
    }
    out.T = out.t_minus[0];
    return out;
}

RateFit fit_rate(const SimulationTrace& trace, const FitWindow& window) {
    const auto times = reconstruct_times(trace);
    const double ln_min = std::log(window.L_min);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const double lnL = trace.records[i].ln_L;
        const double tm = times.t_minus[i + 1];
        if (lnL > window.ln_L_max || lnL < ln_min || !(tm > 0.0)) continue;
        xs.push_back(std::log(tm));
        ys.push_back(lnL);
    }
    if (xs.size() < std::max<std::size_t>(window.min_records, 2))
        throw Error(ErrorCode::InsufficientRecords, "fit window holds " + std::to_string(xs.size()) + " records, need " +
                                                        std::to_string(window.min_records));
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw Error(ErrorCode::InsufficientRecords, "fit window has no spread in ln(T - t)");
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / n);
    fit.ln_L_lo = *std::min_element(ys.begin(), ys.end());
    fit.ln_L_hi = *std::max_element(ys.begin(), ys.end());
    fit.count = xs.size();
    return fit;
}

RelativeErrorSeries relative_error_series(const SimulationTrace& trace, std::optional<double> a_tilde, double L_min) {
    const auto times = reconstruct_times(trace);
    RelativeErrorSeries out;
    out.a_tilde = a_tilde ? *a_tilde : trace.a_end;
    if (!(out.a_tilde > 0.0)) throw Error(ErrorCode::InvalidArgument, "a~ must be positive");
    const double sigma = trace.config.params.sigma;
    const double ln_min = std::log(L_min);
    const double shift = std::log(2.0) + std::log(out.a_tilde);
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const double lnL = trace.records[i].ln_L;
        const double tm = times.t_minus[i + 1];
        if (lnL < ln_min || !(tm > 0.0)) continue;
        const double e = std::abs(std::expm1((2.0 * lnL - std::log(tm) - shift) / (2.0 * sigma)));
        out.points.push_back({lnL, e});
    }
    return out;
}

std::optional<double> median_e_rel(const RelativeErrorSeries& series, double L_lo, double L_hi) {
    const double lo = std::log(L_lo), hi = std::log(L_hi);
    std::vector<double> v;
    for (const auto& p : series.points)
        if (p.ln_L >= lo && p.ln_L <= hi) v.push_back(p.e_rel);
    if (v.empty()) return std::nullopt;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
        m = 0.5 * (m + lower);
    }
    return m;
}

std::optional<Stabilization> stabilization_onset(const RelativeErrorSeries& series, double L_min, double L_ref,
                                                 double factor) {
    const auto floor = median_e_rel(series, L_min, L_ref);
    if (!floor) return std::nullopt;
    const double bound = factor * *floor;
    const double ln_min = std::log(L_min);
    // points are ordered by decreasing L; walk back from the deepest point
    std::optional<Stabilization> out;
    for (std::size_t i = series.points.size(); i-- > 0;) {
        const auto& p = series.points[i];
        if (p.ln_L < ln_min) continue;
        if (p.e_rel > bound) break;
        out = Stabilization{std::exp(p.ln_L), *floor};
    }
    return out;
}

ACompare compare_a(const SimulationTrace& trace, const profile::ProfileSolution& profile) {
    if (!(trace.config.params == profile.params))
        throw Error(ErrorCode::ParameterMismatch, "trace and profile were computed for different (d, sigma)");
    ACompare out;
    out.a_sim = trace.a_end;
    out.a_tilde = profile::rescale_family(profile, 1.0).a_tilde;
    out.abs_diff = std::abs(out.a_sim - out.a_tilde);
    return out;
}

AnalysisReport analyze(const SimulationTrace& trace, const profile::ProfileSolution* profile, const FitWindow& window) {
    AnalysisReport rep;
    rep.params = trace.config.params;
    rep.initial_data = trace.initial_data;
    rep.times = reconstruct_times(trace);
    rep.rate = fit_rate(trace, window);
    rep.e_rel = relative_error_series(trace, std::nullopt, window.L_min);
    rep.e_rel_median = median_e_rel(rep.e_rel, window.L_min, 1e-10);
    rep.stabilization = stabilization_onset(rep.e_rel, window.L_min);
    if (profile) rep.a_compare = compare_a(trace, *profile);
    rep.has_distance = std::any_of(trace.records.begin(), trace.records.end(),
                                   [](const simulator::TraceRecord& r) { return r.dist_to_q.has_value(); });
    return rep;
}

void write_report(std::ostream& os, const AnalysisReport& rep, const SimulationTrace& trace) {
    const auto f = [](double v) { return io::format_real(v); };
    os << "# format = blowup-analysis 1\n";
    os << "# d = " << f(rep.params.d) << "\n# sigma = " << f(rep.params.sigma) << '\n';
    os << "# initial_data = " << (rep.initial_data.empty() ? "custom" : rep.initial_data) << '\n';
    os << "# T = " << f(rep.times.T) << '\n';
    os << "# a_end = " << f(trace.a_end) << '\n';
    os << "# reached_stop = " << (trace.reached_stop ? 1 : 0) << '\n';
    os << "# rate_slope = " << f(rep.rate.slope) << '\n';
    os << "# rate_intercept = " << f(rep.rate.intercept) << '\n';
    os << "# rate_residual_rms = " << f(rep.rate.residual_rms) << '\n';
    os << "# rate_ln_L_lo = " << f(rep.rate.ln_L_lo) << '\n';
    os << "# rate_ln_L_hi = " << f(rep.rate.ln_L_hi) << '\n';
    os << "# rate_count = " << rep.rate.count << '\n';
    os << "# e_rel_a_tilde = " << f(rep.e_rel.a_tilde) << '\n';
    if (rep.e_rel_median) os << "# e_rel_median = " << f(*rep.e_rel_median) << '\n';
    if (rep.stabilization) {
        os << "# stabilization_onset_L = " << f(rep.stabilization->onset_L) << '\n';
        os << "# stabilization_floor = " << f(rep.stabilization->floor) << '\n';
    }
    if (rep.a_compare) {
        os << "# a_sim = " << f(rep.a_compare->a_sim) << '\n';
        os << "# a_tilde = " << f(rep.a_compare->a_tilde) << '\n';
        os << "# a_abs_diff = " << f(rep.a_compare->abs_diff) << '\n';
    }

    const auto block = [&](const char* name, const char* cx, const char* cy) {
        os << "\n\n# block = " << name << "\n# " << cx << '\t' << cy << '\n';
    };
    block("rate", "ln_T_minus_t", "ln_L");
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const double tm = rep.times.t_minus[i + 1];
        if (tm > 0.0) os << f(std::log(tm)) << '\t' << f(trace.records[i].ln_L) << '\n';
    }
    block("a", "tau", "a");
    for (const auto& r : trace.records) os << f(r.tau) << '\t' << f(r.a) << '\n';
    if (rep.has_distance) {
        block("distance", "tau", "dist_to_Q");
        for (const auto& r : trace.records)
            if (r.dist_to_q) os << f(r.tau) << '\t' << f(*r.dist_to_q) << '\n';
    }
    block("e_rel", "ln_L", "e_rel");
    for (const auto& p : rep.e_rel.points) os << f(p.ln_L) << '\t' << f(p.e_rel) << '\n';
}

}  // namespace blowup::analysis
