#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "blowup/analysis/analysis.hpp"
#include "blowup/profile/diagnostics.hpp"

using namespace blowup;
using namespace blowup::analysis;

namespace {

// Records at T - t_k = tm[k] for k = 1..M (tm[M] = 0) with ln L from the law.
SimulationTrace law_trace(const std::vector<double>& tm, double a, double sigma, double eps = 0.0) {
    SimulationTrace t;
    t.config = simulator::SimConfig::defaults({3.0, sigma});
    t.initial_data = "gaussian:5";
    double prev = tm.front();
    for (std::size_t k = 1; k < tm.size(); ++k) {
        simulator::TraceRecord r;
        r.step_index = static_cast<long long>(k) * 100;
        r.tau = 0.01 * static_cast<double>(k);
        r.delta_t = prev - tm[k];
        prev = tm[k];
        const double tk = tm[k] > 0.0 ? tm[k] : tm[k - 1] * 1e-3;
        r.ln_L = 0.5 * std::log(2.0 * a * tk) + sigma * std::log1p(eps);
        r.a = a;
        r.sup_v = 1.0;
        t.records.push_back(r);
    }
    t.T = tm.front();
    t.a_end = a;
    t.steps = t.records.back().step_index;
    t.reached_stop = true;
    return t;
}

std::vector<double> dyadic(int m) {
    std::vector<double> tm;
    for (int k = 0; k <= m; ++k) tm.push_back(std::ldexp(1.0, -k));
    tm.push_back(0.0);
    return tm;
}

}  // namespace

TEST_CASE("reconstruct_times: suffix sums") {
    SimulationTrace t;
    for (double dt : {0.5, 0.25, 0.125}) t.records.push_back({0, 0.0, dt, -1.0, 0.1, 1.0, std::nullopt});
    const auto r = reconstruct_times(t);
    CHECK(r.T == 0.875);
    REQUIRE(r.t_minus.size() == 4);
    CHECK(r.t_minus[0] == 0.875);
    CHECK(r.t_minus[1] == 0.375);
    CHECK(r.t_minus[2] == 0.125);
    CHECK(r.t_minus[3] == 0.0);
    CHECK_THROWS_AS(reconstruct_times(SimulationTrace{}), Error);
}

TEST_CASE("reconstruct_times: deep distances keep their relative accuracy") {
    // delta_k = 3^-k for k = 1..M and a final 3^-M / 2 give T - t_i = 3^-i / 2
    const int m = 40;
    SimulationTrace t;
    for (int k = 1; k <= m; ++k) t.records.push_back({0, 0.0, std::pow(3.0, -k), -1.0, 0.1, 1.0, std::nullopt});
    t.records.push_back({0, 0.0, 0.5 * std::pow(3.0, -m), -1.0, 0.1, 1.0, std::nullopt});
    const auto r = reconstruct_times(t);
    double naive_worst = 0.0, prefix = 0.0;
    for (int i = 1; i <= m; ++i) {
        const double exact = 0.5 * std::pow(3.0, -i);
        CHECK(std::abs(r.t_minus[i] - exact) <= 1e-14 * exact);
        prefix += t.records[i - 1].delta_t;
        naive_worst = std::max(naive_worst, std::abs((r.T - prefix) - exact) / exact);
    }
    CHECK(naive_worst > 1e-6);
    // prefix + suffix recovers T
    double p = 0.0;
    for (std::size_t i = 0; i < t.records.size(); ++i) {
        p += t.records[i].delta_t;
        CHECK(std::abs(p + r.t_minus[i + 1] - r.T) <= 1e-15 * r.T);
    }
}

TEST_CASE("fit_rate: exact square-root law") {
    const auto t = law_trace(dyadic(140), 0.5, 1.0);
    const auto fit = fit_rate(t);
    CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fit.residual_rms <= 1e-12);
    CHECK(fit.ln_L_hi <= -2.0);
    CHECK(fit.ln_L_lo >= std::log(1e-20));
    // 2^{-k/2} in [1e-20, e^-2] for k = 6..132
    CHECK(fit.count == 127);
    CHECK(fit.intercept == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fit_rate: invariant under a uniform time shift") {
    auto t = law_trace(dyadic(140), 0.5, 1.0);
    const auto base = fit_rate(t);
    t.records.front().delta_t += 0.25;
    const auto shifted = fit_rate(t);
    CHECK(shifted.slope == base.slope);
    CHECK(shifted.intercept == base.intercept);
    CHECK(reconstruct_times(t).T == 1.25);
}

TEST_CASE("fit_rate: window too small") {
    const auto t = law_trace(dyadic(140), 0.5, 1.0);
    FitWindow w;
    w.L_min = 1e-3;
    try {
        fit_rate(t, w);
        FAIL("expected insufficient records");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientRecords);
    }
    w.L_min = 1e-20;
    w.min_records = 200;
    CHECK_THROWS_AS(fit_rate(t, w), Error);
}

TEST_CASE("relative error: exact law, known offset, defaults") {
    const auto exact = relative_error_series(law_trace(dyadic(140), 0.3, 2.0), 0.3);
    REQUIRE_FALSE(exact.points.empty());
    for (const auto& p : exact.points) CHECK(p.e_rel <= 1e-12);
    CHECK(exact.points.back().ln_L >= std::log(1e-20));

    const auto off = relative_error_series(law_trace(dyadic(140), 0.3, 2.0, 1e-5));
    CHECK(off.a_tilde == 0.3);
    for (const auto& p : off.points) CHECK(p.e_rel == doctest::Approx(1e-5).epsilon(1e-6));
    CHECK(*median_e_rel(off, 1e-20, 1e-10) == doctest::Approx(1e-5).epsilon(1e-6));
    CHECK_FALSE(median_e_rel(off, 1e-40, 1e-30).has_value());
    CHECK_THROWS_AS(relative_error_series(law_trace(dyadic(10), 0.3, 2.0), -1.0), Error);
}

TEST_CASE("stabilization onset: transient then floor") {
    RelativeErrorSeries s;
    for (int k = 0; k <= 46; ++k) {
        const double lnL = -0.5 * k * std::log(10.0);
        const double e = k < 12 ? 1e-2 / (k + 1) : 1e-5 * (1.0 + 0.02 * std::sin(k));
        s.points.push_back({lnL, e});
    }
    const auto st = stabilization_onset(s);
    REQUIRE(st.has_value());
    CHECK(st->onset_L == doctest::Approx(1e-6).epsilon(1e-12));
    CHECK(st->floor == doctest::Approx(1e-5).epsilon(0.02));
    CHECK_FALSE(stabilization_onset(RelativeErrorSeries{}).has_value());
    // a late excursion moves the onset below it
    s.points[30].e_rel = 1.0;
    CHECK(stabilization_onset(s)->onset_L < 1e-15);
}

TEST_CASE("compare_a: matching and mismatched parameters") {
    const auto sol = profile::solve_profile({3.0, 1.0}, 0.917, 1.885);
    const double at = profile::rescale_family(sol, 1.0).a_tilde;
    auto t = law_trace(dyadic(60), at, 1.0);
    const auto cmp = compare_a(t, sol);
    CHECK(cmp.a_tilde == at);
    CHECK(cmp.abs_diff == 0.0);
    t.config.params = {2.0, 2.0};
    try {
        compare_a(t, sol);
        FAIL("expected parameter mismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParameterMismatch);
    }
}

TEST_CASE("report: summary keys and blocks") {
    auto t = law_trace(dyadic(140), 0.5, 1.0);
    const auto rep = analyze(t);
    CHECK_FALSE(rep.a_compare.has_value());
    CHECK_FALSE(rep.has_distance);
    std::ostringstream os;
    write_report(os, rep, t);
    const std::string out = os.str();
    CHECK(out.find("# format = blowup-analysis 1\n") == 0);
    CHECK(out.find("# rate_slope = 0.5") != std::string::npos);
    CHECK(out.find("# rate_count = 127\n") != std::string::npos);
    CHECK(out.find("# block = rate") != std::string::npos);
    CHECK(out.find("# block = e_rel") != std::string::npos);
    CHECK(out.find("# block = distance") == std::string::npos);
    CHECK(out.find("a_sim") == std::string::npos);

    t.records[3].dist_to_q = 2e-4;
    t.records[4].dist_to_q = 1e-4;
    const auto rep2 = analyze(t);
    std::ostringstream os2;
    write_report(os2, rep2, t);
    const std::string out2 = os2.str();
    const auto pos = out2.find("# block = distance");
    REQUIRE(pos != std::string::npos);
    const auto next = out2.find("# block", pos + 1);
    const std::string block = out2.substr(pos, next - pos);
    CHECK(std::count(block.begin(), block.end(), '\n') == 2 + 2 + 2);

    std::ostringstream os3;
    write_report(os3, rep, t);
    CHECK(os3.str() == out);
}
