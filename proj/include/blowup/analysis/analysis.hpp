#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "blowup/profile/solver.hpp"
#include "blowup/simulator/simulator.hpp"

namespace blowup::analysis {

using simulator::profile_distance;
using simulator::SimulationTrace;

/// T and the distances to blow-up time. t_minus[0] = T - t_0 = T (t_0 = 0)
/// and t_minus[i] = T - t_i for the i-th record (1-based), built from
/// compensated suffix sums of delta_t. The last entry is 0.
struct TimeReconstruction {
    double T = 0.0;
    std::vector<double> t_minus;
};

/// Throws EmptyTrace when the trace has no records.
TimeReconstruction reconstruct_times(const SimulationTrace& trace);

struct FitWindow {
    /// Records with ln L above this are the transient.
    double ln_L_max = -2.0;
    /// Records with L below this suffer from the inaccurate estimate of T.
    double L_min = 1e-20;
    std::size_t min_records = 20;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double ln_L_lo = 0.0;
    double ln_L_hi = 0.0;
    double residual_rms = 0.0;
    std::size_t count = 0;
};

/// Least squares of ln L against ln(T - t) over the fit window. Throws
/// InsufficientRecords.
RateFit fit_rate(const SimulationTrace& trace, const FitWindow& window = {});

struct RelativeErrorPoint {
    double ln_L = 0.0;
    double e_rel = 0.0;
};

struct RelativeErrorSeries {
    double a_tilde = 0.0;
    std::vector<RelativeErrorPoint> points;
};

/// e_rel = |exp((2 ln L - ln(T - t) - ln 2 - ln a~) / (2 sigma)) - 1| for the
/// records with L >= L_min and T - t > 0. a~ defaults to a(tau_end) and must
/// be positive (InvalidArgument otherwise).
RelativeErrorSeries relative_error_series(const SimulationTrace& trace, std::optional<double> a_tilde = std::nullopt,
                                          double L_min = 1e-20);

/// Median of e_rel over L_lo <= L <= L_hi; nullopt when no point falls inside.
std::optional<double> median_e_rel(const RelativeErrorSeries& series, double L_lo, double L_hi);

/// Largest L from which every later point down to L_min stays within
/// factor * (median e_rel over [L_min, L_ref]). The median is taken over the
/// deep focusing window, so the onset marks where e_rel settles onto its floor.
struct Stabilization {
    double onset_L = 0.0;
    double floor = 0.0;
};

std::optional<Stabilization> stabilization_onset(const RelativeErrorSeries& series, double L_min = 1e-20,
                                                 double L_ref = 1e-10, double factor = 1.1);

struct ACompare {
    double a_sim = 0.0;
    double a_tilde = 0.0;
    double abs_diff = 0.0;
};

/// a_sim = a(tau_end); a~ from the profile rescaled to sup 1. Throws
/// ParameterMismatch when (d, sigma) differ.
ACompare compare_a(const SimulationTrace& trace, const profile::ProfileSolution& profile);

/// Everything written to an analysis report.
struct AnalysisReport {
    profile::ProblemParams params;
    std::string initial_data;
    TimeReconstruction times;
    RateFit rate;
    RelativeErrorSeries e_rel;
    std::optional<double> e_rel_median;
    std::optional<Stabilization> stabilization;
    std::optional<ACompare> a_compare;
    bool has_distance = false;
};

AnalysisReport analyze(const SimulationTrace& trace, const profile::ProfileSolution* profile = nullptr,
                       const FitWindow& window = {});

/// `# key = value` summary followed by gnuplot blocks (separated by two blank
/// lines) for ln L vs ln(T - t), a vs tau, distance vs tau and e_rel vs ln L.
void write_report(std::ostream& os, const AnalysisReport& report, const SimulationTrace& trace);

}  // namespace blowup::analysis
