#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "blowup/analysis/analysis.hpp"
#include "blowup/io/table.hpp"
#include "blowup/profile/diagnostics.hpp"
#include "blowup/profile/io.hpp"
#include "blowup/profile/solver.hpp"
#include "blowup/simulator/simulator.hpp"
#include "blowup/simulator/trace_io.hpp"

#ifndef BLOWUP_VERSION
#define BLOWUP_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace blowup;

namespace {

constexpr int kOk = 0;
constexpr int kBadFlags = 2;
constexpr int kNoConvergence = 3;
constexpr int kTrivial = 4;
constexpr int kInstability = 5;
constexpr int kNotBlowingUp = 6;
constexpr int kFormat = 7;

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::ParameterMismatch:
        case ErrorCode::NotEnergyCritical:
        case ErrorCode::SupNotAtOrigin:
        case ErrorCode::OutOfRange:
            return kBadFlags;
        case ErrorCode::NoConvergence:
        case ErrorCode::SingularJacobian:
        case ErrorCode::SingularPivot:
        case ErrorCode::StepUnderflow:
        case ErrorCode::IvpDiverged:
        case ErrorCode::ContinuationStalled:
            return kNoConvergence;
        case ErrorCode::ConvergedToTrivial:
            return kTrivial;
        case ErrorCode::NonFinite:
        case ErrorCode::ZetaOutOfRange:
        case ErrorCode::Instability:
            return kInstability;
        case ErrorCode::NotBlowingUp:
            return kNotBlowingUp;
        case ErrorCode::FileFormat:
        case ErrorCode::EmptyTrace:
        case ErrorCode::EmptyOverlap:
        case ErrorCode::InsufficientRecords:
            return kFormat;
    }
    return 1;
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::FileFormat, "cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

/// Shortest round-trip text, for file names and labels.
std::string short_num(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

/// Records what a command did and writes it next to its outputs as JSON.
class Manifest {
public:
    Manifest(std::string command, std::string path)
        : command_(std::move(command)), path_(std::move(path)), start_(std::chrono::steady_clock::now()) {}

    void param(const std::string& key, const std::string& value) { params_.emplace_back(key, value); }
    void param(const std::string& key, double value) { param(key, io::format_real(value)); }

    void input(const std::string& path, const std::string& content) {
        inputs_.push_back({{"path", path}, {"fnv1a64", hex(fnv1a(content))}});
        input_blob_ += path;
        input_blob_ += '\0';
        input_blob_ += content;
    }

    /// Writes content prefixed with a header line naming this manifest.
    void output(const std::string& path, const std::string& content) {
        io::write_text_file(path, "# manifest = " + fs::path(path_).filename().string() + "\n" + content);
        outputs_.push_back(path);
    }

    void status(int code, const std::string& message) {
        exit_code_ = code;
        message_ = message;
    }

    void write() const {
        nlohmann::ordered_json j;
        j["command"] = command_;
        j["tool_version"] = BLOWUP_VERSION;
        nlohmann::ordered_json p = nlohmann::ordered_json::object();
        std::string blob = command_;
        for (const auto& [k, v] : params_) {
            p[k] = v;
            blob += '\0' + k + '=' + v;
        }
        j["parameters"] = p;
        j["inputs"] = inputs_;
        j["outputs"] = outputs_;
        j["input_hash"] = hex(fnv1a(input_blob_, fnv1a(blob)));
        j["exit_code"] = exit_code_;
        if (!message_.empty()) j["message"] = message_;
        j["duration_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        io::write_text_file(path_, j.dump(2) + "\n");
    }

private:
    std::string command_;
    std::string path_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::pair<std::string, std::string>> params_;
    nlohmann::ordered_json inputs_ = nlohmann::ordered_json::array();
    std::vector<std::string> outputs_;
    std::string input_blob_;
    int exit_code_ = 0;
    std::string message_;
};

std::string manifest_path_for(const std::string& output) { return output + ".manifest.json"; }

int fail(Manifest& m, const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    const int code = exit_code(e.code());
    m.status(code, e.what());
    m.write();
    return code;
}

// ---- profile solve ---------------------------------------------------------

struct SolveArgs {
    double d = 0.0, sigma = 0.0, a0 = 0.0, q00 = 0.0;
    std::size_t n = 257;
    double domain_length = 200.0;
    std::string out = "profile.txt";
};

std::string profile_summary(const profile::ProfileSolution& sol) {
    const auto osc = profile::detect_oscillation(profile::phase_path(sol));
    std::ostringstream os;
    os << "a = " << io::format_real(sol.a()) << '\n'
       << "Q0 = " << io::format_real(sol.q0()) << '\n'
       << "residual = " << io::format_real(sol.residual_norm) << '\n'
       << "iterations = " << sol.iterations << '\n'
       << "oscillating = " << (osc.oscillating ? 1 : 0) << '\n'
       << "local_maxima = " << profile::count_local_maxima(sol) << '\n';
    return os.str();
}

int cmd_profile_solve(const SolveArgs& a) {
    Manifest m("profile solve", manifest_path_for(a.out));
    m.param("d", a.d);
    m.param("sigma", a.sigma);
    m.param("a0", a.a0);
    m.param("q00", a.q00);
    m.param("n", std::to_string(a.n));
    m.param("L_D", a.domain_length);
    m.param("out", a.out);
    try {
        if (!(a.a0 > 0.0) || !(a.q00 > 0.0)) throw Error(ErrorCode::InvalidArgument, "--a0 and --q00 must be positive");
        profile::ProfileSettings s;
        s.n = a.n;
        s.domain_length = a.domain_length;
        const auto sol = profile::solve_profile({a.d, a.sigma}, a.a0, a.q00, s);
        std::ostringstream os;
        profile::write_profile(os, sol);
        m.output(a.out, os.str());
        std::cout << profile_summary(sol);
    } catch (const Error& e) {
        return fail(m, e);
    }
    m.write();
    return kOk;
}

// ---- profile continue ------------------------------------------------------

struct ContinueArgs {
    std::string from;
    std::optional<double> target_d, target_sigma;
    double step = 0.1;
    double min_step = 1e-3;
    std::string out_dir = "continuation";
};

void write_continuation(Manifest& m, const std::string& dir, const profile::ContinuationRecord& rec, bool stalled) {
    std::vector<std::vector<std::string>> rows;
    std::size_t k = 0;
    for (std::size_t i = 0; i < rec.entries.size(); ++i) {
        const auto& e = rec.entries[i];
        const double step = i < rec.step_history.size() ? rec.step_history[i] : 0.0;
        rows.push_back({io::format_real(e.params.d), io::format_real(e.params.sigma), io::format_real(e.a),
                        io::format_real(e.q0), std::to_string(e.iterations), e.converged ? "1" : "0",
                        io::format_real(e.residual_norm), io::format_real(step)});
        if (!e.converged || k >= rec.solutions.size()) continue;
        std::ostringstream os;
        profile::write_profile(os, rec.solutions[k++]);
        m.output((fs::path(dir) / ("profile_d" + short_num(e.params.d) + "_s" + short_num(e.params.sigma) + ".txt"))
                     .string(),
                 os.str());
    }
    std::ostringstream os;
    io::write_table(os, {{"format", "blowup-continuation 1"}, {"stalled", stalled ? "1" : "0"}},
                    {"d", "sigma", "a", "Q0", "iterations", "converged", "residual_norm", "step"}, rows);
    m.output((fs::path(dir) / "continuation.txt").string(), os.str());
}

int cmd_profile_continue(const ContinueArgs& a) {
    fs::create_directories(a.out_dir);
    Manifest m("profile continue", (fs::path(a.out_dir) / "manifest.json").string());
    m.param("from", a.from);
    m.param("step", a.step);
    m.param("min_step", a.min_step);
    m.param("out_dir", a.out_dir);
    try {
        const std::string text = read_file(a.from);
        m.input(a.from, text);
        std::istringstream in(text);
        const auto start = profile::read_profile(in);
        const profile::ProblemParams target{a.target_d.value_or(start.params.d),
                                            a.target_sigma.value_or(start.params.sigma)};
        m.param("target_d", target.d);
        m.param("target_sigma", target.sigma);
        profile::ContinuationSettings s;
        s.step = a.step;
        s.min_step = a.min_step;
        s.profile.n = start.size();
        s.profile.domain_length = start.grid().domain_length();
        try {
            const auto rec = profile::continue_in_parameter(start, target, s);
            write_continuation(m, a.out_dir, rec, false);
            std::cout << "points = " << rec.solutions.size() << '\n';
        } catch (const profile::ContinuationStalled& e) {
            write_continuation(m, a.out_dir, e.partial(), true);
            throw;
        }
    } catch (const Error& e) {
        return fail(m, e);
    }
    m.write();
    return kOk;
}

// ---- profile diagnose ------------------------------------------------------

struct DiagnoseArgs {
    std::string profile;
    std::vector<double> k_list{20.0, 50.0, 100.0, 150.0, 200.0};
    std::vector<double> xi_list{1.0, 5.0, 10.0, 20.0, 50.0};
    std::string out = "diagnostics.txt";
};

int cmd_profile_diagnose(const DiagnoseArgs& a) {
    Manifest m("profile diagnose", manifest_path_for(a.out));
    m.param("profile", a.profile);
    std::string ks, xs;
    for (double k : a.k_list) ks += (ks.empty() ? "" : ",") + io::format_real(k);
    for (double x : a.xi_list) xs += (xs.empty() ? "" : ",") + io::format_real(x);
    m.param("k_list", ks);
    m.param("xi_list", xs);
    m.param("out", a.out);
    try {
        const std::string text = read_file(a.profile);
        m.input(a.profile, text);
        std::istringstream in(text);
        const auto sol = profile::read_profile(in);
        const double K = sol.grid().domain_length();
        for (double k : a.k_list)
            if (!(k > 0.0 && k <= K)) throw Error(ErrorCode::InvalidArgument, "k outside (0, L_D]: " + short_num(k));
        for (double x : a.xi_list)
            if (!(x > 0.0 && x <= K)) throw Error(ErrorCode::InvalidArgument, "xi outside (0, L_D]: " + short_num(x));

        const auto f = [](double v) { return io::format_real(v); };
        const auto path = profile::phase_path(sol);
        const auto osc = profile::detect_oscillation(path);
        const auto ham = profile::hamiltonian_study(sol, a.k_list);
        const double s_c = sol.params.d / 2.0 - 1.0 / sol.params.sigma;

        std::ostringstream os;
        os << "# format = blowup-diagnostics 1\n";
        os << "# d = " << f(sol.params.d) << "\n# sigma = " << f(sol.params.sigma) << '\n';
        os << "# a = " << f(sol.a()) << "\n# Q0 = " << f(sol.q0()) << '\n';
        os << "# residual_norm = " << f(sol.residual_norm) << '\n';
        os << "# oscillating = " << (osc.oscillating ? 1 : 0) << '\n';
        os << "# sign_changes = " << osc.sign_changes << '\n';
        os << "# c_threshold = " << f(osc.c_threshold) << '\n';
        os << "# local_maxima = " << profile::count_local_maxima(sol) << '\n';
        os << "# volterra_residual = " << f(profile::volterra_residual(sol, std::min(50.0, K))) << '\n';
        if (std::abs(s_c - 1.0) <= 1e-12) {
            const auto c0 = profile::c0_check(sol);
            os << "# c0_xi = " << f(c0.xi_star) << "\n# c0_num = " << f(c0.c_num) << "\n# c0_pred = "
               << f(c0.c_pred) << "\n# c0_abs_err = " << f(c0.abs_err) << "\n# c0_rel_err = " << f(c0.rel_err)
               << '\n';
        }
        const auto block = [&](const char* name, const char* cols) {
            os << "\n\n# block = " << name << "\n# " << cols << '\n';
        };
        block("phase_path", "C\tD\txi\tpsi");
        for (std::size_t i = 0; i < path.size(); ++i)
            os << f(path.c[i]) << '\t' << f(path.d_log[i]) << '\t' << f(path.xi[i]) << '\t' << f(path.psi[i]) << '\n';
        block("hamiltonian", "k\tH");
        for (std::size_t i = 0; i < ham.k_trunc.size(); ++i) os << f(ham.k_trunc[i]) << '\t' << f(ham.h_value[i]) << '\n';
        block("identities", "xi\tres1\tres2");
        for (double x : a.xi_list) {
            const auto r = profile::identity_residuals(sol, x);
            os << f(x) << '\t' << f(r.res1) << '\t' << f(r.res2) << '\n';
        }
        m.output(a.out, os.str());
    } catch (const Error& e) {
        return fail(m, e);
    }
    m.write();
    return kOk;
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
    double d = 0.0, sigma = 0.0;
    std::string init;
    std::optional<double> h, dtau, domain_length, stop_L, tau_max, amplitude_tol;
    std::optional<int> record_every, not_blowing_up_steps;
    std::string bc = "exact-interpolation";
    std::string profile;
    std::string out = "trace.txt";
};

int cmd_simulate(const SimulateArgs& a) {
    Manifest m("simulate", manifest_path_for(a.out));
    try {
        auto c = simulator::SimConfig::defaults({a.d, a.sigma});
        if (a.h) c.h = *a.h;
        if (a.dtau) c.dtau = *a.dtau;
        if (a.domain_length) c.domain_length = *a.domain_length;
        if (a.stop_L) c.stop_L = *a.stop_L;
        if (a.tau_max) c.tau_max = *a.tau_max;
        if (a.amplitude_tol) c.amplitude_tol = *a.amplitude_tol;
        if (a.record_every) c.record_every = *a.record_every;
        if (a.not_blowing_up_steps) c.not_blowing_up_steps = *a.not_blowing_up_steps;
        c.bc_kind = simulator::parse_boundary_kind(a.bc);
        const auto u0 = simulator::InitialData::parse(a.init);

        m.param("d", a.d);
        m.param("sigma", a.sigma);
        m.param("init", u0.to_string());
        m.param("h", c.h);
        m.param("dtau", c.dtau);
        m.param("L_D", c.domain_length);
        m.param("bc", simulator::to_string(c.bc_kind));
        m.param("stop_L", c.stop_L);
        m.param("tau_max", c.tau_max);
        m.param("record_every", std::to_string(c.record_every));
        m.param("amplitude_tol", c.amplitude_tol);
        m.param("not_blowing_up_steps", std::to_string(c.not_blowing_up_steps));
        m.param("profile", a.profile);
        m.param("out", a.out);
        c.validate();

        std::optional<profile::RescaledProfile> ref;
        if (!a.profile.empty()) {
            const std::string text = read_file(a.profile);
            m.input(a.profile, text);
            std::istringstream in(text);
            const auto sol = profile::read_profile(in);
            if (!(sol.params == c.params))
                throw Error(ErrorCode::ParameterMismatch, "profile (d, sigma) differ from --d/--sigma");
            ref = profile::rescale_family(sol, 1.0);
        }

        const auto emit = [&](const simulator::SimulationTrace& t) {
            std::ostringstream os;
            simulator::write_trace(os, t);
            m.output(a.out, os.str());
        };
        try {
            const auto trace = simulator::run(u0, c, ref ? &*ref : nullptr);
            emit(trace);
            std::cout << "steps = " << trace.steps << "\ntau = " << io::format_real(trace.records.back().tau)
                      << "\nln_L = " << io::format_real(trace.records.back().ln_L)
                      << "\na_end = " << io::format_real(trace.a_end) << "\nT = " << io::format_real(trace.T)
                      << "\nreached_stop = " << (trace.reached_stop ? 1 : 0) << '\n';
        } catch (const simulator::RunAborted& e) {
            emit(e.trace());
            throw;
        }
    } catch (const Error& e) {
        return fail(m, e);
    }
    m.write();
    return kOk;
}

// ---- analyze ---------------------------------------------------------------

struct AnalyzeArgs {
    std::string trace;
    std::string profile;
    double ln_L_max = -2.0;
    double L_min = 1e-20;
    std::size_t min_records = 20;
    std::string out = "analysis.txt";
};

int cmd_analyze(const AnalyzeArgs& a) {
    Manifest m("analyze", manifest_path_for(a.out));
    m.param("trace", a.trace);
    m.param("profile", a.profile);
    m.param("fit_ln_L_max", a.ln_L_max);
    m.param("fit_L_min", a.L_min);
    m.param("fit_min_records", std::to_string(a.min_records));
    m.param("out", a.out);
    try {
        const std::string text = read_file(a.trace);
        m.input(a.trace, text);
        std::istringstream in(text);
        const auto trace = simulator::read_trace(in);
        std::optional<profile::ProfileSolution> sol;
        if (!a.profile.empty()) {
            const std::string ptext = read_file(a.profile);
            m.input(a.profile, ptext);
            std::istringstream pin(ptext);
            sol = profile::read_profile(pin);
        }
        analysis::FitWindow w;
        w.ln_L_max = a.ln_L_max;
        w.L_min = a.L_min;
        w.min_records = a.min_records;
        const auto rep = analysis::analyze(trace, sol ? &*sol : nullptr, w);
        std::ostringstream os;
        analysis::write_report(os, rep, trace);
        m.output(a.out, os.str());
        std::cout << "rate_slope = " << io::format_real(rep.rate.slope) << '\n';
        if (rep.e_rel_median) std::cout << "e_rel_median = " << io::format_real(*rep.e_rel_median) << '\n';
        if (rep.a_compare) std::cout << "a_abs_diff = " << io::format_real(rep.a_compare->abs_diff) << '\n';
    } catch (const Error& e) {
        return fail(m, e);
    }
    m.write();
    return kOk;
}

// ---- config layering -------------------------------------------------------

/// Reads `key = value` lines ('#' comments) into `--key value` tokens.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open config '" + path + "'");
    std::vector<std::string> out;
    std::string line;
    const auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "config line without '=': " + line);
        out.push_back("--" + trim(line.substr(0, eq)));
        out.push_back(trim(line.substr(eq + 1)));
    }
    return out;
}

/// Inserts the config file's entries right after the subcommand words, so
/// explicit flags (parsed later, last value wins) override them.
std::vector<std::string> layer_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (path.empty()) return args;
    std::size_t at = 1;
    if (at < args.size() && args[at] == "profile") ++at;
    if (at < args.size()) ++at;
    const auto tokens = config_tokens(path);
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(std::min(at, args.size())), tokens.begin(), tokens.end());
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-similar blow-up profiles and dynamic rescaling simulations for radial NLS"};
    app.set_version_flag("--version", BLOWUP_VERSION);
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    const std::string config_help = "key = value file; flags override it";

    auto* prof = app.add_subcommand("profile", "Profile equation: solve, continue, diagnose");
    prof->require_subcommand(1);

    SolveArgs sa;
    auto* solve = prof->add_subcommand("solve", "Shooting guess and Newton solve for Q");
    solve->add_option("--d", sa.d, "Dimension")->required();
    solve->add_option("--sigma", sa.sigma, "Nonlinearity exponent")->required();
    solve->add_option("--a0", sa.a0, "Initial guess for a")->required();
    solve->add_option("--q00", sa.q00, "Initial guess for Q(0)")->required();
    solve->add_option("--n", sa.n, "Chebyshev nodes")->capture_default_str();
    solve->add_option("--L_D", sa.domain_length, "Domain length")->capture_default_str();
    solve->add_option("--out", sa.out, "Profile file")->capture_default_str();
    solve->add_option("--config", config_help);

    ContinueArgs ca;
    auto* cont = prof->add_subcommand("continue", "Continuation in d, then sigma");
    cont->add_option("--from", ca.from, "Starting profile file")->required();
    cont->add_option("--target-d", ca.target_d, "Target dimension");
    cont->add_option("--target-sigma", ca.target_sigma, "Target sigma");
    cont->add_option("--step", ca.step, "Parameter step")->capture_default_str();
    cont->add_option("--min-step", ca.min_step, "Smallest step before stalling")->capture_default_str();
    cont->add_option("--out-dir", ca.out_dir, "Output directory")->capture_default_str();
    cont->add_option("--config", config_help);

    DiagnoseArgs da;
    auto* diag = prof->add_subcommand("diagnose", "Phase path, Hamiltonian, C0, identities, Volterra");
    diag->add_option("--profile", da.profile, "Profile file")->required();
    diag->add_option("--k-list", da.k_list, "Truncation radii for H(k)")->delimiter(',')->capture_default_str();
    diag->add_option("--xi-list", da.xi_list, "Radii for the identity residuals")->delimiter(',')->capture_default_str();
    diag->add_option("--out", da.out, "Report file")->capture_default_str();
    diag->add_option("--config", config_help);

    SimulateArgs ma;
    auto* sim = app.add_subcommand("simulate", "Dynamic rescaling run to blow-up");
    sim->set_help_flag("--help", "Print this help message and exit");
    sim->add_option("--d", ma.d, "Dimension")->required();
    sim->add_option("--sigma", ma.sigma, "Nonlinearity exponent")->required();
    sim->add_option("--init", ma.init, "Initial data, gaussian:A or rational:A")->required();
    sim->add_option("--h", ma.h, "Grid spacing (0.1)");
    sim->add_option("--dtau", ma.dtau, "Time step (1e-4 / 2^(sigma - 2))");
    sim->add_option("--L_D", ma.domain_length, "Domain length (100, or 200 for d >= 4)");
    sim->add_option("--bc", ma.bc, "exact-interpolation or adams-bashforth-ode")->capture_default_str();
    sim->add_option("--stop-L", ma.stop_L, "Stop once L falls below this (1e-24)");
    sim->add_option("--tau-max", ma.tau_max, "Cap on tau (2000)");
    sim->add_option("--record-every", ma.record_every, "Steps between trace records (100)");
    sim->add_option("--amplitude-tol", ma.amplitude_tol, "Allowed drift of sup |v| from 1 (1e-2)");
    sim->add_option("--not-blowing-up-steps", ma.not_blowing_up_steps, "Non-focusing steps before abort (1000)");
    sim->add_option("--profile", ma.profile, "Profile file for dist_to_Q");
    sim->add_option("--out", ma.out, "Trace file")->capture_default_str();
    sim->add_option("--config", config_help);

    AnalyzeArgs aa;
    auto* ana = app.add_subcommand("analyze", "Rate fit, relative error, a comparison");
    ana->add_option("--trace", aa.trace, "Trace file")->required();
    ana->add_option("--profile", aa.profile, "Profile file for the a comparison");
    ana->add_option("--fit-ln-L-max", aa.ln_L_max, "Upper end of the fit window in ln L")->capture_default_str();
    ana->add_option("--fit-L-min", aa.L_min, "Lower end of the fit window in L")->capture_default_str();
    ana->add_option("--fit-min-records", aa.min_records, "Records required in the window")->capture_default_str();
    ana->add_option("--out", aa.out, "Report file")->capture_default_str();
    ana->add_option("--config", config_help);

    std::vector<std::string> args(argv, argv + argc);
    try {
        args = layer_config(std::move(args));
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadFlags;
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kBadFlags;
    }

    try {
        if (solve->parsed()) return cmd_profile_solve(sa);
        if (cont->parsed()) return cmd_profile_continue(ca);
        if (diag->parsed()) return cmd_profile_diagnose(da);
        if (sim->parsed()) return cmd_simulate(ma);
        if (ana->parsed()) return cmd_analyze(aa);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kBadFlags;
}
