#include "blowup/simulator/trace_io.hpp"

#include <fstream>
#include <sstream>

#include "blowup/io/table.hpp"

namespace blowup::simulator {

namespace {

constexpr const char* kFormat = "blowup-trace 1";

std::string fmt(double v) { return io::format_real(v); }

}  // namespace

void write_trace(std::ostream& os, const SimulationTrace& trace) {
    const auto& c = trace.config;
    const std::vector<std::pair<std::string, std::string>> meta{
        {"format", kFormat},
        {"d", fmt(c.params.d)},
        {"sigma", fmt(c.params.sigma)},
        {"h", fmt(c.h)},
        {"dtau", fmt(c.dtau)},
        {"L_D", fmt(c.domain_length)},
        {"stop_L", fmt(c.stop_L)},
        {"tau_max", fmt(c.tau_max)},
        {"bc", to_string(c.bc_kind)},
        {"record_every", std::to_string(c.record_every)},
        {"amplitude_tol", fmt(c.amplitude_tol)},
        {"not_blowing_up_steps", std::to_string(c.not_blowing_up_steps)},
        {"initial_data", trace.initial_data.empty() ? "custom" : trace.initial_data},
        {"ln_L0", fmt(trace.ln_L0)},
        {"T", fmt(trace.T)},
        {"a_end", fmt(trace.a_end)},
        {"steps", std::to_string(trace.steps)},
        {"reached_stop", trace.reached_stop ? "1" : "0"},
    };
    std::vector<std::vector<std::string>> rows;
    rows.reserve(trace.records.size());
    for (const auto& r : trace.records)
        rows.push_back({std::to_string(r.step_index), fmt(r.tau), fmt(r.delta_t), fmt(r.ln_L), fmt(r.a), fmt(r.sup_v),
                        r.dist_to_q ? fmt(*r.dist_to_q) : std::string()});
    io::write_table(os, meta, {"step_index", "tau", "delta_t", "ln_L", "a", "sup_v", "dist_to_Q"}, rows);
}

void write_trace_file(const std::string& path, const SimulationTrace& trace) {
    std::ostringstream os;
    write_trace(os, trace);
    io::write_text_file(path, os.str());
}

SimulationTrace read_trace(std::istream& is) {
    const io::Table t = io::read_table(is);
    if (t.require("format") != kFormat) throw Error(ErrorCode::FileFormat, "not a trace file");
    SimulationTrace tr;
    auto& c = tr.config;
    c.params = {t.require_double("d"), t.require_double("sigma")};
    c.h = t.require_double("h");
    c.dtau = t.require_double("dtau");
    c.domain_length = t.require_double("L_D");
    c.stop_L = t.require_double("stop_L");
    c.tau_max = t.require_double("tau_max");
    try {
        c.bc_kind = parse_boundary_kind(t.require("bc"));
    } catch (const Error& e) {
        throw Error(ErrorCode::FileFormat, e.what());
    }
    c.record_every = static_cast<int>(t.require_int("record_every"));
    c.amplitude_tol = t.require_double("amplitude_tol");
    c.not_blowing_up_steps = static_cast<int>(t.require_int("not_blowing_up_steps"));
    tr.initial_data = t.require("initial_data");
    tr.ln_L0 = t.require_double("ln_L0");
    tr.T = t.require_double("T");
    tr.a_end = t.require_double("a_end");
    tr.steps = t.require_int("steps");
    tr.reached_stop = t.require_int("reached_stop") != 0;

    const std::size_t cs = t.column("step_index"), ct = t.column("tau"), cdt = t.column("delta_t"),
                      cl = t.column("ln_L"), ca = t.column("a"), cv = t.column("sup_v"), cq = t.column("dist_to_Q");
    for (const auto& row : t.rows) {
        TraceRecord r;
        try {
            r.step_index = std::stoll(row[cs]);
        } catch (const std::exception&) {
            throw Error(ErrorCode::FileFormat, "malformed step index '" + row[cs] + "'");
        }
        r.tau = io::parse_double(row[ct]);
        r.delta_t = io::parse_double(row[cdt]);
        r.ln_L = io::parse_double(row[cl]);
        r.a = io::parse_double(row[ca]);
        r.sup_v = io::parse_double(row[cv]);
        if (!row[cq].empty()) r.dist_to_q = io::parse_double(row[cq]);
        tr.records.push_back(r);
    }
    return tr;
}

SimulationTrace read_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FileFormat, "cannot open '" + path + "'");
    return read_trace(in);
}

}  // namespace blowup::simulator
