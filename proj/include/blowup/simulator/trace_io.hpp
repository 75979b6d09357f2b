#pragma once

#include <iosfwd>
#include <string>

#include "blowup/simulator/simulator.hpp"

namespace blowup::simulator {

/// Tab-separated trace: header keys carry the full SimConfig plus T, a_end,
/// steps and reached_stop; columns are step_index, tau, delta_t, ln_L, a,
/// sup_v, dist_to_Q (empty when absent).
void write_trace(std::ostream& os, const SimulationTrace& trace);
void write_trace_file(const std::string& path, const SimulationTrace& trace);

/// Throws FileFormat on malformed input.
SimulationTrace read_trace(std::istream& is);
SimulationTrace read_trace_file(const std::string& path);

}  // namespace blowup::simulator
