#pragma once

#include <iosfwd>
#include <string>

#include "blowup/profile/solver.hpp"

namespace blowup::profile {

/// Text table: header keys d, sigma, a, Q0, n, L_D, residual_norm, then
/// columns xi, P, W. Values carry 21 significant digits.
void write_profile(std::ostream& os, const ProfileSolution& sol);
void write_profile_file(const std::string& path, const ProfileSolution& sol);

/// Rebuilds the grid from (n, L_D) and checks the xi column against it.
/// Throws FileFormat on any inconsistency.
ProfileSolution read_profile(std::istream& is);
ProfileSolution read_profile_file(const std::string& path);

}  // namespace blowup::profile
