#include "blowup/profile/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "blowup/io/table.hpp"

namespace blowup::profile {

void write_profile(std::ostream& os, const ProfileSolution& sol) {
    using io::format_real;
    const auto& g = sol.grid();
    std::vector<std::vector<std::string>> rows;
    rows.reserve(sol.size());
    for (std::size_t k = 0; k < sol.size(); ++k)
        rows.push_back({format_real(g.nodes_ext()[k]), format_real(sol.p[k]), format_real(sol.w[k])});
    io::write_table(os,
                    {{"format", "blowup-profile 1"},
                     {"d", format_real(sol.params.d)},
                     {"sigma", format_real(sol.params.sigma)},
                     {"a", format_real(sol.a_ext)},
                     {"Q0", format_real(sol.p.front())},
                     {"n", std::to_string(sol.size())},
                     {"L_D", format_real(g.domain_length())},
                     {"residual_norm", format_real(sol.residual_norm)}},
                    {"xi", "P", "W"}, rows);
}

void write_profile_file(const std::string& path, const ProfileSolution& sol) {
    std::ostringstream os;
    write_profile(os, sol);
    io::write_text_file(path, os.str());
}

ProfileSolution read_profile(std::istream& is) {
    const io::Table t = io::read_table(is);
    if (t.require("format") != "blowup-profile 1") throw Error(ErrorCode::FileFormat, "not a profile file");
    const long long n = t.require_int("n");
    const double L = t.require_double("L_D");
    if (n < 8 || !(L > 0.0)) throw Error(ErrorCode::FileFormat, "invalid grid size in profile header");
    if (t.rows.size() != static_cast<std::size_t>(n))
        throw Error(ErrorCode::FileFormat, "profile row count does not match n");

    ProfileSolution sol;
    sol.params = {t.require_double("d"), t.require_double("sigma")};
    sol.disc = make_discretization(static_cast<std::size_t>(n), L);
    sol.a_ext = t.require_long_double("a");
    sol.residual_norm = t.require_double("residual_norm");
    const std::size_t cx = t.column("xi"), cp = t.column("P"), cw = t.column("W");
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        const long double xi = io::parse_long_double(t.rows[k][cx]);
        if (std::abs(xi - sol.disc->grid.nodes_ext()[k]) > 1e-12L * L)
            throw Error(ErrorCode::FileFormat, "xi column does not match the Chebyshev grid at row " + std::to_string(k));
        sol.p.push_back(io::parse_long_double(t.rows[k][cp]));
        sol.w.push_back(io::parse_long_double(t.rows[k][cw]));
    }
    for (const auto& v : sol.p)
        if (!std::isfinite(v)) throw Error(ErrorCode::FileFormat, "non-finite P value");
    for (const auto& v : sol.w)
        if (!std::isfinite(v)) throw Error(ErrorCode::FileFormat, "non-finite W value");
    return sol;
}

ProfileSolution read_profile_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FileFormat, "cannot open '" + path + "'");
    return read_profile(in);
}

}  // namespace blowup::profile
