#include "extham/trajectory_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "extham/errors.hpp"

namespace extham {

namespace {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string expected_header(std::size_t n) {
    std::string h = "param,t,e";
    for (std::size_t i = 1; i <= n; ++i) h += ",q" + std::to_string(i);
    for (std::size_t i = 1; i <= n; ++i) h += ",p" + std::to_string(i);
    h += ",He_residual";
    return h;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_field(const std::string& s, std::size_t line_no) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ConfigError("trajectory CSV: unparsable number '" + s + "' on line " +
                          std::to_string(line_no));
    return v;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const ExtendedHamiltonian& He) {
    const std::size_t n = traj.dimension();
    out << expected_header(n) << '\n';
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto& s = traj[i];
        out << fmt17(s.param) << ',' << fmt17(s.state.t) << ',' << fmt17(s.state.e);
        for (std::size_t k = 0; k < n; ++k) out << ',' << fmt17(s.state.q[k]);
        for (std::size_t k = 0; k < n; ++k) out << ',' << fmt17(s.state.p[k]);
        out << ',' << fmt17(He.eval(s.state)) << '\n';
    }
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const ExtendedHamiltonian& He) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open trajectory output file: " + path);
    write_trajectory_csv(f, traj, He);
    if (!f) throw ConfigError("failed writing trajectory file: " + path);
}

ReadTrajectory read_trajectory_csv(std::istream& in, ParameterKind kind) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("trajectory CSV: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    // Header fixes the dimension: param,t,e then n q's, n p's, He_residual.
    const std::size_t cols = split_csv(line).size();
    if (cols < 6 || (cols - 4) % 2 != 0)
        throw ConfigError("trajectory CSV: unrecognized header '" + line + "'");
    const std::size_t n = (cols - 4) / 2;
    if (line != expected_header(n))
        throw ConfigError("trajectory CSV: unrecognized header '" + line + "'");

    ReadTrajectory out(kind);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != cols)
            throw ConfigError("trajectory CSV: expected " + std::to_string(cols) +
                              " fields, got " + std::to_string(fields.size()) + " on line " +
                              std::to_string(line_no));
        ExtendedState st;
        const double param = parse_field(fields[0], line_no);
        st.t = parse_field(fields[1], line_no);
        st.e = parse_field(fields[2], line_no);
        st.q.resize(n);
        st.p.resize(n);
        for (std::size_t k = 0; k < n; ++k) st.q[k] = parse_field(fields[3 + k], line_no);
        for (std::size_t k = 0; k < n; ++k) st.p[k] = parse_field(fields[3 + n + k], line_no);
        out.he_residual.push_back(parse_field(fields[cols - 1], line_no));
        out.traj.push(param, std::move(st));
    }
    return out;
}

ReadTrajectory read_trajectory_csv(const std::string& path, ParameterKind kind) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open trajectory file: " + path);
    return read_trajectory_csv(f, kind);
}

}  // namespace extham
