#include "icefloe/traj_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "icefloe/errors.hpp"

namespace icefloe::io {

void atomic_write_text(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp + " for writing");
        out.write(content.data(), std::streamsize(content.size()));
        if (!out) throw IoError("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("cannot move " + tmp + " to " + path);
    }
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

void append_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

void append_list(std::string& out, const Vec& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        append_double(out, values[i]);
    }
}

}  // namespace

std::string format_trajectory(const Trajectory& traj, const std::string& config_comment) {
    const int n = traj.n_floes();
    std::string out;
    out.reserve(std::size_t(traj.n_states()) * std::size_t(2 * n + 1) * 20 + 256);
    out += "# n_floes=" + std::to_string(n) + " dt=";
    append_double(out, traj.dt);
    out += " domain=";
    append_double(out, traj.system.domain_left);
    out += ',';
    append_double(out, traj.system.domain_right);
    out += " radii=";
    append_list(out, traj.system.radius);
    out += " thickness=";
    append_list(out, traj.system.thickness);
    out += '\n';
    if (!config_comment.empty()) out += "# config=" + config_comment + "\n";
    out += 't';
    for (int i = 0; i < n; ++i) out += ",x_" + std::to_string(i);
    for (int i = 0; i < n; ++i) out += ",v_" + std::to_string(i);
    out += '\n';
    for (const SimState& s : traj.states) {
        out += std::to_string(s.time_index);
        for (double x : s.x) {
            out += ',';
            append_double(out, x);
        }
        for (double v : s.v) {
            out += ',';
            append_double(out, v);
        }
        out += '\n';
    }
    return out;
}

void write_trajectory(const std::string& path, const Trajectory& traj,
                      const std::string& config_comment) {
    atomic_write_text(path, format_trajectory(traj, config_comment));
}

namespace {

Vec parse_list(const std::string& text) {
    Vec out;
    const char* p = text.c_str();
    while (*p) {
        char* end = nullptr;
        out.push_back(std::strtod(p, &end));
        if (end == p) throw IoError("trajectory header: bad numeric list '" + text + "'");
        p = end;
        if (*p == ',') ++p;
    }
    return out;
}

std::string header_field(const std::string& header, const std::string& key) {
    const std::string token = key + "=";
    const std::size_t at = header.find(token);
    if (at == std::string::npos)
        throw IoError("trajectory header: missing field '" + key + "'");
    const std::size_t start = at + token.size();
    std::size_t end = header.find(' ', start);
    if (end == std::string::npos) end = header.size();
    return header.substr(start, end - start);
}

}  // namespace

Trajectory read_trajectory(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
        throw IoError(path + ": missing trajectory header line");

    const int n = int(std::strtol(header_field(line, "n_floes").c_str(), nullptr, 10));
    if (n < 1) throw IoError(path + ": bad n_floes");
    const double dt = std::strtod(header_field(line, "dt").c_str(), nullptr);
    const Vec domain = parse_list(header_field(line, "domain"));
    if (domain.size() != 2) throw IoError(path + ": domain must be two values");
    const Vec radii = parse_list(header_field(line, "radii"));
    const Vec thickness = parse_list(header_field(line, "thickness"));
    if (int(radii.size()) != n || int(thickness.size()) != n)
        throw IoError(path + ": radii/thickness length mismatch");

    Trajectory traj;
    traj.dt = dt;
    traj.system.n_floes = n;
    traj.system.radius = radii;
    traj.system.thickness = thickness;
    traj.system.mass.resize(std::size_t(n));
    for (int i = 0; i < n; ++i)
        traj.system.mass[std::size_t(i)] =
            M_PI * radii[std::size_t(i)] * radii[std::size_t(i)] * thickness[std::size_t(i)];
    traj.system.domain_left = domain[0];
    traj.system.domain_right = domain[1];

    bool saw_column_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') continue;  // provenance comments
        if (!saw_column_header) {
            if (line.rfind("t,", 0) != 0) throw IoError(path + ": missing column header");
            saw_column_header = true;
            continue;
        }
        SimState s;
        const char* p = line.c_str();
        char* end = nullptr;
        s.time_index = std::strtol(p, &end, 10);
        if (end == p) throw IoError(path + ": bad row '" + line + "'");
        p = end;
        s.x.resize(std::size_t(n));
        s.v.resize(std::size_t(n));
        for (int col = 0; col < 2 * n; ++col) {
            if (*p != ',') throw IoError(path + ": short row '" + line + "'");
            ++p;
            const double v = std::strtod(p, &end);
            if (end == p) throw IoError(path + ": bad value in row '" + line + "'");
            p = end;
            if (col < n)
                s.x[std::size_t(col)] = v;
            else
                s.v[std::size_t(col - n)] = v;
        }
        if (!traj.states.empty() &&
            s.time_index != traj.states.back().time_index + 1)
            throw IoError(path + ": non-consecutive step indices");
        traj.states.push_back(std::move(s));
    }
    if (traj.states.empty()) throw IoError(path + ": no states");
    return traj;
}

}  // namespace icefloe::io
