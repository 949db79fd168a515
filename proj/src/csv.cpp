#include "quakeml/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "quakeml/errors.hpp"

namespace quakeml {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    out.push_back(field);
    return out;
}

double parse_double(const std::string& s, const char* what, std::size_t line) {
    double v;
    const char* b = s.data();
    const char* e = b + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    auto [p, ec] = std::from_chars(b, e, v);
    while (p < e && (*p == ' ' || *p == '\t')) ++p;
    if (ec != std::errc{} || p != e)
        throw ParseError(std::string("expected a number for ") + what +
                             ", got '" + s + "'",
                         line);
    if (!std::isfinite(v))
        throw ParseError(std::string("non-finite value for ") + what, line);
    return v;
}

void expect_header(const std::string& got, const std::string& want,
                   std::size_t line) {
    std::string g = got;
    if (!g.empty() && g.back() == '\r') g.pop_back();
    if (g != want)
        throw ParseError("expected header '" + want + "', got '" + g + "'", line);
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // prefer the shortest representation that round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char probe[32];
        std::snprintf(probe, sizeof probe, "%.*g", prec, v);
        double back;
        std::sscanf(probe, "%lf", &back);
        if (back == v) return probe;
    }
    return buf;
}

std::vector<Trigger> read_triggers(std::istream& in) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line))
        throw ParseError("empty trigger file", lineno);
    expect_header(line, "id,lat,lon,t", lineno);

    std::vector<Trigger> out;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split_line(line);
        if (f.size() != 4)
            throw ParseError("expected 4 fields (id,lat,lon,t), got " +
                                 std::to_string(f.size()),
                             lineno);
        Trigger t;
        t.id = f[0];
        t.location.lat = parse_double(f[1], "lat", lineno);
        t.location.lon = parse_double(f[2], "lon", lineno);
        t.time_s = parse_double(f[3], "t", lineno);
        if (!t.location.valid())
            throw ParseError("coordinates out of range", lineno);
        out.push_back(std::move(t));
    }
    if (out.empty()) throw ParseError("trigger file has no data rows", lineno);
    return out;
}

std::vector<Trigger> read_triggers_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'", 0);
    return read_triggers(in);
}

std::vector<Smartphone> read_roster(std::istream& in) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line))
        throw ParseError("empty roster file", lineno);
    expect_header(line, "id,lat,lon", lineno);

    std::vector<Smartphone> out;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split_line(line);
        if (f.size() != 3)
            throw ParseError("expected 3 fields (id,lat,lon), got " +
                                 std::to_string(f.size()),
                             lineno);
        Smartphone p;
        p.id = f[0];
        p.location.lat = parse_double(f[1], "lat", lineno);
        p.location.lon = parse_double(f[2], "lon", lineno);
        p.active = true;
        if (!p.location.valid())
            throw ParseError("coordinates out of range", lineno);
        out.push_back(std::move(p));
    }
    if (out.empty()) throw ParseError("roster file has no data rows", lineno);
    return out;
}

std::vector<Smartphone> read_roster_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'", 0);
    return read_roster(in);
}

void write_triggers(std::ostream& out, std::span<const Trigger> triggers) {
    out << "id,lat,lon,t\n";
    for (const auto& t : triggers)
        out << t.id << ',' << format_double(t.location.lat) << ','
            << format_double(t.location.lon) << ',' << format_double(t.time_s)
            << '\n';
}

void write_roster(std::ostream& out, std::span<const Smartphone> roster) {
    out << "id,lat,lon\n";
    for (const auto& p : roster)
        out << p.id << ',' << format_double(p.location.lat) << ','
            << format_double(p.location.lon) << '\n';
}

}  // namespace quakeml
