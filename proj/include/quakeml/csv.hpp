#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "quakeml/detector.hpp"
#include "quakeml/estimation.hpp"

namespace quakeml {

// triggers.csv: header `id,lat,lon,t`, UTF-8, `.` decimal separator.
// The id column may be empty. Throws ParseError with a 1-based line number.
std::vector<Trigger> read_triggers(std::istream& in);
std::vector<Trigger> read_triggers_file(const std::string& path);

// roster.csv: header `id,lat,lon`. Every phone is read as active.
std::vector<Smartphone> read_roster(std::istream& in);
std::vector<Smartphone> read_roster_file(const std::string& path);

void write_triggers(std::ostream& out, std::span<const Trigger> triggers);
void write_roster(std::ostream& out, std::span<const Smartphone> roster);

// Shortest decimal that round-trips a double.
std::string format_double(double v);

}  // namespace quakeml
