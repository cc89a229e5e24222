#pragma once

// Text serialization of fields and measurements, PGM rendering and key=value
// metric reports.
//
// Field files start with three header lines
//
//   medrec-field 1
//   kind scalar|boundary
//   n <cells per side>
//
// followed by the values, one per line, in storage order (row-major cells,
// or boundary order bottom, right, top, left). Numbers are written in the
// shortest form that round-trips exactly and parsed independently of locale.
// Measurement files use kind `measurement` and hold 4N lines of "h f" pairs.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "medrec/experiments.hpp"
#include "medrec/forward.hpp"
#include "medrec/grid.hpp"

namespace medrec {

void write_field(std::ostream& out, const ScalarField& field);
void write_field(std::ostream& out, const BoundaryData& data);
void write_measurement(std::ostream& out, const MeasurementSet& set);

// `source` names the input in ParseError messages.
ScalarField read_scalar_field(std::istream& in, const std::string& source = "<stream>");
BoundaryData read_boundary_data(std::istream& in, const std::string& source = "<stream>");
MeasurementSet read_measurement(std::istream& in, const std::string& source = "<stream>");

// File wrappers; I/O failures throw Error, malformed content ParseError.
void save_field(const std::filesystem::path& path, const ScalarField& field);
void save_measurement(const std::filesystem::path& path, const MeasurementSet& set);
ScalarField load_scalar_field(const std::filesystem::path& path);
MeasurementSet load_measurement(const std::filesystem::path& path);

// Binary 16-bit PGM (P5, maxval 65535). [min, max] maps linearly onto
// [0, 65535]; a constant field renders as mid gray. The first image row is
// the top of the domain (y = 1).
void render_pgm(std::ostream& out, const ScalarField& field);
void save_pgm(const std::filesystem::path& path, const ScalarField& field);

// Ordered key=value report, one pair per line.
using KeyValues = std::map<std::string, std::string>;
KeyValues metrics_report(const Metrics& metrics);
void write_key_values(std::ostream& out, const KeyValues& values);
KeyValues read_key_values(std::istream& in, const std::string& source = "<stream>");

std::string format_double(double value);
double parse_double(const std::string& text, const std::string& source, int line);

}  // namespace medrec
