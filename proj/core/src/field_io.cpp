#include "medrec/field_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "medrec/error.hpp"

namespace medrec {
namespace {

constexpr const char* kMagic = "medrec-field 1";

class LineReader {
 public:
  LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  std::string next(const char* expecting) {
    std::string line;
    ++line_;
    if (!std::getline(in_, line)) fail(std::string("unexpected end of input, expected ") + expecting);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_, what); }
  const std::string& source() const { return source_; }
  int line() const { return static_cast<int>(line_); }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

int read_header(LineReader& r, const std::string& kind) {
  if (r.next("header") != kMagic) r.fail(std::string("expected '") + kMagic + "'");
  const auto k = split(r.next("kind line"));
  if (k.size() != 2 || k[0] != "kind") r.fail("expected 'kind <name>'");
  if (k[1] != kind) r.fail("expected kind '" + kind + "', found '" + k[1] + "'");
  const auto n = split(r.next("size line"));
  if (n.size() != 2 || n[0] != "n") r.fail("expected 'n <cells>'");
  int cells = 0;
  const auto [ptr, ec] = std::from_chars(n[1].data(), n[1].data() + n[1].size(), cells);
  if (ec != std::errc() || ptr != n[1].data() + n[1].size() || cells < StaggeredGrid::kMinCells)
    r.fail("invalid grid size '" + n[1] + "'");
  return cells;
}

void write_header(std::ostream& out, const char* kind, int n) {
  out << kMagic << '\n' << "kind " << kind << '\n' << "n " << n << '\n';
}

std::vector<double> read_values(LineReader& r, std::size_t count) {
  std::vector<double> values(count);
  for (auto& v : values) {
    const auto toks = split(r.next("value"));
    if (toks.size() != 1) r.fail("expected one value per line");
    v = parse_double(toks[0], r.source(), r.line());
  }
  return values;
}

template <typename Fn>
void with_output(const std::filesystem::path& path, std::ios::openmode mode, Fn&& fn) {
  std::ofstream out(path, mode);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  fn(out);
  out.flush();
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error("number formatting failed");
  return std::string(buf, ptr);
}

double parse_double(const std::string& text, const std::string& source, int line) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ParseError(source, static_cast<std::size_t>(line), "invalid number '" + text + "'");
  return v;
}

void write_field(std::ostream& out, const ScalarField& field) {
  write_header(out, "scalar", field.n());
  for (double v : field.values()) out << format_double(v) << '\n';
}

void write_field(std::ostream& out, const BoundaryData& data) {
  write_header(out, "boundary", data.n());
  for (double v : data.values()) out << format_double(v) << '\n';
}

void write_measurement(std::ostream& out, const MeasurementSet& set) {
  require_same_grid(set.neumann.grid(), set.dirichlet.grid());
  write_header(out, "measurement", set.neumann.n());
  for (std::size_t k = 0; k < set.neumann.size(); ++k)
    out << format_double(set.neumann[k]) << ' ' << format_double(set.dirichlet[k]) << '\n';
}

ScalarField read_scalar_field(std::istream& in, const std::string& source) {
  LineReader r(in, source);
  const int n = read_header(r, "scalar");
  const StaggeredGrid grid(n);
  return ScalarField(grid, read_values(r, grid.cell_count()));
}

BoundaryData read_boundary_data(std::istream& in, const std::string& source) {
  LineReader r(in, source);
  const int n = read_header(r, "boundary");
  return BoundaryData(StaggeredGrid(n), read_values(r, 4 * static_cast<std::size_t>(n)));
}

MeasurementSet read_measurement(std::istream& in, const std::string& source) {
  LineReader r(in, source);
  const int n = read_header(r, "measurement");
  const StaggeredGrid grid(n);
  MeasurementSet set{BoundaryData(grid), BoundaryData(grid)};
  for (std::size_t k = 0; k < set.neumann.size(); ++k) {
    const auto toks = split(r.next("measurement pair"));
    if (toks.size() != 2) r.fail("expected 'h f' pair");
    set.neumann[k] = parse_double(toks[0], source, r.line());
    set.dirichlet[k] = parse_double(toks[1], source, r.line());
  }
  return set;
}

void save_field(const std::filesystem::path& path, const ScalarField& field) {
  with_output(path, std::ios::out | std::ios::trunc, [&](std::ostream& o) { write_field(o, field); });
}

void save_measurement(const std::filesystem::path& path, const MeasurementSet& set) {
  with_output(path, std::ios::out | std::ios::trunc,
              [&](std::ostream& o) { write_measurement(o, set); });
}

ScalarField load_scalar_field(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_scalar_field(in, path.string());
}

MeasurementSet load_measurement(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_measurement(in, path.string());
}

void render_pgm(std::ostream& out, const ScalarField& field) {
  const int n = field.n();
  const double lo = field.min();
  const double hi = field.max();
  out << "P5\n" << n << ' ' << n << "\n65535\n";
  for (int j = n - 1; j >= 0; --j) {
    for (int i = 0; i < n; ++i) {
      unsigned level = 32768;
      if (hi > lo) {
        const double t = (field(i, j) - lo) / (hi - lo);
        level = static_cast<unsigned>(std::lround(std::clamp(t, 0.0, 1.0) * 65535.0));
      }
      out.put(static_cast<char>((level >> 8) & 0xFF));
      out.put(static_cast<char>(level & 0xFF));
    }
  }
}

void save_pgm(const std::filesystem::path& path, const ScalarField& field) {
  with_output(path, std::ios::out | std::ios::trunc | std::ios::binary,
              [&](std::ostream& o) { render_pgm(o, field); });
}

KeyValues metrics_report(const Metrics& metrics) {
  KeyValues kv;
  auto add = [&](const std::string& prefix, const CoefficientMetrics& m) {
    kv[prefix + ".relative_l2_error"] = format_double(m.relative_l2_error);
    kv[prefix + ".support_jaccard"] = format_double(m.support_jaccard);
    kv[prefix + ".components"] = std::to_string(m.components);
    kv[prefix + ".inclusions"] = std::to_string(m.inclusions.size());
    for (std::size_t k = 0; k < m.inclusions.size(); ++k) {
      const auto& inc = m.inclusions[k];
      const std::string key = prefix + ".inclusion" + std::to_string(k);
      kv[key + ".true_center"] = format_double(inc.true_x) + "," + format_double(inc.true_y);
      kv[key + ".found_center"] = format_double(inc.found_x) + "," + format_double(inc.found_y);
      kv[key + ".center_error"] = format_double(inc.distance);
    }
  };
  add("sigma", metrics.sigma);
  add("mu", metrics.mu);
  return kv;
}

void write_key_values(std::ostream& out, const KeyValues& values) {
  for (const auto& [k, v] : values) out << k << " = " << v << '\n';
}

KeyValues read_key_values(std::istream& in, const std::string& source) {
  KeyValues kv;
  std::string line;
  std::size_t number = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(source, number, "expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ParseError(source, number, "empty key");
    if (kv.count(key)) throw ParseError(source, number, "duplicate key '" + key + "'");
    kv[key] = trim(t.substr(eq + 1));
  }
  return kv;
}

}  // namespace medrec
