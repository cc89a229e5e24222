#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>

#include "generators.hpp"
#include "medrec/error.hpp"
#include "medrec/field_io.hpp"

namespace medrec {
namespace {

using testing::Gen;

TEST(FieldIo, ScalarRoundTripIsBitExact) {
  Gen gen(91);
  const StaggeredGrid grid(7);
  ScalarField f = gen.scalar(grid, -1e3, 1e3);
  f(0, 0) = 1e-300;
  f(1, 0) = -0.0;
  f(2, 0) = 0.1 + 0.2;
  std::stringstream ss;
  write_field(ss, f);
  const ScalarField g = read_scalar_field(ss);
  for (std::size_t k = 0; k < f.values().size(); ++k)
    EXPECT_EQ(std::bit_cast<std::uint64_t>(f.values()[k]), std::bit_cast<std::uint64_t>(g.values()[k]));
}

TEST(FieldIo, BoundaryAndMeasurementRoundTrip) {
  Gen gen(92);
  const StaggeredGrid grid(5);
  const BoundaryData b = gen.boundary(grid);
  std::stringstream ss;
  write_field(ss, b);
  EXPECT_TRUE(read_boundary_data(ss) == b);

  const MeasurementSet m{gen.boundary(grid), gen.boundary(grid)};
  std::stringstream ms;
  write_measurement(ms, m);
  const MeasurementSet r = read_measurement(ms);
  EXPECT_TRUE(r.neumann == m.neumann);
  EXPECT_TRUE(r.dirichlet == m.dirichlet);
}

TEST(FieldIo, FileRoundTrip) {
  Gen gen(93);
  const auto dir = std::filesystem::temp_directory_path() / "medrec_field_io_test";
  std::filesystem::create_directories(dir);
  const ScalarField f = gen.scalar(StaggeredGrid(6));
  save_field(dir / "f.field", f);
  EXPECT_TRUE(load_scalar_field(dir / "f.field") == f);
  EXPECT_THROW(load_scalar_field(dir / "missing.field"), Error);
  std::filesystem::remove_all(dir);
}

TEST(FieldIo, ParseErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      read_scalar_field(in, "test");
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("nonsense\n"), 1u);
  EXPECT_EQ(line_of("medrec-field 1\nkind boundary\nn 4\n"), 2u);
  EXPECT_EQ(line_of("medrec-field 1\nkind scalar\nn 2\n"), 3u);
  std::string body = "medrec-field 1\nkind scalar\nn 4\n";
  for (int k = 0; k < 16; ++k) body += (k == 5 ? "1.5x\n" : "1\n");
  EXPECT_EQ(line_of(body), 9u);
  EXPECT_EQ(line_of("medrec-field 1\nkind scalar\nn 4\n1\n2\n"), 6u);
}

TEST(FieldIo, NumberFormatting) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(parse_double("+2.5", "x", 1), 2.5);
  EXPECT_EQ(parse_double("1e-3", "x", 1), 1e-3);
  EXPECT_TRUE(std::isinf(parse_double(format_double(std::numeric_limits<double>::infinity()), "x", 1)));
  EXPECT_THROW(parse_double("", "x", 1), ParseError);
  EXPECT_THROW(parse_double("1,5", "x", 1), ParseError);
}

std::string render(const ScalarField& f) {
  std::ostringstream out;
  render_pgm(out, f);
  return out.str();
}

unsigned pixel(const std::string& pgm, std::size_t header, int index) {
  const auto hi = static_cast<unsigned char>(pgm[header + 2 * index]);
  const auto lo = static_cast<unsigned char>(pgm[header + 2 * index + 1]);
  return (hi << 8) | lo;
}

TEST(Pgm, ConstantFieldIsMidGray) {
  const std::string pgm = render(ScalarField(StaggeredGrid(4), 3.0));
  const std::string header = "P5\n4 4\n65535\n";
  ASSERT_EQ(pgm.substr(0, header.size()), header);
  ASSERT_EQ(pgm.size(), header.size() + 32);
  for (int k = 0; k < 16; ++k) EXPECT_EQ(pixel(pgm, header.size(), k), 32768u);
}

TEST(Pgm, TopRowIsTheTopOfTheDomain) {
  ScalarField f(StaggeredGrid(4), 0.0);
  f(0, 3) = 1.0;  // top-left cell
  const std::string pgm = render(f);
  const std::size_t header = std::string("P5\n4 4\n65535\n").size();
  EXPECT_EQ(pixel(pgm, header, 0), 65535u);
  EXPECT_EQ(pixel(pgm, header, 12), 0u);
}

TEST(KeyValueFiles, RoundTripAndErrors) {
  const KeyValues kv{{"alpha", "1"}, {"name", "ex1"}};
  std::stringstream ss;
  write_key_values(ss, kv);
  EXPECT_EQ(ss.str(), "alpha = 1\nname = ex1\n");
  EXPECT_EQ(read_key_values(ss), kv);

  std::istringstream comments("# header\n\n a =  b \n");
  EXPECT_EQ(read_key_values(comments).at("a"), "b");
  std::istringstream dup("a = 1\na = 2\n");
  try {
    read_key_values(dup);
    FAIL() << "duplicate key accepted";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream junk("no equals sign\n");
  EXPECT_THROW(read_key_values(junk), ParseError);
}

TEST(KeyValueFiles, MetricsReportKeys) {
  Metrics m;
  m.sigma.relative_l2_error = 0.25;
  m.sigma.inclusions.push_back({0.25, 0.65, 0.3, 0.6, 0.07});
  const KeyValues kv = metrics_report(m);
  EXPECT_EQ(kv.at("sigma.relative_l2_error"), "0.25");
  EXPECT_EQ(kv.at("sigma.inclusion0.center_error"), "0.07");
  EXPECT_EQ(kv.at("sigma.inclusion0.true_center"), "0.25,0.65");
  EXPECT_EQ(kv.at("mu.inclusions"), "0");
}

}  // namespace
}  // namespace medrec
