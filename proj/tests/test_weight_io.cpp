#include <doctest.h>

#include <sstream>

#include "dyadlab/error.hpp"
#include "dyadlab/weight_io.hpp"
#include "dyadlab/weights.hpp"

using namespace dyadlab;

TEST_CASE("write then read is exact") {
  const Weight w = gen_weight(make_lattice(2, 3), WeightSpec::lognormal(5, 1.0));
  std::stringstream ss;
  write_weight(ss, w);
  const Weight r = read_weight(ss);
  CHECK(r.lattice() == w.lattice());
  CHECK(std::equal(w.density().begin(), w.density().end(), r.density().begin()));
}

TEST_CASE("malformed files") {
  auto kind_of = [](const std::string& text) {
    std::istringstream is(text);
    try {
      read_weight(is);
    } catch (const FormatError& e) {
      return std::make_pair(e.kind(), e.line());
    }
    return std::make_pair(ErrorKind::contract, std::size_t{0});
  };
  CHECK(kind_of("WGT2 d=1 L=1\n1 1\n").first == ErrorKind::format);
  CHECK(kind_of("WGT1 d=1 L=1\n1\n").first == ErrorKind::format);  // one value short
  CHECK(kind_of("WGT1 d=1 L=1\n1 1 1\n").first == ErrorKind::format);
  CHECK(kind_of("WGT1 d=1 L=1\n1 x\n").first == ErrorKind::format);
  const auto neg = kind_of("WGT1 d=1 L=1\n1\n-2\n");
  CHECK(neg.first == ErrorKind::invalid_value);
  CHECK(neg.second == 3);
}

TEST_CASE("negative entry names the cell") {
  std::istringstream is("WGT1 d=1 L=1\n1 -2\n");
  try {
    read_weight(is);
    FAIL("expected error");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("cell 1") != std::string::npos);
  }
}

TEST_CASE("missing file is a format error with the path") {
  try {
    load_weight("/nonexistent/w.wgt");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::format);
    CHECK(std::string(e.what()).find("/nonexistent/w.wgt") != std::string::npos);
  }
}
