#include "dyadlab/weight_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "dyadlab/error.hpp"

namespace dyadlab {

void write_weight(std::ostream& os, const Weight& w) {
  const Lattice& lat = w.lattice();
  os << "WGT1 d=" << lat.dim << " L=" << lat.depth << '\n';
  const auto d = w.density();
  const Index per_line = lat.cells_per_axis();
  char buf[40];
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", d[i]);
    os << buf << (((static_cast<Index>(i) + 1) % per_line == 0) ? '\n' : ' ');
  }
}

void save_weight(const std::filesystem::path& path, const Weight& w) {
  std::ofstream os(path);
  if (!os) fail(ErrorKind::format, "cannot open '" + path.string() + "' for writing");
  write_weight(os, w);
  if (!os) fail(ErrorKind::format, "write to '" + path.string() + "' failed");
}

namespace {

int header_field(const std::string& token, const std::string& key) {
  if (token.rfind(key + "=", 0) != 0) {
    throw FormatError(ErrorKind::format, 1, "expected '" + key + "=<int>', got '" + token + "'");
  }
  const std::string digits = token.substr(key.size() + 1);
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(digits.c_str(), &end, 10);
  if (digits.empty() || *end != '\0' || errno != 0 || v < 0 || v > 64) {
    throw FormatError(ErrorKind::format, 1, "bad value in header field '" + token + "'");
  }
  return static_cast<int>(v);
}

}  // namespace

Weight read_weight(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError(ErrorKind::format, 1, "empty weight file");
  std::istringstream head(line);
  std::string magic, dtok, ltok, extra;
  head >> magic >> dtok >> ltok;
  if (magic != "WGT1") throw FormatError(ErrorKind::format, 1, "bad magic '" + magic + "'");
  const int dim = header_field(dtok, "d");
  const int depth = header_field(ltok, "L");
  if (head >> extra) throw FormatError(ErrorKind::format, 1, "trailing header token '" + extra + "'");
  Lattice lat;
  try {
    lat = make_lattice(dim, depth);
  } catch (const Error& e) {
    throw FormatError(ErrorKind::format, 1, e.what());
  }

  const auto expected = static_cast<std::size_t>(lat.cell_count());
  std::vector<double> values;
  values.reserve(expected);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream row(line);
    std::string tok;
    while (row >> tok) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (*end != '\0') {
        throw FormatError(ErrorKind::format, lineno, "cannot parse value '" + tok + "'");
      }
      if (values.size() == expected) {
        throw FormatError(ErrorKind::format, lineno,
                          "more than the " + std::to_string(expected) + " expected values");
      }
      if (!std::isfinite(v) || v < 0.0) {
        throw FormatError(ErrorKind::invalid_value, lineno,
                          "cell " + std::to_string(values.size()) + " has value " + tok +
                              "; densities must be finite and nonnegative");
      }
      values.push_back(v);
    }
  }
  if (values.size() != expected) {
    throw FormatError(ErrorKind::format, lineno,
                      "expected " + std::to_string(expected) + " values, found " +
                          std::to_string(values.size()));
  }
  return Weight(lat, std::move(values));
}

Weight load_weight(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::format, "cannot open weight file '" + path.string() + "'");
  try {
    return read_weight(is);
  } catch (const FormatError& e) {
    throw FormatError(e.kind(), e.line(), path.string() + ": " + std::string(e.what()).substr(
                                              std::string(e.what()).find(": ") + 2));
  }
}

}  // namespace dyadlab
