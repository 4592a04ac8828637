#include "dyadlab/weights.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "dyadlab/doubling.hpp"
#include "dyadlab/error.hpp"
#include "dyadlab/random.hpp"

namespace dyadlab {

WeightSpec WeightSpec::constant(double c) {
  WeightSpec s;
  s.kind = Kind::constant;
  s.value = c;
  return s;
}

WeightSpec WeightSpec::power(double a) {
  WeightSpec s;
  s.kind = Kind::power;
  s.value = a;
  return s;
}

WeightSpec WeightSpec::halfspace_cutoff(WeightSpec base) {
  WeightSpec s;
  s.kind = Kind::halfspace_cutoff;
  s.base = std::make_shared<const WeightSpec>(std::move(base));
  return s;
}

WeightSpec WeightSpec::checkerboard(int level, double contrast) {
  WeightSpec s;
  s.kind = Kind::checkerboard;
  s.level = level;
  s.contrast = contrast;
  return s;
}

WeightSpec WeightSpec::lognormal(std::uint64_t seed, double roughness, int base_depth) {
  WeightSpec s;
  s.kind = Kind::lognormal;
  s.seed = seed;
  s.roughness = roughness;
  s.base_depth = base_depth;
  return s;
}

WeightSpec WeightSpec::strong_rd(double beta, std::uint64_t seed) {
  WeightSpec s;
  s.kind = Kind::strong_rd;
  s.value = beta;
  s.seed = seed;
  return s;
}

std::string WeightSpec::str() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::constant: os << "constant:" << value; break;
    case Kind::power: os << "power:" << value; break;
    case Kind::halfspace_cutoff: os << "halfspace:" << (base ? base->str() : "?"); break;
    case Kind::checkerboard: os << "checkerboard:" << level << ':' << contrast; break;
    case Kind::lognormal:
      os << "lognormal:" << seed << ':' << roughness;
      if (base_depth >= 0) os << ':' << base_depth;
      break;
    case Kind::strong_rd: os << "strong-rd:" << value << ':' << seed; break;
  }
  return os.str();
}

namespace {

std::vector<std::string> split_once(const std::string& text) {
  const auto pos = text.find(':');
  if (pos == std::string::npos) return {text};
  return {text.substr(0, pos), text.substr(pos + 1)};
}

std::vector<std::string> split_all(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

double to_double(const std::string& s, const std::string& ctx) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::domain, "cannot parse number '" + s + "' in weight spec " + ctx);
  }
}

std::uint64_t to_u64(const std::string& s, const std::string& ctx) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::domain, "cannot parse integer '" + s + "' in weight spec " + ctx);
  }
}

}  // namespace

WeightSpec parse_weight_spec(const std::string& text) {
  const auto head = split_once(text);
  const std::string& name = head[0];
  if (name == "halfspace" || name == "halfspace_cutoff") {
    if (head.size() < 2) fail(ErrorKind::domain, "halfspace needs a base spec");
    return WeightSpec::halfspace_cutoff(parse_weight_spec(head[1]));
  }
  const auto parts = split_all(text);
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (parts.size() - 1 < lo || parts.size() - 1 > hi) {
      fail(ErrorKind::domain, "wrong number of parameters in weight spec '" + text + "'");
    }
  };
  if (name == "constant") {
    need(1, 1);
    return WeightSpec::constant(to_double(parts[1], text));
  }
  if (name == "power") {
    need(1, 1);
    return WeightSpec::power(to_double(parts[1], text));
  }
  if (name == "checkerboard") {
    need(2, 2);
    return WeightSpec::checkerboard(static_cast<int>(to_u64(parts[1], text)),
                                    to_double(parts[2], text));
  }
  if (name == "lognormal" || name == "random_lognormal") {
    need(2, 3);
    const int base = parts.size() == 4 ? static_cast<int>(to_u64(parts[3], text)) : -1;
    return WeightSpec::lognormal(to_u64(parts[1], text), to_double(parts[2], text), base);
  }
  if (name == "strong-rd" || name == "strong_rd") {
    need(2, 2);
    return WeightSpec::strong_rd(to_double(parts[1], text), to_u64(parts[2], text));
  }
  fail(ErrorKind::domain, "unknown weight kind '" + name + "'");
}

namespace {

Point cell_center(const Lattice& lat, const Coords& c) {
  Point x{};
  const double h = lat.cell_side();
  for (int k = 0; k < lat.dim; ++k) x[k] = (static_cast<double>(c[k]) + 0.5) * h;
  return x;
}

// One axis of a strong_rd weight: exp(A * sum_j c_j sin(2 pi k_j x + phi_j)).
std::vector<double> smooth_factor(int depth, double amplitude, Rng& rng) {
  constexpr int kModes = 3;
  std::array<double, kModes> coef{}, freq{}, phase{};
  double lipschitz = 0.0;
  for (int j = 0; j < kModes; ++j) {
    coef[j] = rng.normal();
    freq[j] = static_cast<double>(1 + rng.below(4));
    phase[j] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    lipschitz += std::abs(coef[j]) * 2.0 * std::numbers::pi * freq[j];
  }
  const Index n = Index{1} << depth;
  std::vector<double> v(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    double s = 0.0;
    for (int j = 0; j < kModes; ++j) s += coef[j] * std::sin(2.0 * std::numbers::pi * freq[j] * x + phase[j]);
    v[i] = std::exp(amplitude * s / lipschitz);
  }
  return v;
}

std::vector<double> strong_rd_factor(int depth, double beta, std::uint64_t seed) {
  const Lattice line = make_lattice(1, depth);
  // Log-Lipschitz constant 4 log(beta / (1 - beta)) is usually too rough;
  // halving converges to the constant weight, whose fraction is exactly 1/2.
  double amplitude = 4.0 * std::log(beta / (1.0 - beta));
  for (int attempt = 0; attempt < 40; ++attempt) {
    Rng draw(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    auto v = smooth_factor(depth, amplitude, draw);
    if (depth < 2) return v;
    const Weight w(line, v);
    const DoublingReport rep = doubling_report(w, DoublingMode::strong);
    if (rep.strong_beta && *rep.strong_beta <= beta) return v;
    amplitude *= 0.5;
  }
  return std::vector<double>(std::size_t{1} << depth, 1.0);
}

}  // namespace

Weight gen_weight(const Lattice& lat, const WeightSpec& spec) {
  const auto count = static_cast<std::size_t>(lat.cell_count());
  std::vector<double> d(count, 0.0);
  switch (spec.kind) {
    case WeightSpec::Kind::constant: {
      if (!(spec.value >= 0.0)) fail(ErrorKind::domain, "constant weight must be >= 0");
      std::fill(d.begin(), d.end(), spec.value);
      break;
    }
    case WeightSpec::Kind::power: {
      const double a = spec.value;
      if (!(a > -1.0)) {
        fail(ErrorKind::domain, "non-integrable power weight |x-x0|^a with a = " +
                                    std::to_string(a) + " (need a > -1)");
      }
      for (Index i = 0; i < lat.cell_count(); ++i) {
        const Point x = cell_center(lat, lat.unflat(i));
        double r2 = 0.0;
        for (int k = 0; k < lat.dim; ++k) r2 += (x[k] - spec.center[k]) * (x[k] - spec.center[k]);
        if (r2 == 0.0 && a < 0.0) {
          fail(ErrorKind::domain, "power weight is singular at a cell center");
        }
        d[i] = a == 0.0 ? 1.0 : std::pow(std::sqrt(r2), a);
      }
      break;
    }
    case WeightSpec::Kind::halfspace_cutoff: {
      if (!spec.base) fail(ErrorKind::domain, "halfspace cutoff without a base weight");
      const Weight base = gen_weight(lat, *spec.base);
      const auto b = base.density();
      for (Index i = 0; i < lat.cell_count(); ++i) {
        const Point x = cell_center(lat, lat.unflat(i));
        bool inside = true;
        for (int k = 0; k < lat.dim; ++k) inside = inside && x[k] >= 0.5;
        d[i] = inside ? b[i] : 0.0;
      }
      break;
    }
    case WeightSpec::Kind::checkerboard: {
      if (spec.level < 0) fail(ErrorKind::domain, "checkerboard level must be >= 0");
      if (!(spec.contrast >= 0.0)) fail(ErrorKind::domain, "checkerboard contrast must be >= 0");
      const int shift = lat.depth - std::min(spec.level, lat.depth);
      for (Index i = 0; i < lat.cell_count(); ++i) {
        const Coords c = lat.unflat(i);
        Index parity = 0;
        for (int k = 0; k < lat.dim; ++k) parity += c[k] >> shift;
        d[i] = (parity % 2 == 0) ? 1.0 : spec.contrast;
      }
      break;
    }
    case WeightSpec::Kind::lognormal: {
      if (!(spec.roughness >= 0.0)) fail(ErrorKind::domain, "roughness must be >= 0");
      const int base_depth = spec.base_depth < 0 ? lat.depth : std::min(spec.base_depth, lat.depth);
      const Lattice coarse = make_lattice(lat.dim, base_depth);
      Rng rng(derive_seed(spec.seed, 0));
      std::vector<double> v(static_cast<std::size_t>(coarse.cell_count()));
      for (auto& x : v) x = std::exp(spec.roughness * rng.normal());
      return refine(Weight(coarse, std::move(v)), lat.depth);
    }
    case WeightSpec::Kind::strong_rd: {
      const double beta = spec.value;
      if (!(beta > 0.5 && beta < 1.0)) {
        fail(ErrorKind::domain, "strong reverse doubling generator needs 1/2 < beta < 1");
      }
      std::vector<std::vector<double>> factors;
      for (int k = 0; k < lat.dim; ++k) {
        factors.push_back(strong_rd_factor(lat.depth, beta, derive_seed(spec.seed, 1000 + k)));
      }
      for (Index i = 0; i < lat.cell_count(); ++i) {
        const Coords c = lat.unflat(i);
        double v = 1.0;
        for (int k = 0; k < lat.dim; ++k) v *= factors[k][c[k]];
        d[i] = v;
      }
      break;
    }
  }
  return Weight(lat, std::move(d));
}

}  // namespace dyadlab
