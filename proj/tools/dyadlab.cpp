// Command-line front end. Exit codes: 0 ok, 1 verification failure,
// 2 configuration error, 3 I/O or file-format error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dyadlab/bump.hpp"
#include "dyadlab/doubling.hpp"
#include "dyadlab/embed.hpp"
#include "dyadlab/error.hpp"
#include "dyadlab/forms.hpp"
#include "dyadlab/grids.hpp"
#include "dyadlab/random.hpp"
#include "dyadlab/suite.hpp"
#include "dyadlab/weight_io.hpp"
#include "dyadlab/weights.hpp"

using namespace dyadlab;
using Row = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerify = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct Globals {
  int depth = 8;
  std::uint64_t seed = 7;
  std::string out;
  std::string format = "csv";
};

struct ComputeArgs {
  std::string quantity;
  std::string sigma, omega, weight, function;
  std::string kind = "product_bump";
  std::string mode = "cube";
  double p = 2.0, q = 4.0, theta = 1.0, alpha = 0.5, beta = 0.5, rho = 2.0;
  int m = 0;
  std::optional<double> r, s;
  double eps = 0.25;
  int good_r = 8;
  bool dyadic_only = false;
  double rd_beta = 0.75;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Row num_json(double v) { return std::isfinite(v) ? Row(v) : Row(v > 0 ? "inf" : (v < 0 ? "-inf" : "nan")); }

std::string csv_cell(const Row& v) {
  std::string s;
  if (v.is_string()) s = v.get<std::string>();
  else if (v.is_number_float()) s = num(v.get<double>());
  else s = v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void write_table(std::ostream& os, const std::vector<Row>& rows, const std::string& format) {
  if (format == "json") {
    os << Row(rows).dump(2) << '\n';
    return;
  }
  if (rows.empty()) return;
  bool first = true;
  for (const auto& [key, _] : rows.front().items()) {
    os << (first ? "" : ",") << key;
    first = false;
  }
  os << '\n';
  for (const Row& r : rows) {
    first = true;
    for (const auto& [_, v] : r.items()) {
      os << (first ? "" : ",") << csv_cell(v);
      first = false;
    }
    os << '\n';
  }
}

template <class Fn>
void with_output(const Globals& g, Fn&& fn) {
  if (g.out.empty() || g.out == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream os(g.out);
  if (!os) fail(ErrorKind::format, "cannot open '" + g.out + "' for writing");
  fn(os);
  if (!os) fail(ErrorKind::format, "write to '" + g.out + "' failed");
}

Weight need_weight(const std::string& path, const char* flag) {
  if (path.empty()) fail(ErrorKind::precondition, std::string("missing ") + flag);
  return load_weight(path);
}

Exponents exponents_of(const ComputeArgs& a, int dim) {
  Exponents e;
  e.p = a.p;
  e.q = a.q;
  e.theta = a.theta;
  e.alpha = a.alpha;
  e.beta = a.beta;
  e.m = a.m > 0 ? a.m : std::max(1, dim / 2);
  e.n = dim - e.m;
  e.r = a.r;
  e.s = a.s;
  return e;
}

std::string witness_str(const RatioWitness& w) {
  return "outer=" + w.outer.str() + " inner=" + w.inner.str();
}

std::vector<Row> compute(const ComputeArgs& a) {
  std::vector<Row> rows;
  const std::string& what = a.quantity;
  if (what == "characteristic") {
    const Weight sigma = need_weight(a.sigma, "--sigma");
    const Weight omega = need_weight(a.omega, "--omega");
    if (!(sigma.lattice() == omega.lattice())) fail(ErrorKind::shape, "sigma and omega lattices differ");
    const int dim = sigma.lattice().dim;
    const CharKind kind = parse_char_kind(a.kind);
    Exponents e = exponents_of(a, dim);
    CharOptions opts;
    opts.include_shifted = !a.dyadic_only;
    std::optional<RectFamily> fam;
    if (kind == CharKind::one_param) {
      e.m = dim;
      e.n = 0;
      e.validate();
      opts.one_param_m = a.m;
      fam = dyadic_cube_family(dim, sigma.lattice().depth);
    } else {
      if (e.n < 1) fail(ErrorKind::domain, "rectangle characteristics need dimension >= 2");
      e.validate();
      fam = dyadic_rect_family(e.m, e.n, sigma.lattice().depth);
    }
    const KernelHandle K = kind == CharKind::one_param
                               ? KernelHandle::product_frac(e.alpha, 0.5, e.m, 1)
                               : KernelHandle::product_frac(e.alpha, e.beta, e.m, e.n);
    const CharResult c = characteristic(kind, K, sigma, omega, e, *fam, opts);
    Row r;
    r["quantity"] = "characteristic";
    r["kind"] = to_string(kind);
    r["value"] = num_json(c.value);
    r["witness"] = c.witness ? c.witness->str() : "-";
    r["family_size"] = c.family_size;
    rows.push_back(r);
  } else if (what == "doubling") {
    const Weight w = need_weight(a.weight, "--weight");
    const DoublingMode mode = parse_doubling_mode(a.mode);
    const DoublingReport rep = doubling_report(w, mode, a.m);
    Row r;
    r["quantity"] = "doubling";
    r["mode"] = to_string(mode);
    if (mode == DoublingMode::cube || mode == DoublingMode::rectangle) {
      r["doubling"] = rep.doubling_constant ? num_json(*rep.doubling_constant) : Row("-");
      r["doubling_witness"] = witness_str(rep.doubling_witness);
    }
    if (rep.reverse) {
      r["reverse_holds"] = rep.reverse->holds();
      r["eps1"] = num_json(rep.reverse->eps1);
      r["eps2"] = num_json(rep.reverse->eps2);
      r["C"] = num_json(rep.reverse->C);
      r["reverse_witness"] = witness_str(rep.reverse->constant_witness);
    }
    if (mode == DoublingMode::strong) {
      r["strong_beta"] = rep.strong_beta ? num_json(*rep.strong_beta) : Row("ABSENT");
      r["strong_witness"] = witness_str(rep.strong_witness);
    }
    r["scanned"] = rep.scanned;
    rows.push_back(r);
  } else if (what == "carleson") {
    const Weight w = need_weight(a.weight, "--weight");
    CarlesonReport rep;
    std::string variant;
    if (a.mode == "good") {
      const GoodnessParams gp{a.eps, a.good_r};
      validate(gp);
      const DoublingReport dr = doubling_report(w, DoublingMode::cube);
      rep = good_carleson_worst(w, a.rho, gp, *dr.reverse);
      variant = "good";
    } else {
      rep = automatic_carleson_worst(w, a.theta, a.rho);
      variant = "automatic";
    }
    Row r;
    r["quantity"] = "carleson";
    r["variant"] = variant;
    r["ratio"] = num_json(rep.ratio);
    r["lhs"] = num_json(rep.lhs_sum);
    r["rhs"] = num_json(rep.rhs_bound);
    r["constant"] = num_json(rep.explicit_constant);
    r["witness"] = rep.witness.str();
    r["parents"] = rep.parents;
    r["pass"] = rep.pass();
    rows.push_back(r);
  } else if (what == "embed") {
    const Weight w = need_weight(a.weight, "--weight");
    if (a.function.empty()) fail(ErrorKind::precondition, "missing --function");
    const Weight fw = load_weight(a.function);
    if (!(fw.lattice() == w.lattice())) fail(ErrorKind::shape, "function and weight lattices differ");
    const GridFunction f(fw.lattice(), std::vector<double>(fw.density().begin(), fw.density().end()));
    const double r_exp = a.r.value_or(4.0), s_exp = a.s.value_or(2.0);
    Row r;
    r["quantity"] = "embed";
    if (a.mode == "rect") {
      const int first = a.m > 0 ? a.m : std::max(1, w.lattice().dim / 2);
      const RectEmbedResult res = embed_check_rects(f, w, a.theta, r_exp, s_exp, first);
      r["shape"] = "rect";
      r["lhs"] = num_json(res.result.lhs);
      r["norm"] = num_json(res.result.rhs_norm);
      r["ratio"] = num_json(res.result.ratio);
      r["chain_holds"] = res.chain_holds();
    } else {
      const EmbedResult res = embed_check_cubes(f, w, a.theta, r_exp, s_exp);
      r["shape"] = "cube";
      r["lhs"] = num_json(res.lhs);
      r["norm"] = num_json(res.rhs_norm);
      r["ratio"] = num_json(res.ratio);
    }
    rows.push_back(r);
  } else if (what == "strong-rd-bound") {
    if (!(a.rd_beta > 0.0 && a.rd_beta < 1.0)) fail(ErrorKind::domain, "strong reverse doubling needs 0 < beta < 1");
    const StrongRdBound b = strong_rd_doubling_bound(a.rd_beta);
    Row r;
    r["quantity"] = "strong-rd-bound";
    r["beta"] = a.rd_beta;
    r["N"] = b.N;
    r["gamma"] = num_json(b.gamma);
    r["M"] = b.M;
    r["C"] = num_json(b.C);
    rows.push_back(r);
  } else {
    fail(ErrorKind::precondition, "unknown quantity '" + what + "'");
  }
  return rows;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::format:
      return kExitIo;
    default:
      return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dyadlab: dyadic weight lab"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--depth", g.depth, "Lattice depth L")->check(CLI::Range(0, 24));
  app.add_option("--seed", g.seed, "Root seed");
  app.add_option("--out", g.out, "Output path (default stdout)");
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* gen = app.add_subcommand("gen-weight", "Generate a weight file");
  std::string spec_text;
  int gen_dim = 1;
  gen->add_option("--spec", spec_text, "constant:c, power:a, halfspace:<spec>, checkerboard:l:c, "
                                       "lognormal:seed:rough[:base], strong-rd:beta:seed")
      ->required();
  gen->add_option("--dim", gen_dim, "Dimension")->check(CLI::Range(1, kMaxDim));

  auto* comp = app.add_subcommand("compute", "Compute one quantity");
  ComputeArgs ca;
  comp->add_option("quantity", ca.quantity, "characteristic, doubling, carleson, embed, strong-rd-bound")
      ->required();
  comp->add_option("--sigma", ca.sigma);
  comp->add_option("--omega", ca.omega);
  comp->add_option("--weight", ca.weight);
  comp->add_option("--function", ca.function, "WGT1 file read as a function");
  comp->add_option("--kind", ca.kind, "one_param, product_bump, half_bump_omega, no_bump");
  comp->add_option("--mode", ca.mode, "doubling: cube, rectangle, product_reverse, strong; "
                                      "carleson: automatic, good; embed: cube, rect");
  comp->add_option("--p", ca.p);
  comp->add_option("--q", ca.q);
  comp->add_option("--theta", ca.theta);
  comp->add_option("--alpha", ca.alpha);
  comp->add_option("--beta", ca.beta);
  comp->add_option("--m", ca.m, "Dimension of the first factor (0: automatic)");
  comp->add_option("--rho", ca.rho);
  comp->add_option("--r", ca.r);
  comp->add_option("--s", ca.s);
  comp->add_option("--eps", ca.eps, "Goodness epsilon");
  comp->add_option("--good-r", ca.good_r, "Goodness depth r");
  comp->add_option("--rd-beta", ca.rd_beta, "beta for strong-rd-bound");
  comp->add_flag("--dyadic-only", ca.dyadic_only, "no_bump over the standard grid only");

  auto* norm = app.add_subcommand("norm-estimate", "Lower bound for the bilinear form norm");
  ComputeArgs na;
  NormOptions nopts;
  norm->add_option("--sigma", na.sigma)->required();
  norm->add_option("--omega", na.omega)->required();
  norm->add_option("--p", na.p);
  norm->add_option("--q", na.q);
  norm->add_option("--alpha", na.alpha);
  norm->add_option("--beta", na.beta);
  norm->add_option("--m", na.m);
  norm->add_option("--iterations", nopts.iterations)->check(CLI::PositiveNumber);
  norm->add_option("--random-starts", nopts.random_starts)->check(CLI::NonNegativeNumber);
  norm->add_option("--indicator-starts", nopts.indicator_starts)->check(CLI::NonNegativeNumber);

  auto* ver = app.add_subcommand("verify", "Run the verification suite");
  bool quick = false, properties_only = false;
  std::string ver_weight;
  ver->add_flag("--quick", quick, "Tenth-size samples");
  ver->add_flag("--properties-only", properties_only, "Skip the numbered criteria");
  ver->add_option("--weight", ver_weight, "Also check this weight file");

  auto* grid = app.add_subcommand("grid-sample", "Sample a dyadic grid descriptor");
  std::string grid_kind = "shift";
  int grid_dim = 1, grid_lo = 0;
  grid->add_option("--kind", grid_kind, "std, shift or third:k");
  grid->add_option("--dim", grid_dim)->check(CLI::Range(1, kMaxDim));
  grid->add_option("--lo", grid_lo, "Coarsest level");
  bool grid_check = false;
  grid->add_flag("--check", grid_check, "Also verify tiling and nesting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen) {
      const Weight w = gen_weight(make_lattice(gen_dim, g.depth), parse_weight_spec(spec_text));
      with_output(g, [&](std::ostream& os) { write_weight(os, w); });
      return kExitOk;
    }
    if (*comp) {
      const auto rows = compute(ca);
      with_output(g, [&](std::ostream& os) { write_table(os, rows, g.format); });
      return kExitOk;
    }
    if (*norm) {
      const Weight sigma = load_weight(na.sigma);
      const Weight omega = load_weight(na.omega);
      if (!(sigma.lattice() == omega.lattice())) fail(ErrorKind::shape, "sigma and omega lattices differ");
      const Exponents e = exponents_of(na, sigma.lattice().dim);
      if (e.n < 1) fail(ErrorKind::domain, "norm-estimate needs dimension >= 2");
      e.validate();
      const KernelHandle K = KernelHandle::product_frac(e.alpha, e.beta, e.m, e.n);
      nopts.seed = g.seed;
      const NormEstimate est = norm_estimate(K, sigma, omega, e, dyadic_rect_family(e.m, e.n, sigma.lattice().depth).enumerate(), nopts);
      with_output(g, [&](std::ostream& os) {
        os << "start,iteration,objective,seed\n";
        for (const auto& t : est.trace) {
          os << t.start << ',' << t.iteration << ',' << num(t.objective) << ',' << t.seed << '\n';
        }
        os << "lower_bound," << num(est.lower_bound) << '\n';
      });
      return kExitOk;
    }
    if (*ver) {
      SuiteOptions so;
      so.seed = g.seed;
      so.depth = g.depth;
      so.scale = quick ? 0.1 : 1.0;
      std::vector<Check> checks = property_checks();
      if (!ver_weight.empty()) {
        const Weight w = load_weight(ver_weight);
        checks.push_back({"weight_file", [w](const SuiteOptions&) {
                            const DoublingReport rep = doubling_report(w, DoublingMode::cube);
                            const CarlesonReport c = automatic_carleson_worst(w, 2.0, 2.0);
                            return CheckRow{"weight_file", c.pass(), c.ratio, 1.0 + 1e-9, c.witness.str(),
                                            "automatic Carleson (theta=2, rho=2); cube doubling " +
                                                num(rep.doubling_constant.value_or(0.0))};
                          }});
      }
      if (!properties_only) {
        for (auto& c : criteria_checks()) checks.push_back(std::move(c));
      }
      const auto rows = run_checks(checks, so);
      with_output(g, [&](std::ostream& os) {
        if (g.format == "json") write_rows_json(os, rows);
        else write_rows_csv(os, rows);
      });
      bool all = true;
      for (const auto& r : rows) {
        if (!r.pass) {
          all = false;
          std::cerr << "FAILED " << r.name << ": " << r.detail << '\n';
        }
      }
      return all ? kExitOk : kExitVerify;
    }
    if (*grid) {
      const int hi = g.depth;
      DyadicGrid dg = DyadicGrid::standard(grid_dim, grid_lo, hi);
      if (grid_kind == "shift") {
        std::vector<ShiftParam> sp;
        for (int k = 0; k < grid_dim; ++k) sp.push_back(sample_shift(grid_lo, hi, derive_seed(g.seed, k)));
        dg = DyadicGrid::shifted(std::move(sp));
      } else if (grid_kind.rfind("third:", 0) == 0) {
        dg = DyadicGrid::third(grid_dim, std::stoi(grid_kind.substr(6)), grid_lo, hi);
      } else if (grid_kind != "std") {
        fail(ErrorKind::precondition, "unknown grid kind '" + grid_kind + "'");
      }
      with_output(g, [&](std::ostream& os) {
        os << dg.descriptor() << '\n';
        if (grid_check) {
          const auto err = check_grid_structure(dg);
          os << (err ? "structure: " + *err : std::string("structure: ok")) << '\n';
        }
      });
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: bad argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}
