// breather_cli: period tables, phase portraits, expansion checks and the
// full construct-and-verify pipeline.
//
// Exit codes: 0 ok, 1 usage/config, 2 hypothesis failure, 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "curlwave/breather.hpp"
#include "curlwave/coefficients.hpp"
#include "curlwave/errors.hpp"
#include "curlwave/expansions.hpp"
#include "curlwave/io.hpp"
#include "curlwave/oscillator.hpp"
#include "curlwave/phase_plane.hpp"
#include "curlwave/verifier.hpp"

namespace fs = std::filesystem;
using namespace curlwave;

namespace {

enum Exit { kOk = 0, kUsage = 1, kHypothesis = 2, kNumerical = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  double p = 3.0;
  std::string sign = "plus";
  double tol = 1e-10;
  std::string out;  // empty: stdout
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--p", c.p, "nonlinearity exponent p > 1")->capture_default_str();
  sub->add_option("--sign", c.sign, "plus or minus")
      ->check(CLI::IsMember({"plus", "minus"}))
      ->capture_default_str();
  sub->add_option("--tol", c.tol, "relative quadrature tolerance")->capture_default_str();
  sub->add_option("--out", c.out, "output directory (default: stdout)");
}

QuadratureOptions quadrature(const Common& c) {
  if (!(c.tol > 0.0 && c.tol < 1e-2)) throw UsageError("--tol must lie in (0, 1e-2)");
  QuadratureOptions q;
  q.rel_tol = c.tol;
  return q;
}

/// Opens `name` under --out, or returns nullopt for stdout.
std::optional<std::ofstream> open_out(const Common& c, const std::string& name) {
  if (c.out.empty()) return std::nullopt;
  fs::create_directories(c.out);
  return io::open_csv((fs::path(c.out) / name).string());
}

std::string tag(const Common& c) {
  return c.sign + "_p" + io::format_double(c.p);
}

// -- period-table -------------------------------------------------------------

struct PeriodTableArgs {
  Common common;
  std::vector<double> energies;
  double e_max = -1.0;
  std::size_t n = 20;
};

int cmd_period_table(const PeriodTableArgs& a) {
  const Sign sign = parse_sign(a.common.sign);
  const Exponent p(a.common.p);
  const auto q = quadrature(a.common);
  std::vector<double> e = a.energies;
  if (e.empty()) {
    const double top = a.e_max > 0.0 ? a.e_max
                                     : (sign == Sign::Plus ? 1.0 : 0.9 * phase_plane::separatrix_energy(p));
    if (a.n < 2) throw UsageError("--n must be >= 2");
    for (std::size_t i = 0; i < a.n; ++i) e.push_back(top * static_cast<double>(i) / (a.n - 1.0));
  }
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!(e[i] >= 0.0) || !std::isfinite(e[i])) throw UsageError("energies must be finite and >= 0");
    if (i > 0 && !(e[i] > e[i - 1])) throw UsageError("energies must be strictly increasing");
    if (sign == Sign::Minus && !(e[i] < phase_plane::separatrix_energy(p))) {
      throw UsageError("minus energies must lie below the separatrix level (p-1)/(p+1)");
    }
  }

  auto file = open_out(a.common, "period_table_" + tag(a.common) + ".csv");
  std::ostream& os = file ? *file : std::cout;
  io::CsvWriter w(os, {"e", "N", "L_quadrature", "L_return_map", "abs_diff"});
  bool monotone = true;
  double prev = NAN;
  for (double ei : e) {
    const double n = phase_plane::amplitude(sign, p, ei);
    const double lq = phase_plane::period(sign, p, ei, q);
    const double lr = oscillator::return_map_period(sign, p, ei);
    w.row({ei, n, lq, lr, std::fabs(lq - lr)});
    if (!std::isnan(prev)) monotone = monotone && (sign == Sign::Plus ? lq < prev : lq > prev);
    prev = lq;
  }
  if (!monotone) {
    std::cerr << "period column is not strictly " << (sign == Sign::Plus ? "decreasing" : "increasing")
              << '\n';
    return kNumerical;
  }
  return kOk;
}

// -- phase-portrait -----------------------------------------------------------

struct PortraitArgs {
  Common common;
  std::vector<double> energies{0.1, 0.25};
  std::size_t samples = 256;
};

int cmd_phase_portrait(const PortraitArgs& a) {
  const Sign sign = parse_sign(a.common.sign);
  const Exponent p(a.common.p);
  const auto q = quadrature(a.common);
  if (a.samples < 4) throw UsageError("--samples must be >= 4");
  for (double e : a.energies) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw UsageError("energies must be finite and >= 0");
    if (sign == Sign::Minus && !(e < phase_plane::separatrix_energy(p))) {
      throw UsageError("minus energy " + io::format_double(e) + " is not below the separatrix");
    }
  }

  auto file = open_out(a.common, "phase_portrait_" + tag(a.common) + ".csv");
  std::ostream& os = file ? *file : std::cout;
  // curve = orbit index; -1 marks the separatrix
  io::CsvWriter w(os, {"curve", "e", "y", "ydot"});
  for (std::size_t k = 0; k < a.energies.size(); ++k) {
    const double e = a.energies[k];
    if (e == 0.0) {
      w.row({double(k), 0.0, 0.0, 0.0});
      continue;
    }
    const double L = phase_plane::period(sign, p, e, q);
    const auto traj = oscillator::integrate(sign, p, std::sqrt(e), L);
    for (std::size_t i = 0; i < a.samples; ++i) {
      const auto s = traj.at(L * static_cast<double>(i) / static_cast<double>(a.samples));
      w.row({double(k), e, s.y, s.ydot});
    }
  }
  if (sign == Sign::Minus) {
    // level set A_- = (p-1)/(p+1) on |y| <= 1: ydot = +-sqrt(e* - y^2 + 2/(p+1) |y|^{p+1})
    const double es = phase_plane::separatrix_energy(p);
    for (double branch : {1.0, -1.0}) {
      for (std::size_t i = 0; i <= a.samples; ++i) {
        const double y = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(a.samples);
        const double v2 = es - y * y + 2.0 / (p + 1.0) * abs_pow(y, p + 1.0);
        w.row({-1.0, es, branch > 0.0 ? y : -y, branch * std::sqrt(std::max(v2, 0.0))});
      }
    }
  }
  return kOk;
}

// -- expansion-check ----------------------------------------------------------

struct ExpansionArgs {
  Common common;
  std::size_t n = 25;
  double d_min = 1e-6;
  double d_max = 1e-2;
};

int cmd_expansion_check(const ExpansionArgs& a) {
  const Sign sign = parse_sign(a.common.sign);
  const Exponent p(a.common.p);
  const auto q = quadrature(a.common);
  std::vector<double> s;
  for (double d : expansions::geometric_defects(a.d_min, a.d_max, a.n)) {
    s.push_back(sign == Sign::Plus ? kTwoPi - d : kTwoPi + d);
  }
  const auto fit = expansions::validate_expansion(sign, p, s, std::sqrt(a.d_min * a.d_max), q);
  const auto j = io::to_json(fit);
  if (a.common.out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    fs::create_directories(a.common.out);
    io::write_json((fs::path(a.common.out) / ("expansion_" + tag(a.common) + ".json")).string(), j);
  }
  if (!fit.pass) {
    std::cerr << "expansion fit outside its windows (exponent rel " << fit.exponent_rel_error
              << ", prefactor rel " << fit.prefactor_rel_error << ", M' rel " << fit.mprime_rel_error
              << ")\n";
    return kNumerical;
  }
  return kOk;
}

// -- construct ----------------------------------------------------------------

struct ConstructArgs {
  Common common;
  std::string profile = "builtin";
  std::string side;  // builtin: side of 2 pi, defaults to --sign
  BuiltinParams builtin;
  double delta = 1.0;
  std::uint64_t seed = VerifyOptions{}.seed;
  std::size_t points = 20;
  double tail_r0 = 4.0;
  double tail_r1 = 8.0;
};

CoefficientProfile load_profile(const ConstructArgs& a, const CLI::App& sub) {
  if (a.profile == "builtin") {
    const Sign eq = parse_sign(a.common.sign);
    const Sign side = a.side.empty() ? eq : parse_sign(a.side);
    return builtin_profile(Exponent(a.common.p), side, a.builtin, a.delta, eq);
  }
  for (const char* f : {"--p", "--a", "--m", "--beta", "--delta", "--side"}) {
    if (sub.count(f) > 0) {
      throw UsageError(std::string(f) + " only applies to the builtin profile; set it in the JSON file");
    }
  }
  std::ifstream in(a.profile);
  if (!in) throw UsageError("cannot read profile '" + a.profile + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("profile is not valid JSON: ") + e.what());
  }
  auto prof = profile_from_json(j);
  // an explicit --sign overrides the equation sign of the file
  if (sub.count("--sign") > 0) prof = prof.with_sign(parse_sign(a.common.sign));
  return prof;
}

int cmd_construct(const ConstructArgs& a, const CLI::App& sub) {
  const auto q = quadrature(a.common);
  const auto prof = load_profile(a, sub);
  const Sign sign = prof.sign();
  const std::string out = a.common.out.empty() ? "construct_out" : a.common.out;
  fs::create_directories(out);
  auto path = [&](const std::string& n) { return (fs::path(out) / n).string(); };

  io::Json report;
  report["profile"] = {{"family", prof.family()}, {"p", double(prof.p())}, {"sign", to_string(sign)},
                       {"delta", prof.delta()}, {"T", prof.T()}};

  const auto hyp = check_hypotheses(prof, default_radial_grid(prof.delta()));
  report["hypotheses"] = io::to_json(hyp, sign);
  std::cout << "hypotheses: " << (hyp.all_ok() ? "ok" : "FAIL " + hyp.first_failure(sign)) << '\n';
  if (!hyp.all_ok()) {
    io::write_json(path("report.json"), report);
    std::cerr << "hypothesis " << hyp.first_failure(sign) << " fails (worst defect "
              << hyp.h1_worst_defect << " at r = " << hyp.h1_worst_r << ")\n";
    return kHypothesis;
  }

  BreatherOptions bo;
  bo.quadrature = q;
  const Breather b(prof, bo);

  {
    auto f = io::open_csv(path("radial_slice.csv"));
    std::vector<double> ts;
    for (int i = 0; i <= 32; ++i) ts.push_back(b.T() * i / 32.0);
    io::write_radial_slice(f, b, linear_grid(0.0, 6.0, 61), ts);
  }
  {
    auto f = io::open_csv(path("field.csv"));
    std::vector<Vec3> xs;
    for (const auto& pt : sample_points(a.points, a.seed, 0.5, 3.0, b.T())) xs.push_back(pt.x);
    io::write_field(f, b, xs, {0.0, 0.25 * b.T(), 0.5 * b.T(), 0.75 * b.T()});
  }

  const auto decay = decay_rate(b, linear_grid(a.tail_r0, a.tail_r1, 17));
  report["decay"] = io::to_json(decay, prof.delta());
  std::cout << "decay: rate " << decay.rate << " vs delta " << prof.delta() << "  "
            << (decay.certifies ? "ok" : "FAIL") << '\n';

  VerifyOptions vo;
  vo.seed = a.seed;
  vo.points = a.points;
  const auto ver = verify_breather(b, vo);
  report["residuals"] = io::to_json(ver);
  std::cout << "residual sweeps (" << a.points << " points, seed " << a.seed << "):\n";
  for (const auto* r : {&ver.reduced, &ver.full, &ver.curl_curl, &ver.curl}) io::print_summary(std::cout, *r);

  const bool ok = decay.certifies && ver.pass();
  report["pass"] = ok;
  io::write_json(path("report.json"), report);
  std::cout << "outputs in " << out << '\n';
  return ok ? kOk : kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radially symmetric breathers of the curl-curl wave equation"};
  app.require_subcommand(1);

  PeriodTableArgs pt;
  auto* s_pt = app.add_subcommand("period-table", "quadrature vs return-map periods on an energy grid");
  add_common(s_pt, pt.common);
  s_pt->add_option("--energies", pt.energies, "explicit energy grid (strictly increasing)");
  s_pt->add_option("--e-max", pt.e_max, "largest energy of the uniform grid");
  s_pt->add_option("--n", pt.n, "uniform grid size")->capture_default_str();

  PortraitArgs pp;
  auto* s_pp = app.add_subcommand("phase-portrait", "orbit samples (and the minus separatrix)");
  add_common(s_pp, pp.common);
  s_pp->add_option("--energies", pp.energies, "orbit energies")->capture_default_str();
  s_pp->add_option("--samples", pp.samples, "samples per orbit")->capture_default_str();

  ExpansionArgs ex;
  auto* s_ex = app.add_subcommand("expansion-check", "fit M(s) near 2 pi against its leading term");
  add_common(s_ex, ex.common);
  s_ex->add_option("--n", ex.n, "number of defects")->capture_default_str();
  s_ex->add_option("--d-min", ex.d_min, "smallest |s - 2 pi|")->capture_default_str();
  s_ex->add_option("--d-max", ex.d_max, "largest |s - 2 pi|")->capture_default_str();

  ConstructArgs co;
  auto* s_co = app.add_subcommand("construct", "check hypotheses, build, export and verify");
  add_common(s_co, co.common);
  s_co->add_option("--profile", co.profile, "'builtin' or a JSON profile path")->capture_default_str();
  s_co->add_option("--side", co.side, "builtin: side of 2 pi for g (default: --sign)")
      ->check(CLI::IsMember({"plus", "minus"}));
  s_co->add_option("--a", co.builtin.a, "builtin amplitude")->capture_default_str();
  s_co->add_option("--m", co.builtin.m, "builtin onset power")->capture_default_str();
  s_co->add_option("--beta", co.builtin.beta, "builtin Gaussian rate")->capture_default_str();
  s_co->add_option("--delta", co.delta, "decay rate to certify")->capture_default_str();
  s_co->add_option("--seed", co.seed, "sample point seed")->capture_default_str();
  s_co->add_option("--points", co.points, "residual sample points")->capture_default_str();
  s_co->add_option("--tail-r0", co.tail_r0, "decay fit window start")->capture_default_str();
  s_co->add_option("--tail-r1", co.tail_r1, "decay fit window end")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*s_pt) return cmd_period_table(pt);
    if (*s_pp) return cmd_phase_portrait(pp);
    if (*s_ex) return cmd_expansion_check(ex);
    if (*s_co) return cmd_construct(co, *s_co);
  } catch (const HypothesisError& e) {
    std::cerr << "hypothesis " << e.hypothesis() << " fails: " << e.what() << '\n';
    return kHypothesis;
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
