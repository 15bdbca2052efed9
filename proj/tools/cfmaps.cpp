#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "cfmaps/gkw.hpp"
#include "cfmaps/heatmap.hpp"
#include "cfmaps/jimm.hpp"
#include "cfmaps/lyapunov.hpp"
#include "cfmaps/maps.hpp"
#include "cfmaps/minkowski.hpp"
#include "cfmaps/text.hpp"
#include "cfmaps/transfer.hpp"
#include "cfmaps/verify.hpp"
#include "cfmaps/zeta.hpp"

using namespace cfmaps;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kParse = 2, kTruncation = 3, kIo = 4, kConvergence = 5 };

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double value_of(const ContinuedFraction& x) { return cf_value(x, 200).value; }

/// Prints to stdout, or replaces `out` atomically.
void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  write_file_atomic(out, [&](std::ostream& os) { os << text; }, true);
}

AlphaParam alpha_from(const std::string& text) { return AlphaParam{parse_cf(text)}; }

struct Options {
  std::string alpha = "0", x, variant = "minus", format, out, suite, method = "deriv";
  std::size_t iter = 1, grid = 0, depth = 64, samples = 50, steps = 0, bits = 0;
  double s = 1.0, t = 0.0;
  std::uint64_t seed = 1;
  std::optional<double> tol;
  bool jimm_image = false;
};

int cmd_cf(const Options& o) {
  const auto x = parse_cf(o.x);
  const auto v = cf_value(x, o.depth);
  std::string line = format_cf(x) + " " + shortest(v.value);
  if (x.is_finite()) line += " " + cf_to_rational(x).str();
  emit(o.out, line + "\n");
  return kOk;
}

int cmd_map_eval(const Options& o) {
  const auto y = t_alpha_iterate(alpha_from(o.alpha), parse_cf(o.x), o.iter);
  emit(o.out, format_cf(y) + " " + shortest(value_of(y)) + "\n");
  return kOk;
}

int cmd_orbit(const Options& o) {
  const auto alpha = alpha_from(o.alpha);
  const auto rec = orbit(alpha, parse_cf(o.x), o.iter);
  std::ostringstream os;
  const std::string fmt = o.format.empty() ? "text" : o.format;
  if (fmt == "json") {
    json steps = json::array();
    for (std::size_t k = 0; k < rec.states.size(); ++k)
      steps.push_back({{"step", k}, {"cf", format_cf(rec.states[k])}, {"value", rec.numeric_shadow[k]}});
    json j{{"alpha", format_cf(alpha.cf)}, {"steps", steps}, {"log_deriv_sum", rec.log_deriv_sum},
           {"log_deriv_terms", rec.log_deriv_terms}};
    j["hit_zero_at"] = rec.hit_zero_at ? json(*rec.hit_zero_at) : json(nullptr);
    os << j.dump(2) << '\n';
  } else if (fmt == "csv") {
    os << "step,cf,value\r\n";
    for (std::size_t k = 0; k < rec.states.size(); ++k)
      os << k << ',' << csv_field(format_cf(rec.states[k])) << ',' << g17(rec.numeric_shadow[k]) << "\r\n";
  } else {
    for (std::size_t k = 0; k < rec.states.size(); ++k)
      os << k << ' ' << format_cf(rec.states[k]) << ' ' << shortest(rec.numeric_shadow[k]) << '\n';
  }
  emit(o.out, os.str());
  return kOk;
}

int cmd_heatmap(const Options& o) {
  const std::size_t n = o.grid ? o.grid : 256;
  const auto h = render_heatmap(n, o.iter, o.variant == "plus" ? Variant::plus : Variant::minus);
  const std::filesystem::path pgm = o.out.empty() ? "heatmap.pgm" : o.out;
  std::filesystem::path csv = pgm;
  csv.replace_extension(".csv");
  write_file_atomic(pgm, [&](std::ostream& os) { write_pgm(os, h); }, true);
  write_file_atomic(csv, [&](std::ostream& os) { write_csv(os, h); }, true);
  std::cout << pgm.string() << '\n' << csv.string() << '\n';
  return kOk;
}

int cmd_jimm(const Options& o) {
  emit(o.out, format_cf(jimm(parse_cf(o.x), o.depth)) + "\n");
  return kOk;
}

int cmd_qmark(const Options& o, bool with_alpha) {
  const auto x = parse_cf(o.x);
  if (with_alpha) {
    if (!x.is_finite()) throw UnsupportedInput("the pushforward needs a rational y");
    const auto f = qmark_pushforward(alpha_from(o.alpha), cf_to_rational(x));
    json j{{"alpha", format_cf(alpha_from(o.alpha).cf)}, {"y", format_cf(x)}, {"value", f.value},
           {"tail_bound", f.tail_bound}, {"qmark", minkowski_exact(x).to_double()}};
    emit(o.out, j.dump(2) + "\n");
    return kOk;
  }
  if (x.is_finite()) {
    emit(o.out, to_string(minkowski_exact(x)) + "\n");
  } else if (x.is_periodic()) {
    emit(o.out, minkowski_periodic(x).str() + "\n");
  } else {
    const auto v = minkowski_q(x, o.depth);
    emit(o.out, shortest(v.value) + " +- " + shortest(v.error_bound) + "\n");
  }
  return kOk;
}

/// Closed-form fixed function for the parameters that have one.
std::optional<std::pair<Density, unsigned>> known_density(const ContinuedFraction& a) {
  if (a.is_zero()) return std::pair{Density::gauss, 1u};
  if (a == ContinuedFraction::finite({1})) return std::pair{Density::alpha_one, 1u};
  if (a.is_periodic() && a.head().empty() && a.period().size() == 1) {
    const auto k = a.period()[0];
    if (k == 1) return std::pair{Density::fibonacci, 1u};
    if (k <= 1000) return std::pair{Density::k_series, static_cast<unsigned>(k)};
  }
  return std::nullopt;
}

int cmd_spectrum(const Options& o) {
  const auto alpha = alpha_from(o.alpha);
  const std::size_t n = o.grid ? o.grid : 128;
  const auto e = leading_eigen(gkw_matrix(alpha, o.s, n), 1e-12, 100000);
  json j{{"alpha", format_cf(alpha.cf)}, {"s", o.s}, {"grid", n}, {"lambda", e.lambda}, {"iterations", e.iterations}};
  if (const auto known = known_density(alpha.cf); known && o.s == 1.0) {
    const auto rho = closed_form_density(known->first, known->second);
    double dist = 0.0;
    if (known->first == Density::gauss) {
      for (std::size_t k = 0; k <= n; ++k) {
        const double y = static_cast<double>(k) / static_cast<double>(n);
        dist = std::max(dist, std::fabs(e.vector.values[k] - rho(y)));
      }
      j["sup_distance"] = dist;
    } else {
      // Not integrable at 0: compare shapes on [0.1, 1] after matching at 0.5.
      const double scale = e.vector.at(0.5) / rho(0.5);
      for (int i = 0; i <= 90; ++i) {
        const double y = 0.1 + 0.01 * i;
        dist = std::max(dist, std::fabs(e.vector.at(y) / scale - rho(y)) / rho(y));
      }
      j["shape_distance"] = dist;
    }
  }
  if (!o.out.empty()) write_file_atomic(o.out, [&](std::ostream& os) { write_csv(os, e.vector); }, true);
  if (o.format == "json") {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "lambda " << g17(e.lambda) << '\n';
    if (j.contains("sup_distance")) std::cout << "sup_distance " << g17(j["sup_distance"].get<double>()) << '\n';
    if (j.contains("shape_distance")) std::cout << "shape_distance " << g17(j["shape_distance"].get<double>()) << '\n';
  }
  return kOk;
}

int cmd_verify(const Options& o) {
  std::vector<std::string> names = o.suite == "all" ? suite_names() : std::vector<std::string>{o.suite};
  json suites = json::array();
  bool ok = true;
  for (const auto& name : names) {
    const auto r = run_suite(name, o.tol);
    json checks = json::array();
    for (const auto& c : r.checks)
      checks.push_back({{"name", c.name}, {"residual", c.residual}, {"bound", c.bound}, {"pass", c.pass}});
    suites.push_back({{"suite", r.suite}, {"passed", r.passed()}, {"failures", r.failures()}, {"checks", checks}});
    ok = ok && r.passed();
    std::cerr << r.suite << ": " << (r.passed() ? "PASS" : "FAIL") << " (" << r.checks.size() - r.failures() << "/"
              << r.checks.size() << ")\n";
  }
  const json report = names.size() == 1 ? suites[0] : json{{"passed", ok}, {"suites", suites}};
  emit(o.out, report.dump(2) + "\n");
  return ok ? kOk : kVerifyFailed;
}

int cmd_lyapunov(const Options& o, bool steps_given, bool bits_given) {
  const auto alpha = alpha_from(o.alpha);
  std::size_t steps = steps_given ? o.steps : 2000;
  // Slower convergence for the Fibonacci map: twice the default orbit length.
  if (!steps_given && alpha.cf == AlphaParam::fibonacci().cf) steps *= 2;
  const std::size_t bits = bits_given ? o.bits : 4 * steps;
  MonteCarloOptions mc;
  mc.method = o.method == "qn" ? LyapunovMethod::qn_growth : LyapunovMethod::deriv_sum;
  mc.jimm_image = o.jimm_image;
  const auto e = monte_carlo_lyapunov(alpha, o.samples, steps, bits, o.seed, mc);
  json j{{"alpha", format_cf(alpha.cf)},
         {"method", mc.method == LyapunovMethod::qn_growth ? "QN_GROWTH" : "DERIV_SUM"},
         {"mean", e.value},
         {"stderr", e.std_error},
         {"n_samples", e.n_samples},
         {"n_steps", e.n_steps},
         {"bits", bits},
         {"seed", o.seed},
         {"discarded_samples", e.discarded_samples}};
  if (o.jimm_image) j["jimm_image"] = true;
  emit(o.out, j.dump(2) + "\n");
  return kOk;
}

int cmd_zeta(const Options& o) {
  const auto alpha = alpha_from(o.alpha);
  const std::size_t n = o.grid ? o.grid : 16;
  std::ostringstream os;
  os << "y,value,tail_bound\r\n";
  for (std::size_t k = 1; k <= n; ++k) {
    const double y = static_cast<double>(k) / static_cast<double>(n);
    const auto v = zeta_alpha(alpha, o.s, o.t, y);
    os << g17(y) << ',' << g17(v.value) << ',' << g17(v.tail_bound) << "\r\n";
  }
  emit(o.out, os.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continued-fraction maps T_alpha: orbits, transfer operators, heatmaps, verification."};
  app.require_subcommand(1);
  Options o;

  auto alpha_opt = [&](CLI::App* c) { return c->add_option("--alpha", o.alpha, "alpha as CF text or p/q[+|-]"); };
  auto x_opt = [&](CLI::App* c) { return c->add_option("--x", o.x, "x as CF text or p/q[+|-]")->required(); };
  auto out_opt = [&](CLI::App* c) { c->add_option("--out", o.out, "output file (written atomically)"); };
  auto format_opt = [&](CLI::App* c, std::vector<std::string> formats) {
    c->add_option("--format", o.format, "output format")->check(CLI::IsMember(formats));
  };

  auto* cf = app.add_subcommand("cf", "Canonical form and value of a continued fraction");
  x_opt(cf);
  cf->add_option("--depth", o.depth, "convergent depth for the value")->check(CLI::PositiveNumber);
  out_opt(cf);

  auto* map_eval = app.add_subcommand("map-eval", "T_alpha^n(x)");
  alpha_opt(map_eval);
  x_opt(map_eval);
  map_eval->add_option("--iter", o.iter, "number of iterations")->check(CLI::NonNegativeNumber);
  out_opt(map_eval);

  auto* orbit_cmd = app.add_subcommand("orbit", "Orbit of x under T_alpha");
  alpha_opt(orbit_cmd);
  x_opt(orbit_cmd);
  orbit_cmd->add_option("--iter", o.iter, "number of steps")->check(CLI::NonNegativeNumber);
  format_opt(orbit_cmd, {"text", "csv", "json"});
  out_opt(orbit_cmd);

  auto* heatmap = app.add_subcommand("heatmap", "Render T_alpha^k(x) over the (alpha, x) square");
  heatmap->add_option("--grid", o.grid, "grid size N (>= 16)")->check(CLI::Range(std::size_t{16}, std::size_t{4096}));
  heatmap->add_option("--iter", o.iter, "iterate k (>= 1)")->check(CLI::PositiveNumber);
  heatmap->add_option("--variant", o.variant, "expansion of rational alpha")->check(CLI::IsMember({"minus", "plus"}));
  format_opt(heatmap, {"pgm"});
  heatmap->add_option("--out", o.out, "PGM path; the CSV goes next to it");

  auto* jimm_cmd = app.add_subcommand("jimm", "The Jimm involution");
  x_opt(jimm_cmd);
  jimm_cmd->add_option("--depth", o.depth, "digits of input used")->check(CLI::PositiveNumber);
  out_opt(jimm_cmd);

  auto* qmark = app.add_subcommand("qmark", "Minkowski ?(x), or the ? pushforward with --alpha");
  x_opt(qmark);
  auto* qmark_alpha = alpha_opt(qmark);
  qmark->add_option("--depth", o.depth, "digits for truncated input")->check(CLI::PositiveNumber);
  out_opt(qmark);

  auto* spectrum = app.add_subcommand("spectrum", "Leading eigenpair of the discretized transfer operator");
  alpha_opt(spectrum);
  spectrum->add_option("--s", o.s, "exponent s")->check(CLI::PositiveNumber);
  spectrum->add_option("--grid", o.grid, "grid size n (>= 16)")->check(CLI::Range(std::size_t{16}, std::size_t{4096}));
  format_opt(spectrum, {"text", "json"});
  spectrum->add_option("--out", o.out, "CSV of the eigenvector");

  auto* verify = app.add_subcommand("verify", "Run an invariant suite; JSON report");
  verify->add_option("--suite", o.suite, "suite name")
      ->required()
      ->check(CLI::IsMember({"densities", "equations", "conjugacy", "qmark", "zeta", "all"}));
  verify->add_option("--tol", o.tol, "tolerance override")->check(CLI::PositiveNumber);
  format_opt(verify, {"json"});
  out_opt(verify);

  auto* lyap = app.add_subcommand("lyapunov", "Monte Carlo Lyapunov exponent; JSON");
  alpha_opt(lyap);
  lyap->add_option("--samples", o.samples, "number of samples")->check(CLI::PositiveNumber);
  auto* steps_opt = lyap->add_option("--steps", o.steps, "orbit length")->check(CLI::PositiveNumber);
  auto* bits_opt = lyap->add_option("--bits", o.bits, "random bits per sample (default 4 * steps)");
  lyap->add_option("--seed", o.seed, "seed");
  lyap->add_option("--method", o.method, "deriv or qn")->check(CLI::IsMember({"deriv", "qn"}));
  lyap->add_flag("--jimm-image", o.jimm_image, "run the orbit of J(x)");
  format_opt(lyap, {"json"});
  out_opt(lyap);

  auto* zeta = app.add_subcommand("zeta", "zeta_alpha(s, t, y) on y = k/n; CSV");
  alpha_opt(zeta);
  zeta->add_option("--s", o.s, "exponent s")->check(CLI::PositiveNumber);
  zeta->add_option("--t", o.t, "power t");
  zeta->add_option("--grid", o.grid, "number of y points")->check(CLI::PositiveNumber);
  format_opt(zeta, {"csv"});
  out_opt(zeta);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }

  try {
    if (*cf) return cmd_cf(o);
    if (*map_eval) return cmd_map_eval(o);
    if (*orbit_cmd) return cmd_orbit(o);
    if (*heatmap) return cmd_heatmap(o);
    if (*jimm_cmd) return cmd_jimm(o);
    if (*qmark) return cmd_qmark(o, qmark_alpha->count() > 0);
    if (*spectrum) return cmd_spectrum(o);
    if (*verify) return cmd_verify(o);
    if (*lyap) return cmd_lyapunov(o, steps_opt->count() > 0, bits_opt->count() > 0);
    if (*zeta) return cmd_zeta(o);
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence: " << e.what() << '\n';
    return kConvergence;
  } catch (const DivergenceError& e) {
    std::cerr << "convergence: " << e.what() << '\n';
    return kConvergence;
  } catch (const TruncationExhausted& e) {
    std::cerr << "truncation: " << e.what() << '\n';
    return kTruncation;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o: " << e.what() << '\n';
    return kIo;
  } catch (const ParseError& e) {
    std::cerr << "parse: " << e.what() << '\n';
    return kParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kParse;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kVerifyFailed;
  }
  return kOk;
}
