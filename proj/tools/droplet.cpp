// droplet: command-line front end for the capillary-wave toolkit.
//
// Every run prints one JSON envelope on stdout:
//   { "command", "version", "parameters", "wall_time_ms", "payload" }
// where parameters echo the parsed options and the payload is a pure
// function of them (byte-identical across runs; wall_time_ms is the only
// nondeterministic field).  Table-like commands also offer --format csv,
// which streams bare rows instead of the envelope.
//
// Exit codes: 0 success, 1 runtime failure (reported on stderr), 2 bad
// command line.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <droplet/arith.hpp>
#include <droplet/dispersion.hpp>
#include <droplet/elliptic.hpp>
#include <droplet/evolution.hpp>
#include <droplet/resonance.hpp>
#include <droplet/sphere.hpp>
#include <droplet/version.hpp>

using json = nlohmann::ordered_json;
using droplet::ModeIndex;
using droplet::arith::BigRat;

namespace {

// Exact rational option value: "p" or "p/q".
BigRat parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return BigRat(droplet::arith::BigInt(text));
    const droplet::arith::BigInt num(text.substr(0, slash));
    const droplet::arith::BigInt den(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return BigRat(num, den);
  } catch (const std::exception&) {
    throw CLI::ValidationError("rational", "expected an integer or p/q: got '" + text + "'");
  }
}

std::string rational_string(const BigRat& r) {
  return r.str();  // "p" or "p/q", canonical lowest terms
}

// Round-trip-exact decimal text for CSV cells.
std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

droplet::resonance::SignPattern parse_pattern(const std::string& s) {
  using droplet::resonance::SignPattern;
  if (s == "mm") return SignPattern::MinusMinus;
  if (s == "mp") return SignPattern::MinusPlus;
  if (s == "pm") return SignPattern::PlusMinus;
  if (s == "pp") return SignPattern::PlusPlus;
  throw CLI::ValidationError("pattern", "expected one of mm, mp, pm, pp");
}

droplet::evolution::DataFamily parse_family(const std::string& s) {
  using droplet::evolution::DataFamily;
  if (s == "random") return DataFamily::Random;
  if (s == "zonal") return DataFamily::Zonal;
  if (s == "highest-weight" || s == "hw") return DataFamily::HighestWeight;
  if (s == "band") return DataFamily::Band;
  throw CLI::ValidationError("family", "expected random, zonal, highest-weight or band");
}

json radical_json(const droplet::elliptic::RadicalForm& r) {
  return json{{"multiple", r.multiple}, {"radicand", r.radicand}};
}

constexpr const char* kSweepCaveat =
    "point lists are complete only up to the stated x bound; a curve may have "
    "integral points beyond it";

// ---------------------------------------------------------------------------
// Subcommand payloads
// ---------------------------------------------------------------------------

struct ResonancesArgs {
  ModeIndex n_max = 100;
};

json run_resonances(const ResonancesArgs& a, unsigned threads, json& params) {
  params = {{"n_max", a.n_max}};
  const auto triples = droplet::resonance::enumerate_resonances(a.n_max, threads);
  json rows = json::array();
  for (const auto& t : triples) {
    const auto sf = droplet::resonance::squarefree_form(t.n1);
    rows.push_back({{"n1", t.n1},
                    {"n2", t.n2},
                    {"n3", t.n3},
                    {"squarefree", sf.squarefree}});
  }
  return {{"count", triples.size()}, {"triples", rows}};
}

struct EllipticArgs {
  std::uint32_t c = 0;      // single-curve mode when nonzero
  std::uint32_t c_max = 0;  // table mode when nonzero
  std::int64_t x_bound = 1'000'000;
};

json row_json(const droplet::elliptic::CurveRow& row, bool with_details) {
  json r{{"c", row.c},
         {"point_count", row.points.size()},
         {"unique_kernel", row.unique_kernel}};
  if (row.n0) {
    r["n0"] = *row.n0;
    r["frequency"] = radical_json(*row.frequency);
    r["frequency_value"] = row.frequency_value;
  }
  if (row.published) {
    r["published"] = radical_json(*row.published);
    r["published_n0"] = *row.published_n0;
    r["discrepancy"] = row.discrepancy;
  }
  if (with_details) {
    json pts = json::array();
    for (const auto& p : row.points) pts.push_back({{"x", p.x}, {"y", p.y}});
    r["points"] = pts;
    json facs = json::array();
    for (const auto& f : row.factorizations) {
      json adm = json::array();
      for (const auto& p : f.admissible)
        adm.push_back({{"n0", p.n0}, {"j0", p.j0}, {"x", p.x}, {"y", p.y}});
      facs.push_back({{"a", f.a}, {"b", f.b}, {"admissible", adm}});
    }
    r["factorizations"] = facs;
  }
  return r;
}

json run_elliptic(const EllipticArgs& a, unsigned threads, json& params) {
  if ((a.c == 0) == (a.c_max == 0))
    throw std::invalid_argument("elliptic: pass exactly one of --c or --c-max");
  if (a.c != 0) {
    params = {{"c", a.c}, {"x_bound", a.x_bound}};
    return {{"caveat", kSweepCaveat},
            {"row", row_json(droplet::elliptic::curve_row(a.c, a.x_bound), true)}};
  }
  params = {{"c_max", a.c_max}, {"x_bound", a.x_bound}};
  const auto table = droplet::elliptic::uniqueness_table(a.c_max, a.x_bound, threads);
  json rows = json::array();
  for (const auto& row : table) rows.push_back(row_json(row, false));
  json payload{{"caveat", kSweepCaveat}, {"rows", rows}};
  if (const auto hit = droplet::elliptic::min_n0_scan(a.c_max, a.x_bound, threads))
    payload["min_n0"] = {{"n0", hit->n0}, {"c", hit->c}};
  return payload;
}

struct KernelArgs {
  std::uint64_t a = 1, b = 1;
  ModeIndex n_max = 1000;
};

json run_kernel(const KernelArgs& a, unsigned, json& params) {
  params = {{"a", a.a}, {"b", a.b}, {"n_max", a.n_max}};
  const auto sols = droplet::resonance::kernel_solutions(a.a, a.b, a.n_max);
  json rows = json::array();
  for (const auto& s : sols) rows.push_back({{"n", s.n}, {"j", s.j}});
  return {{"count", sols.size()}, {"solutions", rows}};
}

struct NormalFormArgs {
  unsigned kind = 1;
  ModeIndex n_max = 0;  // sweep mode when nonzero
  ModeIndex n1 = 0, n2 = 0, n3 = 0;
  std::string convention = "second";
  std::string format = "json";
};

json coeff_json(const droplet::resonance::NormalFormCoefficient& c) {
  json r{{"kind", c.kind}, {"n1", c.n1}, {"n2", c.n2}, {"n3", c.n3}, {"zero", c.zero}};
  if (!c.zero) r["beta"] = c.beta;  // coefficient is i * beta
  return r;
}

json run_normalform(const NormalFormArgs& a, unsigned, json& params) {
  using droplet::resonance::PhaseConvention;
  const PhaseConvention conv = a.convention == "first" ? PhaseConvention::FirstConjugated
                                                       : PhaseConvention::SecondConjugated;
  const bool single = a.n1 || a.n2 || a.n3;
  if (single) {
    if (a.n1 < 2 || a.n2 < 2 || a.n3 < 2)
      throw std::invalid_argument("normalform: a full triple needs --n1 --n2 --n3, all >= 2");
    params = {{"kind", a.kind}, {"n1", a.n1}, {"n2", a.n2}, {"n3", a.n3},
              {"convention", a.convention}};
    return coeff_json(droplet::resonance::normal_form_coeff(a.kind, a.n1, a.n2, a.n3, conv));
  }
  if (a.n_max < 2) throw std::invalid_argument("normalform: pass --n-max >= 2 or a full triple");
  params = {{"kind", a.kind}, {"n_max", a.n_max}, {"convention", a.convention}};
  json rows = json::array();
  for (ModeIndex n1 = 2; n1 <= a.n_max; ++n1)
    for (ModeIndex n2 = 2; n2 <= a.n_max; ++n2)
      for (ModeIndex n3 = 2; n3 <= a.n_max; ++n3)
        rows.push_back(coeff_json(droplet::resonance::normal_form_coeff(a.kind, n1, n2, n3, conv)));
  return {{"rows", rows}};
}

// Streaming CSV sweep: the n_max^3 table never materializes in memory.
int stream_normalform_csv(const NormalFormArgs& a) {
  using droplet::resonance::PhaseConvention;
  const PhaseConvention conv = a.convention == "first" ? PhaseConvention::FirstConjugated
                                                       : PhaseConvention::SecondConjugated;
  if (a.n_max < 2) throw std::invalid_argument("normalform: pass --n-max >= 2 for csv output");
  std::printf("kind,n1,n2,n3,zero,beta\n");
  for (ModeIndex n1 = 2; n1 <= a.n_max; ++n1)
    for (ModeIndex n2 = 2; n2 <= a.n_max; ++n2)
      for (ModeIndex n3 = 2; n3 <= a.n_max; ++n3) {
        const auto c = droplet::resonance::normal_form_coeff(a.kind, n1, n2, n3, conv);
        std::printf("%u,%u,%u,%u,%d,%s\n", c.kind, c.n1, c.n2, c.n3, c.zero ? 1 : 0,
                    c.zero ? "0" : num(c.beta).c_str());
      }
  return 0;
}

struct CountingArgs {
  std::string target;       // single-count mode when nonempty
  std::uint64_t a_min = 0;  // sweep mode when nonzero
  std::uint64_t a_max = 0;
  unsigned points = 13;
  bool no_ratio_window = false;
};

json run_counting(const CountingArgs& a, unsigned threads, json& params) {
  const bool window = !a.no_ratio_window;
  if (!a.target.empty()) {
    const BigRat A = parse_rational(a.target);
    params = {{"A", rational_string(A)}, {"ratio_window", window}};
    return {{"count", droplet::resonance::count_pairs(A, window)}};
  }
  if (a.a_min < 1 || a.a_max <= a.a_min)
    throw std::invalid_argument("counting: pass --A, or --a-min < --a-max");
  params = {{"a_min", a.a_min}, {"a_max", a.a_max}, {"points", a.points},
            {"ratio_window", window}};
  // Strictly increasing geometric grid of integer targets.
  std::vector<BigRat> grid;
  for (unsigned k = 0; k < a.points; ++k) {
    const double t = static_cast<double>(k) / (a.points - 1);
    const auto v = static_cast<std::uint64_t>(
        std::llround(a.a_min * std::pow(static_cast<double>(a.a_max) / a.a_min, t)));
    if (grid.empty() || BigRat(v) > grid.back()) grid.emplace_back(v);
  }
  const auto est = droplet::resonance::estimate_rho(grid, window, threads);
  json pts = json::array();
  for (const auto& p : est.points)
    pts.push_back({{"A", rational_string(p.A)},
                   {"max_count", p.max_count},
                   {"best_Aprime", rational_string(p.best_Aprime)}});
  return {{"slope", est.slope}, {"intercept", est.intercept}, {"points", pts}};
}

struct SmallDivisorArgs {
  ModeIndex n_max = 0;  // scan mode when nonzero
  ModeIndex n1 = 0, n2 = 0, n3 = 0;
  std::string pattern = "mm";
};

json run_smalldivisor(const SmallDivisorArgs& a, unsigned threads, json& params) {
  if (a.n1 || a.n2 || a.n3) {
    params = {{"n1", a.n1}, {"n2", a.n2}, {"n3", a.n3}, {"pattern", a.pattern}};
    const auto d = droplet::resonance::small_divisor(a.n1, a.n2, a.n3, parse_pattern(a.pattern));
    return {{"exact_zero", d.exact_zero}, {"value", d.value}};
  }
  if (a.n_max < 2)
    throw std::invalid_argument("smalldivisor: pass --n-max >= 2 or a full triple");
  params = {{"n_max", a.n_max}};
  const auto scan = droplet::resonance::small_divisor_scan(a.n_max, threads);
  return {{"min_weighted", scan.min_weighted},
          {"argmin", {{"n1", scan.n1}, {"n2", scan.n2}, {"n3", scan.n3}}},
          {"triples_scanned", scan.triples_scanned}};
}

struct EvolveArgs {
  ModeIndex n_max = 16;
  double t_final = 1.0;
  unsigned samples = 33;
  std::string family = "random";
  std::uint64_t seed = 1;
  std::string format = "json";
};

droplet::evolution::EvolveSeries evolve_run(const EvolveArgs& a) {
  const auto u0 =
      droplet::evolution::make_family(parse_family(a.family), a.n_max, a.seed);
  return droplet::evolution::evolve_series(u0, a.t_final, a.samples);
}

json run_evolve(const EvolveArgs& a, unsigned, json& params) {
  params = {{"n_max", a.n_max}, {"t_final", a.t_final}, {"samples", a.samples},
            {"family", a.family}, {"seed", a.seed}};
  const auto series = evolve_run(a);
  json pts = json::array();
  for (const auto& p : series.points)
    pts.push_back({{"t", p.t}, {"L2", p.L2}, {"energy2", p.energy}, {"L4", p.L4}});
  return {{"points", pts},
          {"volume_drift", series.volume_drift},
          {"momentum_drift", series.momentum_drift}};
}

int stream_evolve_csv(const EvolveArgs& a) {
  const auto series = evolve_run(a);
  std::printf("t,L2,energy2,L4\n");
  for (const auto& p : series.points)
    std::printf("%s,%s,%s,%s\n", num(p.t).c_str(), num(p.L2).c_str(), num(p.energy).c_str(),
                num(p.L4).c_str());
  return 0;
}

struct StrichartzArgs {
  ModeIndex n_max = 16;
  double t_final = 1.0;
  double sobolev = 0.25;
  std::string family = "random";
  std::uint64_t seed = 1;
  unsigned time_samples = 0;
};

json run_strichartz(const StrichartzArgs& a, unsigned threads, json& params) {
  params = {{"n_max", a.n_max},       {"t_final", a.t_final},
            {"s", a.sobolev},         {"family", a.family},
            {"seed", a.seed},         {"time_samples", a.time_samples}};
  const auto r = droplet::evolution::strichartz_report(
      parse_family(a.family), a.n_max, a.t_final, a.sobolev, a.seed, a.time_samples, threads);
  return {{"time_samples", r.time_samples},
          {"spacetime_L4", r.spacetime_norm},
          {"sobolev_norm", r.data_norm},
          {"ratio", r.ratio}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"capillary spherical-wave toolkit"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads,
                 "worker threads (0: DROPLET_THREADS env, then hardware)");

  ResonancesArgs res;
  auto* cmd_res = app.add_subcommand("resonances", "exact three-wave resonances up to n-max");
  cmd_res->add_option("--n-max", res.n_max, "largest mode index")->required();

  EllipticArgs ell;
  auto* cmd_ell = app.add_subcommand("elliptic", "integral points and kernel uniqueness");
  cmd_ell->add_option("--c", ell.c, "single curve parameter");
  cmd_ell->add_option("--c-max", ell.c_max, "table over 1..c-max");
  cmd_ell->add_option("--x-bound", ell.x_bound, "sweep bound (default 1e6)");

  KernelArgs ker;
  auto* cmd_ker = app.add_subcommand("kernel", "integer solutions of a j^2 = b n(n-1)(n+2)");
  cmd_ker->add_option("--a", ker.a, "numerator weight")->required();
  cmd_ker->add_option("--b", ker.b, "denominator weight")->required();
  cmd_ker->add_option("--n-max", ker.n_max, "largest mode index");

  NormalFormArgs nf;
  auto* cmd_nf = app.add_subcommand("normalform", "quadratic normal-form coefficients");
  cmd_nf->add_option("--kind", nf.kind, "interaction kind 1, 2 or 3");
  cmd_nf->add_option("--n-max", nf.n_max, "sweep all triples in [2, n-max]^3");
  cmd_nf->add_option("--n1", nf.n1, "single triple");
  cmd_nf->add_option("--n2", nf.n2, "single triple");
  cmd_nf->add_option("--n3", nf.n3, "single triple");
  cmd_nf->add_option("--convention", nf.convention, "second (default) or first conjugated");
  cmd_nf->add_option("--format", nf.format, "json (default) or csv");

  CountingArgs cnt;
  auto* cmd_cnt = app.add_subcommand("counting", "pair counts near a target frequency sum");
  cmd_cnt->add_option("--A", cnt.target, "single target (integer or p/q)");
  cmd_cnt->add_option("--a-min", cnt.a_min, "sweep start");
  cmd_cnt->add_option("--a-max", cnt.a_max, "sweep end");
  cmd_cnt->add_option("--points", cnt.points, "grid size (default 13)");
  cmd_cnt->add_flag("--no-ratio-window", cnt.no_ratio_window, "drop the 1/2 <= n2/n1 <= 2 window");

  SmallDivisorArgs sd;
  auto* cmd_sd = app.add_subcommand("smalldivisor", "three-wave divisor values and scans");
  cmd_sd->add_option("--n-max", sd.n_max, "weighted scan over all triples up to n-max");
  cmd_sd->add_option("--n1", sd.n1, "single triple");
  cmd_sd->add_option("--n2", sd.n2, "single triple");
  cmd_sd->add_option("--n3", sd.n3, "single triple");
  cmd_sd->add_option("--pattern", sd.pattern, "sign pattern mm, mp, pm or pp (default mm)");

  EvolveArgs evo;
  auto* cmd_evo = app.add_subcommand("evolve", "linear flow diagnostics over [0, t-final]");
  cmd_evo->add_option("--n-max", evo.n_max, "band limit (>= 2)");
  cmd_evo->add_option("--t-final", evo.t_final, "end time");
  cmd_evo->add_option("--samples", evo.samples, "number of sample times (>= 2)");
  cmd_evo->add_option("--family", evo.family, "random, zonal, highest-weight or band");
  cmd_evo->add_option("--seed", evo.seed, "random family seed");
  cmd_evo->add_option("--format", evo.format, "json (default) or csv");

  StrichartzArgs str;
  auto* cmd_str = app.add_subcommand("strichartz", "space-time L4 over Sobolev ratio");
  cmd_str->add_option("--n-max", str.n_max, "band limit (>= 2)");
  cmd_str->add_option("--t-final", str.t_final, "time horizon");
  cmd_str->add_option("--s", str.sobolev, "Sobolev index of the denominator");
  cmd_str->add_option("--family", str.family, "random, zonal, highest-weight or band");
  cmd_str->add_option("--seed", str.seed, "random family seed");
  cmd_str->add_option("--time-samples", str.time_samples,
                      "midpoint-rule samples (0: 32 per fastest period)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    // CSV formats stream rows directly and skip the envelope.
    if (cmd_nf->parsed() && nf.format == "csv") return stream_normalform_csv(nf);
    if (cmd_evo->parsed() && evo.format == "csv") return stream_evolve_csv(evo);

    const auto start = std::chrono::steady_clock::now();
    json params;
    json payload;
    std::string name;
    if (cmd_res->parsed()) {
      name = "resonances";
      payload = run_resonances(res, threads, params);
    } else if (cmd_ell->parsed()) {
      name = "elliptic";
      payload = run_elliptic(ell, threads, params);
    } else if (cmd_ker->parsed()) {
      name = "kernel";
      payload = run_kernel(ker, threads, params);
    } else if (cmd_nf->parsed()) {
      name = "normalform";
      payload = run_normalform(nf, threads, params);
    } else if (cmd_cnt->parsed()) {
      name = "counting";
      payload = run_counting(cnt, threads, params);
    } else if (cmd_sd->parsed()) {
      name = "smalldivisor";
      payload = run_smalldivisor(sd, threads, params);
    } else if (cmd_evo->parsed()) {
      name = "evolve";
      payload = run_evolve(evo, threads, params);
    } else if (cmd_str->parsed()) {
      name = "strichartz";
      payload = run_strichartz(str, threads, params);
    }
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    json envelope{{"command", name},
                  {"version", droplet::version_string},
                  {"parameters", params},
                  {"wall_time_ms", ms},
                  {"payload", payload}};
    std::cout << envelope.dump(2) << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
