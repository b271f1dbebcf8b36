#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>

#include "toral/centralizer/centralizer.hpp"
#include "toral/constructor/constructor.hpp"
#include "toral/dynamics/dynamics.hpp"
#include "toral/dynamics/parallel.hpp"
#include "toral/exact/linalg.hpp"
#include "toral/io/io.hpp"
#include "toral/polyalg/polyalg.hpp"

using namespace toral;
using io::Json;

namespace {

using Clock = std::chrono::steady_clock;

struct Globals {
  int threads = -1;
  bool timing = false;
  std::string out;
};

/// Collects per-operation results; the first error decides the exit code.
struct Session {
  bool timing = false;
  int exit_code = 0;

  Json run(const std::string& name, const std::function<Json()>& fn) {
    const auto t0 = Clock::now();
    Json entry;
    try {
      entry = fn();
    } catch (const Error& e) {
      fail(name, static_cast<int>(e.kind()), e.what());
      entry = Json::object();
      entry["error"] = {{"kind", kind_name(e.kind())}, {"message", e.what()}};
    } catch (const std::exception& e) {
      fail(name, 3, e.what());
      entry = Json::object();
      entry["error"] = {{"kind", "numerical"}, {"message", e.what()}};
    }
    if (timing) entry["wall_seconds"] = std::chrono::duration<double>(Clock::now() - t0).count();
    return entry;
  }

  void fail(const std::string& name, int code, const std::string& msg) {
    std::cerr << "toralctl: " << name << ": " << msg << "\n";
    if (exit_code == 0) exit_code = code;
  }

  static const char* kind_name(ErrorKind k) {
    switch (k) {
      case ErrorKind::Usage: return "usage";
      case ErrorKind::Precondition: return "precondition";
      default: return "numerical";
    }
  }
};

Json header(const std::string& command) {
  Json r;
  r["schema_version"] = io::kSchemaVersion;
  r["command"] = command;
  return r;
}

Json input_block(const std::string& path, const std::string& text) {
  return {{"path", path}, {"fnv1a", io::fnv1a_hex(text)}};
}

void emit(const Json& report, const Globals& g) {
  const std::string s = io::dump(report);
  if (g.out.empty())
    std::cout << s;
  else
    io::write_file(g.out, s);
}

IntMatrix load_matrix(const std::string& path, std::string& text) {
  text = io::read_file(path);
  return io::matrix_from_json(io::parse_json(text, path));
}

// analyze

Json analyze_report(const IntMatrix& L, const std::vector<long>& spreads) {
  require_automorphism(L);
  Json r;
  const CertifiedSpectrum s = classify(L);
  r["dimension"] = L.dim();
  r["det"] = io::exact(s.det);
  r["char_poly"] = io::exact(s.char_poly);
  r["char_poly_text"] = s.char_poly.to_string();
  r["irreducible"] = is_irreducible_q(s.char_poly);
  r["ergodic"] = is_ergodic(L);
  const PropertyPReport P = has_property_p(L);
  r["property_p"] = {{"holds", P.holds},
                     {"dimension_ok", P.dimension_ok},
                     {"irreducible", P.irreducible},
                     {"circle_pairs", P.circle_pairs},
                     {"r2", P.r2},
                     {"failed_clause", P.failed_clause}};
  Json spread = Json::array();
  for (long q : spreads) {
    Json e = {{"r", q}};
    if (P.holds)
      e["holds"] = spread_spectrum(s, q);
    else
      e["holds"] = nullptr;
    spread.push_back(std::move(e));
  }
  r["spread"] = std::move(spread);
  r["no_three_same_modulus"] = no_three_same_modulus(s);
  r["poly_in_tn"] = poly_in_tn(s.char_poly).n;
  r["r1"] = s.r1;
  r["r2"] = s.r2;
  r["center_dim"] = s.center_dim;
  r["exponents"] = io::spectrum_json(s);
  r["rank_bound"] = s.r1 + s.r2 - 1;
  return r;
}

// centralizer

Json unit_json(const Unit& u, const Functionals& F) {
  double hyperplane = 0;
  for (std::size_t c = 0; c < F.class_count(); ++c) hyperplane += F.class_dim(c) * u.functionals[c];
  return {{"name", u.name},
          {"matrix", io::exact(u.matrix)},
          {"functionals", io::numbers(u.functionals)},
          {"lambda", io::numbers(u.lambda)},
          {"hyperplane_sum", hyperplane},
          {"hyperbolic", u.hyperbolic},
          {"generator", u.generator}};
}

Json centralizer_report(Session& session, const IntMatrix& L, long radius, bool cone, long cone_box,
                        const std::optional<std::pair<int, double>>& subgroup) {
  require_automorphism(L);
  const Functionals F(L);
  CommutantLattice cl = commutant_basis(L);
  UnitSearchStats stats;
  unit_search(cl, F, radius, &stats);

  Json r;
  r["radius"] = radius;
  Json basis = Json::array();
  for (const auto& b : cl.basis) basis.push_back(io::exact(b));
  r["commutant_basis"] = std::move(basis);
  r["power_basis"] = cl.power_basis;
  r["dropped_class"] = F.dropped_class();
  Json units = Json::array();
  for (const auto& u : cl.units) units.push_back(unit_json(u, F));
  r["units"] = std::move(units);
  Json torsion = Json::array();
  for (const auto& u : cl.finite_order) torsion.push_back(unit_json(u, F));
  r["finite_order"] = std::move(torsion);
  r["achieved_rank"] = cl.achieved_rank;
  r["rank_bound"] = cl.rank_bound;
  r["search"] = {{"candidates", stats.candidates},
                 {"passed_prefilter", stats.passed_prefilter},
                 {"units_found", stats.units_found},
                 {"confirmed_dependent", stats.confirmed_dependent},
                 {"unconfirmed_dependent", stats.unconfirmed_dependent}};

  if (cone) {
    r["cone"] = session.run("cone", [&]() -> Json {
      const auto hit = cone_search_center_dominating(cl, F, cone_box);
      if (!hit) return {{"found", false}, {"box", cone_box}};
      return {{"found", true},
              {"box", cone_box},
              {"word", hit->word},
              {"exponents", hit->exponents},
              {"matrix", io::exact(hit->matrix)},
              {"functionals", io::numbers(hit->functionals)},
              {"center_log_det", hit->center_log_det},
              {"domination_ratio", hit->domination_ratio},
              {"unstable_is_center", hit->unstable_is_center}};
    });
  }
  if (subgroup) {
    r["subgroup"] = session.run("subgroup", [&]() -> Json {
      const auto b = bounded_centralizer_subgroup(cl, F, subgroup->first, subgroup->second);
      Json gens = Json::array();
      for (const auto& g : b.generators) gens.push_back(io::exact(g));
      return {{"r", subgroup->first},
              {"Q", subgroup->second},
              {"words", b.words},
              {"exponents", b.exponents},
              {"generators", std::move(gens)},
              {"omega_bound", b.omega_bound},
              {"denominator", b.denominator},
              {"words_checked", b.words_checked},
              {"worst_slack", b.worst_slack},
              {"certificate", b.certificate}};
    });
  }
  return r;
}

// construct

Json construct_report(const ConstructResult& c) {
  const IntMatrix J = symplectic_form(c.L);
  const IntMatrix residual = c.L.transpose() * J * c.L - J;
  Json r;
  r["matrix"] = io::exact(c.L);
  r["base_seed"] = io::exact(c.base_seed);
  r["seed"] = io::exact(c.seed);
  r["char_poly"] = io::exact(c.report.q);
  r["power"] = c.power;
  r["phase"] = c.phase;
  r["candidates"] = c.candidates;
  r["det"] = io::exact(c.report.det);
  r["irreducible"] = c.report.q_irreducible;
  r["property_p"] = c.report.property_p;
  r["spread"] = c.spread;
  r["ergodic"] = c.ergodic;
  r["poly_in_tn"] = c.poly_in_tn;
  r["exponents"] = io::numbers(c.exponents);
  r["symplectic"] = {{"J", io::exact(J)}, {"det", io::exact(det_exact(J))}, {"residual_zero", residual.is_zero()}};
  return r;
}

// dynamics

std::size_t parse_class(const std::string& s, std::size_t classes) {
  std::string digits = s;
  long offset = 0;
  if (s.rfind("chi", 0) == 0) {
    digits = s.substr(3);
    offset = 1;
  }
  char* end = nullptr;
  const long v = std::strtol(digits.c_str(), &end, 10);
  if (digits.empty() || *end != '\0') throw ParseError("bad exponent class \"" + s + "\"");
  const long idx = v - offset;
  if (idx < 0 || static_cast<std::size_t>(idx) >= classes)
    throw PreconditionError("exponent class " + s + " out of range (" + std::to_string(classes) + " classes)");
  return static_cast<std::size_t>(idx);
}

void require_margin(const TorusMap& f) {
  if (!f.margin_ok())
    throw PreconditionError("perturbation too large: sup|Du| exceeds the invertibility margin " +
                            io::decimal(f.margin()));
}

struct DynamicsArgs {
  std::optional<std::string> cocycle;
  bool lyapunov = false, fixed = false, semiconjugacy = false, volume = false;
  std::optional<double> tol;
  std::size_t orbits = 16, steps = 100000, volume_steps = 2000, samples = 64;
  double lemma_epsilon = 0.05, lemma_c = 1.0;
  std::string with;
};

Json dynamics_report(Session& session, const TorusMap& f, const DynamicsArgs& a,
                     const std::optional<TorusMap>& g_opt) {
  Json r;
  r["dimension"] = f.dim();
  r["epsilon"] = f.epsilon();
  r["modes"] = f.modes().size();
  r["sup_dv"] = f.sup_dv();
  r["margin"] = f.margin();
  r["margin_ok"] = f.margin_ok();
  Json ops;
  if (a.cocycle) {
    ops["cocycle"] = session.run("cocycle", [&]() -> Json {
      const CertifiedSpectrum s = classify(f.linear_part());
      const std::size_t c = parse_class(*a.cocycle, s.lyapunov.size());
      CocycleOptions o;
      if (a.tol) o.tol = *a.tol;
      o.samples_per_axis = a.samples;
      const CocycleSolution sol = solve_twisted_cocycle(f, c, o);
      return {{"class", c},
              {"exponent", sol.exponent},
              {"expanding", sol.expanding},
              {"tol", o.tol},
              {"truncation_N", sol.truncation_N},
              {"rho", sol.rho},
              {"tail", sol.tail},
              {"bound", sol.bound},
              {"residual_sup", sol.residual_sup},
              {"samples", sol.samples},
              {"seed", sol.seed}};
    });
  }
  if (a.lyapunov) {
    ops["lyapunov"] = session.run("lyapunov", [&]() -> Json {
      require_margin(f);
      LyapunovOptions o;
      o.n_orbits = a.orbits;
      o.n_steps = a.steps;
      const LyapunovResult res = lyapunov_spectrum(f, o);
      return {{"orbits", o.n_orbits},
              {"steps", o.n_steps},
              {"seed", o.seed},
              {"exponents", io::numbers(res.exponents)},
              {"stderr", io::numbers(res.stderr_)}};
    });
  }
  if (a.fixed) {
    ops["fixed_points"] = session.run("fixed_points", [&]() -> Json {
      require_margin(f);
      const FixedPointReport fp = fixed_points(f);
      Json pts = Json::array();
      for (const auto& p : fp.points) pts.push_back(io::numbers(p));
      return {{"algebraic_count", io::exact(fp.algebraic_count)},
              {"numeric_count", fp.points.size()},
              {"counts_match", fp.counts_match},
              {"seeds", fp.seeds},
              {"points", std::move(pts)}};
    });
  }
  if (a.semiconjugacy) {
    ops["semiconjugacy"] = session.run("semiconjugacy", [&]() -> Json {
      require_margin(f);
      SemiconjugacyOptions o;
      if (a.tol) o.tol = *a.tol;
      o.samples_per_axis = a.samples;
      const Semiconjugacy H = franks_manning(f, o);
      const TorusMap f2 = f.power(2);
      return {{"tol", o.tol},
              {"seed", o.seed},
              {"residual_sup", H.residual_sup},
              {"bound", H.bound},
              {"h0", io::numbers(H.h0)},
              {"pair_check_self", commuting_pair_check(f, H, a.samples, o.seed)},
              {"pair_check_square", commuting_pair_check(f2, H, a.samples, o.seed)}};
    });
  }
  if (a.volume) {
    ops["volume_growth"] = session.run("volume_growth", [&]() -> Json {
      require_margin(f);
      const TorusMap& g = g_opt ? *g_opt : f;
      if (g_opt) require_margin(g);
      VolumeGrowthOptions o;
      o.n_orbits = std::min<std::size_t>(a.orbits, 64);
      o.lemma_epsilon = a.lemma_epsilon;
      o.lemma_c = a.lemma_c;
      const VolumeGrowthReport v = center_volume_growth(f, g, a.volume_steps, o);
      return {{"steps", v.steps},
              {"orbits", o.n_orbits},
              {"seed", o.seed},
              {"per_orbit", io::numbers(v.per_orbit)},
              {"rate", v.rate},
              {"linear_center_log_det", v.linear_center_log_det},
              {"lemma_epsilon", o.lemma_epsilon},
              {"lemma_c", o.lemma_c},
              {"lemma_rhs", v.lemma_rhs},
              {"lemma_holds", v.lemma_holds}};
    });
  }
  r["operations"] = ops.is_null() ? Json::object() : ops;
  return r;
}

int run_guarded(const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    std::cerr << "toralctl: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "toralctl: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toral automorphism analysis"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  app.add_flag("--timing", g.timing, "add wall-clock seconds to the report");
  app.add_option("-o,--out", g.out, "write the report here instead of stdout");

  std::string matrix_path;
  std::vector<long> spreads{1};
  auto* analyze = app.add_subcommand("analyze", "spectral and algebraic hypotheses of a matrix");
  analyze->add_option("matrix", matrix_path, "matrix JSON file")->required();
  analyze->add_option("--spread", spreads, "spread ratios to test")->check(CLI::PositiveNumber);

  long radius = 3, cone_box = 8;
  bool cone = false;
  std::vector<double> subgroup_args;
  auto* central = app.add_subcommand("centralizer", "units of the commutant and their Lyapunov functionals");
  central->add_option("matrix", matrix_path, "matrix JSON file")->required();
  central->add_option("--radius", radius, "unit search radius");
  central->add_flag("--cone", cone, "search for a center-dominating element");
  central->add_option("--cone-box", cone_box, "exponent box of the cone search");
  central->add_option("--subgroup", subgroup_args, "bounded subgroup for rank r and ratio Q")->expected(2);

  int dim = 4;
  long spread_r = 1;
  ConstructBudget budget;
  std::string matrix_out;
  auto* construct = app.add_subcommand("construct", "search for a matrix with property (P) and spread spectrum");
  construct->add_option("--dim", dim, "dimension")->required();
  construct->add_option("--spread", spread_r, "spread ratio r")->required();
  construct->add_option("--max-coeff", budget.max_coeff, "coefficient box (0 = from --max-candidates)");
  construct->add_option("--max-candidates", budget.max_candidates, "candidate budget");
  construct->add_option("--seconds", budget.seconds, "wall-clock budget");
  construct->add_option("--max-power", budget.max_power, "largest power tried");
  construct->add_option("--max-anchor", budget.max_anchor, "second-phase anchor range");
  construct->add_option("--matrix-out", matrix_out, "write the matrix file here");

  std::string config_path;
  DynamicsArgs da;
  auto* dyn = app.add_subcommand("dynamics", "analyses of a perturbed toral map");
  dyn->add_option("config", config_path, "map config JSON file")->required();
  dyn->add_option("--cocycle", da.cocycle, "exponent class: index or chiK (K-th class, 1-based)");
  dyn->add_flag("--lyapunov", da.lyapunov);
  dyn->add_flag("--fixed-points", da.fixed);
  dyn->add_flag("--semiconjugacy", da.semiconjugacy);
  dyn->add_flag("--volume-growth", da.volume);
  dyn->add_option("--tol", da.tol, "solver tolerance")->check(CLI::PositiveNumber);
  dyn->add_option("--orbits", da.orbits, "orbits for Lyapunov and volume growth")->check(CLI::PositiveNumber);
  dyn->add_option("--steps", da.steps, "steps per Lyapunov orbit")->check(CLI::PositiveNumber);
  dyn->add_option("--volume-steps", da.volume_steps, "iterates for volume growth")->check(CLI::PositiveNumber);
  dyn->add_option("--samples", da.samples, "sample points per axis")->check(CLI::PositiveNumber);
  dyn->add_option("--lemma-epsilon", da.lemma_epsilon);
  dyn->add_option("--lemma-c", da.lemma_c);
  dyn->add_option("--with", da.with, "config of the commuting map for volume growth");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (g.threads < 0) {
    if (const char* env = std::getenv("THREADS")) {
      char* end = nullptr;
      const long t = std::strtol(env, &end, 10);
      if (*env == '\0' || *end != '\0' || t < 0) {
        std::cerr << "toralctl: THREADS must be a nonnegative integer\n";
        return 1;
      }
      g.threads = static_cast<int>(t);
    }
  }
  if (g.threads >= 0) set_thread_count(static_cast<std::size_t>(g.threads));

  Session session{g.timing};
  const auto t0 = Clock::now();
  auto finish = [&](Json report) {
    if (g.timing) report["wall_seconds"] = std::chrono::duration<double>(Clock::now() - t0).count();
    emit(report, g);
    return session.exit_code;
  };

  return run_guarded([&]() -> int {
    if (*analyze) {
      std::string text;
      const IntMatrix L = load_matrix(matrix_path, text);
      Json r = header("analyze");
      r["input"] = input_block(matrix_path, text);
      r.update(analyze_report(L, spreads));
      return finish(std::move(r));
    }
    if (*central) {
      std::string text;
      const IntMatrix L = load_matrix(matrix_path, text);
      if (radius < 0) throw PreconditionError("radius must be nonnegative");
      std::optional<std::pair<int, double>> sub;
      if (!subgroup_args.empty()) {
        const double rr = subgroup_args[0];
        if (rr != static_cast<int>(rr) || rr < 1) throw ParseError("--subgroup rank must be a positive integer");
        sub = std::make_pair(static_cast<int>(rr), subgroup_args[1]);
      }
      Json r = header("centralizer");
      r["input"] = input_block(matrix_path, text);
      r.update(centralizer_report(session, L, radius, cone, cone_box, sub));
      return finish(std::move(r));
    }
    if (*construct) {
      const ConstructResult c = construct_spread(dim, spread_r, budget);
      Json r = header("construct");
      r["request"] = {{"dim", dim},
                      {"spread", spread_r},
                      {"max_coeff", budget.max_coeff},
                      {"max_candidates", budget.max_candidates},
                      {"seconds", budget.seconds},
                      {"max_power", budget.max_power},
                      {"max_anchor", budget.max_anchor}};
      r.update(construct_report(c));
      if (!matrix_out.empty()) io::write_file(matrix_out, io::dump(io::matrix_file(c.L)));
      return finish(std::move(r));
    }
    const std::string text = io::read_file(config_path);
    const TorusMap f = io::map_from_json(io::parse_json(text, config_path), MarginPolicy::Defer);
    std::optional<TorusMap> other;
    Json r = header("dynamics");
    r["input"] = input_block(config_path, text);
    if (!da.with.empty()) {
      const std::string wt = io::read_file(da.with);
      other = io::map_from_json(io::parse_json(wt, da.with), MarginPolicy::Defer);
      r["with"] = input_block(da.with, wt);
    }
    if (!da.cocycle && !da.lyapunov && !da.fixed && !da.semiconjugacy && !da.volume)
      throw ParseError("dynamics needs at least one of --cocycle, --lyapunov, --fixed-points, "
                       "--semiconjugacy, --volume-growth");
    r.update(dynamics_report(session, f, da, other));
    return finish(std::move(r));
  });
}
