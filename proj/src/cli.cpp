#include "segscore/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "segscore/cramer.hpp"
#include "segscore/embedding.hpp"
#include "segscore/error.hpp"
#include "segscore/law_spec.hpp"
#include "segscore/lattice.hpp"
#include "segscore/spitzer.hpp"
#include "segscore/verify.hpp"
#include "segscore/walk.hpp"

#ifndef SEGSCORE_VERSION
#define SEGSCORE_VERSION "0.0.0"
#endif

namespace segscore::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::string law;
  std::uint64_t seed = kDefaultSeed;
  unsigned workers = 0;
  std::string out_dir = ".";
  std::string continuation = "auto";
};

/// Everything a command produced, collected for the manifest.
struct RunRecord {
  json extra = json::object();
  std::vector<std::string> outputs;
  int exit_code = kOk;
};

using Action = std::function<void(RunRecord&)>;

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

fs::path resolve(const Common& c, const std::string& name) {
  const fs::path p(name);
  return p.is_absolute() ? p : fs::path(c.out_dir) / p;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  body(os);
  os.flush();
  if (!os) throw Error("failed writing " + path.string());
}

void emit_report(const Common& c, const std::string& name, const json& report,
                 std::ostream& out, RunRecord& rec) {
  const auto path = resolve(c, name);
  write_file(path, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
  rec.outputs.push_back(path.string());
  out << report.dump(2) << '\n';
}

/// Parses "a,b,c" or "lo:hi:count".
std::vector<double> parse_grid(const std::string& text) {
  auto number = [&](const std::string& tok) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ConfigError("bad grid value '" + tok + "' in '" + text + "'");
    }
    if (used != tok.size() || !std::isfinite(v)) {
      throw ConfigError("bad grid value '" + tok + "' in '" + text + "'");
    }
    return v;
  };
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) parts.push_back(cur);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
  };
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("range grid must be lo:hi:count");
    const double count = number(parts[2]);
    if (count < 1 || count != std::floor(count)) throw ConfigError("grid count must be >= 1");
    return linear_grid(number(parts[0]), number(parts[1]), static_cast<std::int64_t>(count));
  }
  std::vector<double> out;
  for (const auto& tok : split(text, ',')) out.push_back(number(tok));
  if (out.empty()) throw ConfigError("grid is empty");
  return out;
}

void add_common(CLI::App* app, Common& c, bool randomized) {
  app->add_option("--law", c.law, "Step law, e.g. gaussian_drift:mu=-0.5,sigma=1")->required();
  app->add_option("--out-dir", c.out_dir, "Directory for outputs and manifest.json");
  if (randomized) {
    app->add_option("--seed", c.seed, "Master seed");
    app->add_option("--workers", c.workers, "Worker threads (0 = all cores)");
  }
}

void add_continuation(CLI::App* app, Common& c) {
  app->add_option("--continuation", c.continuation,
                  "Continuation past step n: direct, tilted or auto")
      ->check(CLI::IsMember({"direct", "tilted", "auto"}));
}

struct SeriesOptions {
  std::string estimator = "auto";
  std::int64_t samples_per_term = 100000;
  std::int64_t n_terms = 0;
  double target_tail = 1e-6;
  std::int64_t max_terms = 500;
};

void add_series(CLI::App* app, SeriesOptions& s) {
  app->add_option("--estimator", s.estimator,
                  "Term estimator: monte_carlo, exact_lattice or auto")
      ->check(CLI::IsMember({"monte_carlo", "exact_lattice", "auto"}));
  app->add_option("--samples-per-term", s.samples_per_term, "Monte Carlo walks per term")
      ->check(CLI::PositiveNumber);
  app->add_option("--n-terms", s.n_terms, "Series truncation N (0 = from --target-tail)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--target-tail", s.target_tail, "Target truncation bound")
      ->check(CLI::PositiveNumber);
  app->add_option("--max-terms", s.max_terms, "Cap on N")->check(CLI::PositiveNumber);
}

/// The series Monte Carlo pool uses master seed + 1 so it never shares
/// streams with path simulation on seed.
SeriesConfig make_series(const SeriesOptions& s, const StepLaw& law, const Common& c) {
  SeriesConfig cfg;
  if (s.n_terms > 0) cfg.n_terms = s.n_terms;
  cfg.target_tail = s.target_tail;
  cfg.max_terms = s.max_terms;
  if (s.estimator == "auto") {
    cfg.estimator.kind = law.lattice() ? EstimatorKind::exact_lattice : EstimatorKind::monte_carlo;
  } else {
    cfg.estimator.kind =
        s.estimator == "exact_lattice" ? EstimatorKind::exact_lattice : EstimatorKind::monte_carlo;
  }
  cfg.estimator.samples_per_term = s.samples_per_term;
  cfg.estimator.master_seed = c.seed + 1;
  cfg.estimator.workers = c.workers;
  return cfg;
}

RunSettings settings(const Common& c) {
  return RunSettings{c.seed, c.workers, parse_continuation(c.continuation)};
}

/// Resolved command line of the selected subcommand chain: every option with
/// its given or default value, so that replaying it is independent of
/// later changes to defaults.
std::vector<std::string> resolved_args(const std::vector<const CLI::App*>& chain,
                                       json& config) {
  std::vector<std::string> args;
  for (const CLI::App* app : chain) {
    args.push_back(app->get_name());
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
      const std::string& name = opt->get_lnames().front();
      if (name == "out-dir") continue;  // relocatable on rerun
      std::string value;
      if (opt->count() > 0) {
        value = opt->results().back();
      } else {
        value = opt->get_default_str();
      }
      if (value.empty()) continue;
      args.push_back("--" + name);
      args.push_back(value);
      const json typed = json::parse(value, nullptr, false);
      config[name] = typed.is_number() || typed.is_boolean() ? typed : json(value);
    }
  }
  return args;
}

int run_from_manifest(const std::vector<std::string>& args, std::ostream& out,
                      std::ostream& err);

int dispatch_impl(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (!args.empty() && args.front() == "--from-manifest") return run_from_manifest(args, out, err);

  CLI::App app{"Segmental score statistics of reflected random walks", "segscore"};
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", std::string(SEGSCORE_VERSION));
  app.require_subcommand(1);
  app.footer("Rerun a recorded command: segscore --from-manifest <manifest.json> [--out-dir DIR]");

  Common c;
  Action action;
  std::vector<const CLI::App*> chain;

  // gamma
  double tol = kDefaultCramerTol;
  std::string gamma_report = "gamma.json";
  auto* gamma_cmd = app.add_subcommand("gamma", "Cramer coefficient and Chernoff constant");
  add_common(gamma_cmd, c, false);
  gamma_cmd->add_option("--tol", tol, "Tolerance on |M(gamma) - 1|")->check(CLI::PositiveNumber);
  gamma_cmd->add_option("--report", gamma_report, "Report file name");
  gamma_cmd->callback([&] {
    action = [&](RunRecord& rec) {
      const StepLaw law = parse_law(c.law);
      const auto sol = solve_gamma(law, tol);
      const json rep = {{"law", law_to_json(law)},
                        {"gamma", sol.gamma},
                        {"rho", sol.rho},
                        {"s_at_min", sol.s_at_min},
                        {"tolerance", sol.tolerance},
                        {"bracket", {sol.bracket.lo, sol.bracket.hi}}};
      emit_report(c, gamma_report, rep, out, rec);
    };
  });

  // simulate
  std::int64_t n = 2000, paths = 1, max_steps = 0;
  double x = 13, y = 12;
  std::string csv_out = "triplets.csv";
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate (R_n, Q_ny, O_xy) triplets");
  add_common(sim_cmd, c, true);
  add_continuation(sim_cmd, c);
  sim_cmd->add_option("--n", n, "Walk length")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--x", x, "Level x")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--y", y, "Level y")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--paths", paths, "Number of paths")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--max-steps", max_steps, "Step cap per path (0 = automatic)")
      ->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--out", csv_out, "CSV file name");
  sim_cmd->callback([&] {
    action = [&](RunRecord& rec) {
      BatchConfig b{parse_law(c.law)};
      b.n = n;
      b.x = x;
      b.y = y;
      b.paths = paths;
      b.master_seed = c.seed;
      b.max_steps = max_steps;
      b.mode = parse_continuation(c.continuation);
      b.workers = c.workers;
      const auto samples = run_batch(b);
      const auto path = resolve(c, csv_out);
      write_file(path, [&](std::ostream& os) { write_triplets_csv(os, samples); });
      rec.outputs.push_back(path.string());
      std::int64_t inexact = 0;
      for (const auto& s : samples) inexact += s.hit_exact ? 0 : 1;
      rec.extra["hit_time_lower_bounds"] = inexact;
      out << json{{"paths", paths}, {"out", path.string()}, {"hit_time_lower_bounds", inexact}}
                 .dump(2)
          << '\n';
    };
  });

  // spitzer-cf
  std::string transform = "cf_O", grid = "-5:5:41", cf_out = "spitzer_cf.csv";
  SeriesOptions series_opt;
  auto* cf_cmd = app.add_subcommand("spitzer-cf", "Series transforms of O_inf and R_inf");
  add_common(cf_cmd, c, true);
  add_series(cf_cmd, series_opt);
  cf_cmd->add_option("--transform", transform, "cf_O, cf_R or laplace_O")
      ->check(CLI::IsMember({"cf_O", "cf_R", "laplace_O"}));
  cf_cmd->add_option("--grid", grid, "Arguments: 'a,b,c' or 'lo:hi:count'");
  cf_cmd->add_option("--out", cf_out, "CSV file name");
  cf_cmd->callback([&] {
    action = [&](RunRecord& rec) {
      const StepLaw law = parse_law(c.law);
      const auto args_grid = parse_grid(grid);
      const SeriesConfig cfg = make_series(series_opt, law, c);
      const SpitzerSeries series(law, cfg);
      std::vector<TransformEval> evals;
      if (transform == "cf_O") {
        evals = series.cf_O(args_grid);
      } else if (transform == "cf_R") {
        evals = series.cf_R(args_grid);
      } else {
        evals = series.laplace_O(args_grid);
      }
      const auto path = resolve(c, cf_out);
      write_file(path, [&](std::ostream& os) { write_transform_csv(os, evals); });
      rec.outputs.push_back(path.string());
      rec.extra["estimator"] = to_string(cfg.estimator.kind);
      out << json{{"transform", transform},
                  {"gamma", series.gamma()},
                  {"rho", series.rho()},
                  {"n_terms", series.n_terms()},
                  {"tail_bound", series.tail_bound()},
                  {"estimator", to_string(cfg.estimator.kind)},
                  {"out", path.string()}}
                 .dump(2)
          << '\n';
    };
  });

  // embed
  double t = 2000, level = 25;
  std::string embed_out = "embedded.csv";
  auto* embed_cmd = app.add_subcommand("embed", "Compound-Poisson embedding samples");
  add_common(embed_cmd, c, true);
  add_continuation(embed_cmd, c);
  embed_cmd->add_option("--t", t, "Time horizon")->check(CLI::PositiveNumber);
  embed_cmd->add_option("--x", level, "Level x for Z(x)")->check(CLI::PositiveNumber);
  embed_cmd->add_option("--paths", paths, "Number of paths")->check(CLI::PositiveNumber);
  embed_cmd->add_option("--max-steps", max_steps, "Step cap per path (0 = automatic)")
      ->check(CLI::NonNegativeNumber);
  embed_cmd->add_option("--out", embed_out, "CSV file name");
  embed_cmd->callback([&] {
    action = [&](RunRecord& rec) {
      const PathSimulator sim(parse_law(c.law), parse_continuation(c.continuation));
      const auto samples = embed_batch(sim, t, level, paths, c.seed, c.workers, max_steps);
      const auto path = resolve(c, embed_out);
      write_file(path, [&](std::ostream& os) { write_embedded_csv(os, samples); });
      rec.outputs.push_back(path.string());
      rec.extra["poisson_method"] = poisson_method(t);
      out << json{{"paths", paths}, {"out", path.string()}, {"poisson_method", poisson_method(t)}}
                 .dump(2)
          << '\n';
    };
  });

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Statistical checks of the limit laws");
  verify_cmd->require_subcommand(1);
  std::string report_name, samples_out;

  auto add_verify = [&](const std::string& name, const std::string& desc) {
    auto* sub = verify_cmd->add_subcommand(name, desc);
    add_common(sub, c, true);
    sub->add_option("--report", report_name, "Report file name (default <check>_report.json)");
    return sub;
  };
  auto finish_verify = [&](const std::string& name, const json& rep, bool pass, RunRecord& rec) {
    emit_report(c, report_name.empty() ? name + "_report.json" : report_name, rep, out, rec);
    rec.exit_code = pass ? kOk : kTestFailed;
  };

  FactorizationConfig fact;
  auto* fact_cmd = add_verify("factorization", "gamma (R_n + O_{x+y}) against Exp(1)");
  add_continuation(fact_cmd, c);
  double fact_level = 25;
  double fact_y = 0;
  fact_cmd->add_option("--n", fact.n, "Walk length")->check(CLI::PositiveNumber);
  fact_cmd->add_option("--level", fact_level, "Crossing level x + y")->check(CLI::PositiveNumber);
  fact_cmd->add_option("--y", fact_y, "Level y (0 = level / 2)")
      ->check(CLI::NonNegativeNumber);
  fact_cmd->add_option("--paths", fact.paths, "Number of paths")->check(CLI::PositiveNumber);
  fact_cmd->add_option("--threshold", fact.threshold, "Pass if KS statistic <= threshold");
  fact_cmd->add_option("--samples-out", samples_out, "Optional triplet CSV file name");
  fact_cmd->callback([&] {
    action = [&](RunRecord& rec) {
      fact.y = fact_y > 0 ? fact_y : fact_level / 2;
      fact.x = fact_level - fact.y;
      if (!(fact.x > 0)) throw ConfigError("--y must be below --level");
      const auto r = verify_factorization(parse_law(c.law), fact, settings(c));
      if (!samples_out.empty()) {
        const auto p = resolve(c, samples_out);
        write_file(p, [&](std::ostream& os) { write_triplets_csv(os, r.samples); });
        rec.outputs.push_back(p.string());
      }
      finish_verify("factorization", r.to_json(), r.ks.pass, rec);
    };
  });

  IndependenceConfig indep;
  auto* indep_cmd = add_verify("independence", "Asymptotic independence of the triplet");
  add_continuation(indep_cmd, c);
  indep_cmd->add_option("--n", indep.n, "Walk length")->check(CLI::PositiveNumber);
  indep_cmd->add_option("--x", indep.x, "Level x")->check(CLI::PositiveNumber);
  indep_cmd->add_option("--y", indep.y, "Level y")->check(CLI::PositiveNumber);
  indep_cmd->add_option("--paths", indep.paths, "Number of paths")->check(CLI::PositiveNumber);
  indep_cmd->add_option("--boot", indep.n_boot, "Permutation resamples")
      ->check(CLI::PositiveNumber);
  indep_cmd->add_option("--max-abs", indep.max_abs, "Absolute cap on sup_diff");
  indep_cmd->add_option("--samples-out", samples_out, "Optional triplet CSV file name");
  indep_cmd->callback([&] {
    action = [&](RunRecord& rec) {
      const auto r = verify_independence(parse_law(c.law), indep, settings(c));
      if (!samples_out.empty()) {
        const auto p = resolve(c, samples_out);
        write_file(p, [&](std::ostream& os) { write_triplets_csv(os, r.samples); });
        rec.outputs.push_back(p.string());
      }
      finish_verify("independence", r.to_json(), r.pass, rec);
    };
  });

  GumbelConfig gum;
  auto* gum_cmd = add_verify("gumbel", "gamma R*_n - log n against a Gumbel law");
  gum_cmd->add_option("--n", gum.n, "Walk length")->check(CLI::PositiveNumber);
  gum_cmd->add_option("--paths", gum.paths, "Number of paths")->check(CLI::PositiveNumber);
  gum_cmd->add_option("--threshold", gum.threshold, "Pass if KS statistic <= threshold");
  gum_cmd->add_option("--samples-out", samples_out, "Optional R*_n CSV file name");
  gum_cmd->callback([&] {
    action = [&](RunRecord& rec) {
      const auto r = verify_gumbel(parse_law(c.law), gum, settings(c));
      if (!samples_out.empty()) {
        const auto p = resolve(c, samples_out);
        write_file(p, [&](std::ostream& os) {
          os << "path_id,rstar_n\n" << std::setprecision(17);
          for (std::size_t i = 0; i < r.rstar.size(); ++i) os << i << ',' << r.rstar[i] << '\n';
        });
        rec.outputs.push_back(p.string());
      }
      finish_verify("gumbel", r.to_json(), r.report.pass, rec);
    };
  });

  OvershootLimitConfig ovl;
  auto* ovl_cmd = add_verify("overshoot-limit", "Two-sample KS of O at two levels");
  add_continuation(ovl_cmd, c);
  ovl_cmd->add_option("--level-a", ovl.level_a, "First level")->check(CLI::PositiveNumber);
  ovl_cmd->add_option("--level-b", ovl.level_b, "Second level")->check(CLI::PositiveNumber);
  ovl_cmd->add_option("--paths", ovl.paths, "Paths per level")->check(CLI::PositiveNumber);
  ovl_cmd->add_option("--threshold", ovl.threshold, "Pass if KS statistic <= threshold");
  ovl_cmd->add_option("--samples-out", samples_out, "Optional overshoot CSV file name");
  ovl_cmd->callback([&] {
    action = [&](RunRecord& rec) {
      const auto r = verify_overshoot_limit(parse_law(c.law), ovl, settings(c));
      if (!samples_out.empty()) {
        const auto p = resolve(c, samples_out);
        write_file(p, [&](std::ostream& os) {
          os << "path_id,level,overshoot\n" << std::setprecision(17);
          for (std::size_t i = 0; i < r.overshoot_a.size(); ++i) {
            os << i << ',' << r.level_a << ',' << r.overshoot_a[i] << '\n';
          }
          for (std::size_t i = 0; i < r.overshoot_b.size(); ++i) {
            os << i << ',' << r.level_b << ',' << r.overshoot_b[i] << '\n';
          }
        });
        rec.outputs.push_back(p.string());
      }
      finish_verify("overshoot_limit", r.to_json(), r.ks.pass, rec);
    };
  });

  OracleConfig orc;
  auto* orc_cmd = add_verify("oracle", "Monte Carlo law of R_n against the exact lattice law");
  orc_cmd->add_option("--n", orc.n, "Walk length")->check(CLI::PositiveNumber);
  orc_cmd->add_option("--paths", orc.paths, "Number of paths")->check(CLI::PositiveNumber);
  orc_cmd->add_option("--floor", orc.floor, "Tolerance floor")->check(CLI::NonNegativeNumber);
  orc_cmd->callback([&] {
    action = [&](RunRecord& rec) {
      const auto r = verify_oracle(parse_law(c.law), orc, settings(c));
      finish_verify("oracle", r.to_json(), r.pass, rec);
    };
  });

  ZinfConfig zc;
  std::string v_grid = "0.5,1,2";
  SeriesOptions zinf_series;
  auto* zinf_cmd = add_verify("zinf", "Laplace transform of Z(x) against the series");
  add_continuation(zinf_cmd, c);
  add_series(zinf_cmd, zinf_series);
  zinf_cmd->add_option("--x", zc.level_x, "Level x")->check(CLI::PositiveNumber);
  zinf_cmd->add_option("--t", zc.t, "Embedding horizon")->check(CLI::PositiveNumber);
  zinf_cmd->add_option("--v-grid", v_grid, "Laplace arguments: 'a,b,c' or 'lo:hi:count'");
  zinf_cmd->add_option("--paths", zc.paths, "Number of paths")->check(CLI::PositiveNumber);
  zinf_cmd->add_option("--threshold", zc.threshold, "Pass if max gap < threshold");
  zinf_cmd->callback([&] {
    action = [&](RunRecord& rec) {
      const StepLaw law = parse_law(c.law);
      zc.v_grid = parse_grid(v_grid);
      zc.master_seed = c.seed;
      zc.workers = c.workers;
      zc.series = make_series(zinf_series, law, c);
      const PathSimulator sim(law, parse_continuation(c.continuation));
      const auto r = verify_zinf(sim, zc);
      rec.extra["poisson_method"] = poisson_method(zc.t);
      finish_verify("zinf", to_json(r), r.pass, rec);
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << SEGSCORE_VERSION << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* leaf = &app;
    while (!leaf->get_subcommands().empty()) leaf = leaf->get_subcommands().front();
    err << leaf->help();
    return kUsageError;
  }

  for (const CLI::App* a = &app; !a->get_subcommands().empty();) {
    a = a->get_subcommands().front();
    chain.push_back(a);
  }

  json config = json::object();
  const auto replay = resolved_args(chain, config);
  std::vector<std::string> command;
  for (const auto* a : chain) command.push_back(a->get_name());

  const auto started = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord rec;
  int code = kOk;
  std::string error_text;
  try {
    if (!action) throw ConfigError("no command selected");
    action(rec);
    code = rec.exit_code;
  } catch (const ConfigError& e) {
    code = kUsageError;
    error_text = e.what();
  } catch (const NoRoot& e) {
    code = kUsageError;
    error_text = e.what();
  } catch (const std::exception& e) {
    code = kRuntimeError;
    error_text = e.what();
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!error_text.empty()) err << "error: " << error_text << '\n';
  if (code == kUsageError) err << chain.back()->help();

  json manifest = {{"tool", "segscore"},
                   {"version", SEGSCORE_VERSION},
                   {"command", command},
                   {"args", replay},
                   {"config", config},
                   {"seed", c.seed},
                   {"workers", c.workers},
                   {"out_dir", c.out_dir},
                   {"started_at", utc_timestamp(started)},
                   {"wall_clock_seconds", wall},
                   {"outputs", rec.outputs},
                   {"exit_code", code}};
  try {
    manifest["law"] = law_to_json(parse_law(c.law));
  } catch (const Error&) {
    manifest["law"] = c.law;
  }
  for (auto& [k, v] : rec.extra.items()) manifest[k] = v;
  if (!error_text.empty()) manifest["error"] = error_text;
  try {
    write_file(resolve(c, "manifest.json"),
               [&](std::ostream& os) { os << manifest.dump(2) << '\n'; });
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    if (code == kOk || code == kTestFailed) code = kRuntimeError;
  }
  return code;
}

int run_from_manifest(const std::vector<std::string>& args, std::ostream& out,
                      std::ostream& err) {
  std::optional<std::string> out_dir;
  if (args.size() == 4 && args[2] == "--out-dir") {
    out_dir = args[3];
  } else if (args.size() != 2) {
    err << "usage: segscore --from-manifest <manifest.json> [--out-dir DIR]\n";
    return kUsageError;
  }
  json manifest;
  {
    std::ifstream is(args[1]);
    if (!is) {
      err << "error: cannot read " << args[1] << '\n';
      return kUsageError;
    }
    try {
      is >> manifest;
    } catch (const json::exception& e) {
      err << "error: " << args[1] << ": " << e.what() << '\n';
      return kUsageError;
    }
  }
  std::vector<std::string> replay;
  try {
    replay = manifest.at("args").get<std::vector<std::string>>();
    if (!out_dir) out_dir = manifest.at("out_dir").get<std::string>();
  } catch (const json::exception& e) {
    err << "error: " << args[1] << " is not a segscore manifest: " << e.what() << '\n';
    return kUsageError;
  }
  if (replay.empty()) {
    err << "error: manifest has an empty command\n";
    return kUsageError;
  }
  replay.push_back("--out-dir");
  replay.push_back(*out_dir);
  return dispatch_impl(replay, out, err);
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return dispatch_impl(args, out, err);
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, out, err);
}

}  // namespace segscore::cli
