// SPDX-License-Identifier: Apache-2.0
//
// hmortar: command-line front end for the harmonic mortar library.
//
//   hmortar infsup       --config run.json [--out table.csv] [--scope full] [--threads 4]
//   hmortar oracle       [--config run.json] [--n-max 10]
//   hmortar solve        --config run.json [--out solution.csv] [--dump-matrices]
//   hmortar convergence  --config run.json [--out rates.csv]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hmortar/hmortar.hpp"

namespace {

using namespace hmortar;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config_path;
  std::string out;
  std::string scope;
  bool dump_matrices = false;
  int threads = 1;
  int n_max = 10;
};

RunConfig load(const Options& opt) {
  RunConfig cfg = opt.config_path.empty() ? RunConfig{} : load_config(opt.config_path);
  if (!opt.scope.empty()) cfg.multiplier.scope = detail::parse_scope(opt.scope);
  if (!opt.out.empty()) cfg.output.csv = opt.out;
  cfg.validate();
  return cfg;
}

std::string pad(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

// Writes `body` to the configured CSV file, or to stdout when none is set.
template <typename Fn>
void emit_csv(const RunConfig& cfg, Fn&& body) {
  if (cfg.output.csv.empty()) {
    std::cout.imbue(std::locale::classic());
    body(std::cout);
    return;
  }
  std::ofstream out = open_output(cfg.output.csv);
  body(out);
  std::cout << "wrote " << cfg.output.csv << '\n';
}

// ---------------------------------------------------------------------------

int cmd_infsup(const Options& opt) {
  const RunConfig cfg = load(opt);
  const auto& d = cfg.discretization;
  const auto& m = cfg.multiplier;
  const InfSupSetup setup = cfg.infsup_setup();
  const InfSupAnalyzer probe(setup);

  // Row labels: one per c value, or one per explicit N.
  std::vector<std::string> labels;
  if (!m.N.empty())
    for (int N : m.N) labels.push_back("N=" + std::to_string(N));
  else
    for (const auto& c : m.c) labels.push_back("c=" + c.label());

  std::vector<SweepCell> cells;
  for (int k : d.degrees)
    for (int level : d.levels) {
      const int n = probe.n_interface(level);
      if (!m.N.empty())
        for (int N : m.N) cells.push_back({level, k, std::nullopt, N});
      else
        for (const auto& c : m.c) cells.push_back({level, k, c.value, harmonic_order(c.value, n)});
    }
  const std::vector<SweepEntry> entries =
      infsup_sweep(setup, cells, m.scope, m.alpha, opt.threads);

  std::size_t failures = 0;
  for (const auto& e : entries)
    if (!e.result) {
      ++failures;
      std::cerr << "cell level=" << e.cell.level << " k=" << e.cell.degree << " N=" << e.cell.N
                << " failed: " << e.error << '\n';
    }

  const int digits = cfg.output.precision;
  emit_csv(cfg, [&](std::ostream& os) {
    os << kInfSupCsvHeader << '\n';
    for (const auto& e : entries)
      if (e.result) write_infsup_row(os, *e.result, digits);
  });

  // Formatted grid: rows = c (or N); columns = levels, or degrees when a
  // single level is requested.
  const bool by_degree = d.levels.size() == 1 && d.degrees.size() > 1;
  const std::size_t per_row = labels.size();
  auto cell_text = [&](std::size_t idx) {
    const auto& e = entries[idx];
    return e.result ? format_number(e.result->beta_discrete, digits) : std::string("fail");
  };
  const std::size_t w = 13;
  std::cout << "\ndiscrete inf-sup constants (" << to_string(m.scope) << " scope)\n";
  auto print_grid = [&](const std::vector<std::string>& heads,
                        const std::vector<std::size_t>& col_base) {
    std::cout << pad("", 10);
    for (const auto& h : heads) std::cout << pad(h, w);
    std::cout << '\n';
    for (std::size_t r = 0; r < per_row; ++r) {
      std::cout << pad(labels[r], 10);
      for (std::size_t base : col_base) std::cout << pad(cell_text(base + r), w);
      std::cout << '\n';
    }
  };
  if (by_degree) {
    std::vector<std::string> heads;
    std::vector<std::size_t> bases;
    for (std::size_t i = 0; i < d.degrees.size(); ++i) {
      heads.push_back("k=" + std::to_string(d.degrees[i]));
      bases.push_back(i * per_row);
    }
    std::cout << "level " << d.levels[0] << ", n = " << probe.n_interface(d.levels[0]) << '\n';
    print_grid(heads, bases);
  } else {
    for (std::size_t i = 0; i < d.degrees.size(); ++i) {
      std::vector<std::string> heads;
      std::vector<std::size_t> bases;
      for (std::size_t j = 0; j < d.levels.size(); ++j) {
        heads.push_back("n=" + std::to_string(probe.n_interface(d.levels[j])));
        bases.push_back((i * d.levels.size() + j) * per_row);
      }
      std::cout << "k = " << d.degrees[i] << '\n';
      print_grid(heads, bases);
    }
  }
  std::cout << "analytic constant: " << format_number(analytic_beta(cfg.geometry, 0).min, digits)
            << '\n';
  return failures == entries.size() && !entries.empty() ? kExitNumerical : 0;
}

int cmd_oracle(const Options& opt) {
  const RunConfig cfg = load(opt);
  if (opt.n_max < 0) throw ConfigError("--n-max must be >= 0");
  const AnalyticBeta b = analytic_beta(cfg.geometry, opt.n_max);
  const int digits = cfg.output.precision;
  if (!cfg.output.csv.empty()) emit_csv(cfg, [&](std::ostream& os) { write_oracle_csv(os, b, digits); });
  std::cout << "mode        beta\n";
  for (std::size_t n = 0; n < b.per_mode.size(); ++n)
    std::cout << pad(std::to_string(n), 4) << pad(format_number(b.per_mode[n], digits), 12)
              << (static_cast<int>(n) == b.argmin ? "  <- min" : "") << '\n';
  std::cout << "beta_min = " << format_number(b.min, digits) << " at mode " << b.argmin << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

int harmonic_order_for(const RunConfig& cfg, int n_interface) {
  if (!cfg.multiplier.N.empty()) return cfg.multiplier.N.front();
  return harmonic_order(cfg.multiplier.c.front().value, n_interface);
}

SaddleSystem build_system(const RunConfig& cfg, int level, int degree, const SourceSpec& src) {
  const InfSupSetup setup = cfg.infsup_setup();
  const SplineSpace2D st(mesh_at_level(setup.base_mesh(Subdomain::stator), level), degree);
  const SplineSpace2D rt(mesh_at_level(setup.base_mesh(Subdomain::rotor), level), degree);
  const HarmonicSpace H(harmonic_order_for(cfg, st.mesh().n_theta), cfg.geometry.r_gamma);
  return assemble_system(st, rt, H, src, cfg.multiplier.alpha, setup.quad);
}

void dump_matrices(const SaddleSystem& s, const std::string& prefix) {
  for (const auto& [name, M] : {std::pair<std::string, const SparseMatrix*>{"A", &s.A},
                                {"B", &s.B}}) {
    const std::string path = prefix + "_" + name + ".coo";
    std::ofstream out = open_output(path);
    write_coo(out, *M);
    std::cout << "wrote " << path << '\n';
  }
}

void print_summary(const SolveResult& r) {
  std::cout << "  alpha             " << format_number(r.alpha) << '\n'
            << "  energy            " << format_number(r.energy) << '\n'
            << "  H1 seminorm       " << format_number(r.h1_norm) << '\n'
            << "  max |jump moment| "
            << format_number(r.jump_moments.size() ? r.jump_moments.cwiseAbs().maxCoeff() : 0.0)
            << '\n'
            << "  field residual    " << format_number(r.field_residual) << '\n';
}

int cmd_solve(const Options& opt) {
  const RunConfig cfg = load(opt);
  const auto& d = cfg.discretization;
  const int degree = d.degrees.front();
  const int digits = cfg.output.precision;
  const std::string prefix =
      cfg.output.csv.empty() ? std::string("hmortar") : cfg.output.csv.substr(0, cfg.output.csv.rfind('.'));

  if (cfg.sources.kind == SourceKind::manufactured) {
    const ManufacturedSolution ms{cfg.geometry, cfg.sources.manufactured_mode};
    const SourceSpec src = ms.source_spec();
    std::cout << "manufactured solution, mode " << ms.mode << ", k = " << degree << '\n';
    std::cout << "level  n_stator  n_rotor         h    H1 error    rate\n";
    double prev_err = 0.0, prev_h = 0.0;
    std::optional<SolveResult> last;
    std::optional<SaddleSystem> last_sys;
    for (int level : d.levels) {
      SaddleSystem sys = build_system(cfg, level, degree, src);
      SolveResult r = solve(sys);
      const double es = h1_seminorm_error(sys.stator, r.u_stator, ms.exact_gradient());
      const double er = h1_seminorm_error(sys.rotor, r.u_rotor, ms.exact_gradient());
      const double err = std::sqrt(es * es + er * er);
      const double h = cfg.geometry.r_gamma * sys.stator.mesh().dtheta();
      std::cout << pad(std::to_string(level), 5) << pad(std::to_string(sys.stator.mesh().n_theta), 10)
                << pad(std::to_string(sys.rotor.mesh().n_theta), 9) << pad(format_number(h, 4), 10)
                << pad(format_number(err, 4), 12)
                << pad(prev_err > 0.0 ? format_number(std::log(prev_err / err) / std::log(prev_h / h), 3)
                                      : std::string("-"),
                       8)
                << '\n';
      prev_err = err;
      prev_h = h;
      last = std::move(r);
      last_sys = std::move(sys);
    }
    print_summary(*last);
    emit_csv(cfg, [&](std::ostream& os) { write_solution_csv(os, *last, digits); });
    if (!cfg.output.field_grid.empty()) {
      std::ofstream g = open_output(cfg.output.field_grid);
      write_field_grid(g, *last_sys, *last, 16, 96, digits);
    }
    if (opt.dump_matrices) dump_matrices(*last_sys, prefix);
    return 0;
  }

  const int level = d.levels.front();
  const SourceSpec src = cfg.source_spec();
  SaddleSystem sys = build_system(cfg, level, degree, src);
  std::cout << "solve: level " << level << ", k = " << degree << ", N = " << sys.harmonics.order()
            << ", dofs " << sys.field_dofs() << " + " << sys.harmonics.dim() << '\n';
  if (opt.dump_matrices) dump_matrices(sys, prefix);

  std::vector<double> angles = cfg.multiplier.angles;
  if (angles.empty()) angles.push_back(cfg.multiplier.alpha);
  const std::vector<SolveResult> results = sweep_rotation(sys, angles);
  for (const auto& r : results) print_summary(r);

  emit_csv(cfg, [&](std::ostream& os) { write_solution_csv(os, results.back(), digits); });
  if (!cfg.output.field_grid.empty()) {
    set_rotation(sys, angles.back());
    std::ofstream g = open_output(cfg.output.field_grid);
    write_field_grid(g, sys, results.back(), 16, 96, digits);
  }
  return 0;
}

int cmd_convergence(const Options& opt) {
  const RunConfig cfg = load(opt);
  const auto& d = cfg.discretization;
  const int digits = cfg.output.precision;
  int levels = 1;
  for (int l : d.levels) levels = std::max(levels, l);

  std::vector<std::pair<int, std::vector<ConvergenceRow>>> studies;
  for (int k : d.degrees) {
    ConvergenceSetup cs;
    cs.geom = cfg.geometry;
    cs.degree = k;
    cs.n_theta_stator = d.n_theta_stator;
    cs.n_theta_rotor = d.n_theta_rotor;
    cs.n_r_stator = d.n_r_stator;
    cs.n_r_rotor = d.n_r_rotor;
    cs.levels = levels;
    cs.harmonic_order = harmonic_order_for(cfg, d.n_theta_stator);
    cs.alpha = cfg.multiplier.alpha;
    studies.emplace_back(k, convergence_study(cs, cfg.sources.manufactured_mode));
  }

  emit_csv(cfg, [&](std::ostream& os) {
    os << "k,level,n_theta_stator,n_theta_rotor,h,h1_error,rate,lambda_error,max_jump\n";
    for (const auto& [k, rows] : studies)
      for (const auto& r : rows)
        os << k << ',' << r.level << ',' << r.n_theta_stator << ',' << r.n_theta_rotor << ','
           << format_number(r.h, digits) << ',' << format_number(r.h1_error, digits) << ','
           << (std::isnan(r.rate) ? std::string() : format_number(r.rate, digits)) << ','
           << format_number(r.lambda_error, digits) << ',' << format_number(r.max_jump, digits)
           << '\n';
  });
  for (const auto& [k, rows] : studies) {
    // Least-squares slope of log(error) against log(h).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : rows) {
      const double x = std::log(r.h), y = std::log(r.h1_error);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = static_cast<double>(rows.size());
    const double slope = rows.size() > 1 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
    std::cout << "k = " << k << ": fitted H1 rate " << format_number(slope, 3) << " (expected "
              << k << ")\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harmonic mortar coupling for stator/rotor annuli"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON run configuration");
    sub->add_option("--out", opt.out, "CSV output path (overrides output.csv)");
  };

  auto* infsup = app.add_subcommand("infsup", "discrete inf-sup sweep");
  add_common(infsup);
  infsup->add_option("--scope", opt.scope, "coupling scope")
      ->check(CLI::IsMember({"stator", "full"}));
  infsup->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);

  auto* oracle = app.add_subcommand("oracle", "analytic per-mode inf-sup constants");
  add_common(oracle);
  oracle->add_option("--n-max", opt.n_max, "highest mode");

  auto* solve_cmd = app.add_subcommand("solve", "solve the coupled problem");
  add_common(solve_cmd);
  solve_cmd->add_flag("--dump-matrices", opt.dump_matrices, "write A and B in COO format");

  auto* conv = app.add_subcommand("convergence", "manufactured-solution convergence study");
  add_common(conv);

  CLI11_PARSE(app, argc, argv);

  try {
    if (infsup->parsed()) return cmd_infsup(opt);
    if (oracle->parsed()) return cmd_oracle(opt);
    if (solve_cmd->parsed()) return cmd_solve(opt);
    if (conv->parsed()) return cmd_convergence(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InfSupViolation& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
