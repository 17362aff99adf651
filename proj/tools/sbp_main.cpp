// Command-line surface: capacity evaluation, kappa sweeps, asymptotic
// constants, CLuP runs, Monte Carlo sweeps, and the brute-force oracle.
// Outputs are CSV or JSON with a provenance header; exit codes: 0 success,
// 2 parameter error, 3 solver failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sbp/asymptotics.hpp"
#include "sbp/clup.hpp"
#include "sbp/errors.hpp"
#include "sbp/flrdt.hpp"
#include "sbp/instance.hpp"
#include "sbp/report.hpp"

namespace {

using nlohmann::json;

std::optional<json> g_config;

template <typename T>
void config_override(const char* key, T& value) {
  if (g_config && g_config->contains(key)) value = (*g_config)[key].get<T>();
}

std::vector<double> parse_grid(const std::string& spec) {
  // "lo:hi:step" inclusive grid, or a single value
  double lo = 0.0, hi = 0.0, step = 0.0;
  const auto c1 = spec.find(':');
  if (c1 == std::string::npos) return {std::stod(spec)};
  const auto c2 = spec.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw sbp::parameter_error("grid must be lo:hi:step");
  lo = std::stod(spec.substr(0, c1));
  hi = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
  step = std::stod(spec.substr(c2 + 1));
  if (!(step > 0.0) || hi < lo)
    throw sbp::parameter_error("grid must satisfy lo <= hi, step > 0");
  std::vector<double> out;
  for (double v = lo; v <= hi + 0.5 * step; v += step)
    out.push_back(std::min(v, hi));
  return out;
}

std::pair<double, double> parse_bracket(const std::string& spec) {
  const auto c = spec.find(':');
  if (c == std::string::npos)
    throw sbp::parameter_error("bracket must be lo:hi");
  return {std::stod(spec.substr(0, c)), std::stod(spec.substr(c + 1))};
}

std::string resolve_out(const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  if (const char* dir = std::getenv("SBP_OUT_DIR")) {
    if (dir[0] != '\0') return std::string(dir) + "/" + path;
  }
  return path;
}

std::string vec_str(const Eigen::VectorXd& v) {
  std::string s = "[";
  for (int i = 0; i < v.size(); ++i) {
    s += sbp::format_full(v[i]);
    if (i + 1 < v.size()) s += ";";
  }
  return s + "]";
}

std::string sign_str(const Eigen::VectorXi& s) {
  std::string out;
  for (int i = 0; i < s.size(); ++i) out += s[i] > 0 ? '+' : '-';
  return out;
}

void emit(const sbp::Table& table, const sbp::Provenance& prov,
          const std::string& out, const std::string& format) {
  if (!out.empty()) sbp::write_table(resolve_out(out), format, table, prov);
}

struct CapacityArgs {
  double kappa = 1.0;
  int level = 3;
  std::string bracket, out, format = "csv";
  int order = 0;
};

int run_capacity(CapacityArgs a) {
  config_override("kappa", a.kappa);
  config_override("level", a.level);
  config_override("bracket", a.bracket);
  config_override("order", a.order);
  std::optional<std::pair<double, double>> br;
  if (!a.bracket.empty()) br = parse_bracket(a.bracket);
  sbp::AlphaCOptions opts;
  opts.order_override = a.order;
  const sbp::CapacityEstimate est = sbp::alpha_c(a.kappa, a.level, br, opts);
  const sbp::OrderingReport rep = sbp::c_ordering_report(est.point);

  std::cout << "alpha_c^(" << a.level << ")(" << sbp::format_sig6(a.kappa)
            << ") = " << sbp::format_sig6(est.alpha) << "\n"
            << "c-ordering: " << rep.label() << "\n"
            << "psi_residual = " << sbp::format_sig6(est.psi_residual)
            << ", grad_residual = " << sbp::format_sig6(est.grad_residual)
            << "\n"
            << "point: p=" << vec_str(est.point.p)
            << " q_s=" << vec_str(est.point.q_s)
            << " c_s=" << vec_str(est.point.c_s)
            << " gamma_sq=" << sbp::format_sig6(est.point.gamma_sq) << "\n";

  sbp::Provenance prov;
  prov.command = "capacity";
  prov.add("kappa", a.kappa);
  prov.add("level", static_cast<long long>(a.level));
  if (!a.bracket.empty()) prov.add("bracket", a.bracket);
  if (a.order) prov.add("order", static_cast<long long>(a.order));
  sbp::Table t("sbp.capacity.v1",
               {"kappa", "level", "alpha", "psi_residual", "grad_residual",
                "ordering", "p", "q_s", "c_s", "gamma_sq",
                "quadrature_order"});
  t.add_row({sbp::format_full(a.kappa), std::to_string(a.level),
             sbp::format_full(est.alpha), sbp::format_full(est.psi_residual),
             sbp::format_full(est.grad_residual), rep.label(),
             vec_str(est.point.p), vec_str(est.point.q_s),
             vec_str(est.point.c_s), sbp::format_full(est.point.gamma_sq),
             std::to_string(est.quadrature_order)});
  emit(t, prov, a.out, a.format);
  return 0;
}

struct SweepArgs {
  std::string kappa_grid = "1.0";
  std::string levels = "1,2,3,4";
  std::string out, format = "csv";
  double cutoff = 0.35;
};

int run_sweep(SweepArgs a) {
  config_override("kappa-grid", a.kappa_grid);
  config_override("levels", a.levels);
  const std::vector<double> grid = parse_grid(a.kappa_grid);
  if (grid.empty()) throw sbp::parameter_error("sweep: empty kappa grid");
  std::vector<int> levels;
  {
    std::stringstream ss(a.levels);
    std::string tok;
    while (std::getline(ss, tok, ',')) levels.push_back(std::stoi(tok));
  }
  if (levels.empty()) throw sbp::parameter_error("sweep: empty level list");

  sbp::Provenance prov;
  prov.command = "sweep";
  prov.add("kappa-grid", a.kappa_grid);
  prov.add("levels", a.levels);
  prov.add("cutoff", a.cutoff);
  sbp::Table t("sbp.sweep.v1", {"kappa", "level", "alpha", "branch",
                                "psi_residual", "grad_residual", "status"});
  for (double kappa : grid) {
    for (int level : levels) {
      std::string branch = "full", status = "ok";
      double alpha = 0.0, psi_res = 0.0, grad_res = 0.0;
      try {
        if (level >= 3 && kappa < a.cutoff) {
          branch = "asymptotic";
          if (level == 3) {
            const auto sol = sbp::level3_small_kappa(kappa, a.cutoff);
            alpha = sol.alpha;
            psi_res = sol.psi_residual;
            grad_res = std::abs(sol.inner_residual);
          } else if (level == 4) {
            const auto sol = sbp::level4_small_kappa(kappa, a.cutoff);
            alpha = sol.alpha;
            psi_res = sol.psi_residual;
            grad_res = std::sqrt(sol.grad_sq);
          } else {
            throw sbp::parameter_error(
                "no asymptotic branch beyond level 4");
          }
        } else {
          const sbp::CapacityEstimate est = sbp::alpha_c(kappa, level);
          alpha = est.alpha;
          psi_res = est.psi_residual;
          grad_res = est.grad_residual;
        }
      } catch (const std::exception& e) {
        status = std::string("error: ") + e.what();
      }
      t.add_row({sbp::format_full(kappa), std::to_string(level),
                 sbp::format_full(alpha), branch, sbp::format_full(psi_res),
                 sbp::format_full(grad_res), status});
      std::cout << "kappa=" << sbp::format_sig6(kappa) << " level=" << level
                << " alpha=" << sbp::format_sig6(alpha) << " [" << branch
                << "] " << status << "\n";
    }
  }
  emit(t, prov, a.out, a.format);
  return 0;
}

int run_asym(const std::string& out, const std::string& format) {
  const double kx = sbp::solve_kappa_x();
  const double c = sbp::small_alpha_constant();
  std::cout << "kappa_x = " << sbp::format_sig6(kx) << "\n"
            << "constant = " << sbp::format_sig6(c) << "\n";
  sbp::Provenance prov;
  prov.command = "asym";
  sbp::Table t("sbp.asym.v1", {"kappa_x", "constant"});
  t.add_row({sbp::format_full(kx), sbp::format_full(c)});
  emit(t, prov, out, format);
  return 0;
}

struct ClupArgs {
  int n = 100;
  double alpha = 1.0, kappa = 1.0;
  std::uint64_t seed = 1;
  double kappa0 = 0.0, t0x = 1.3, factor = 1.1;
  int restarts = 300;
  std::string out, format = "csv";
};

int run_clup(ClupArgs a) {
  config_override("n", a.n);
  config_override("alpha", a.alpha);
  config_override("kappa", a.kappa);
  config_override("seed", a.seed);
  config_override("kappa0", a.kappa0);
  config_override("t0x", a.t0x);
  config_override("factor", a.factor);
  config_override("restarts", a.restarts);
  sbp::ClupConfig cfg;
  cfg.kappa0 = a.kappa0;
  cfg.t0x_init = a.t0x;
  cfg.schedule_factor = a.factor;
  cfg.max_restarts = a.restarts;
  const sbp::SbpInstance inst = sbp::gen_instance(a.n, a.alpha, a.kappa, a.seed);
  const sbp::ClupResult r =
      sbp::clup_solve(inst, cfg, sbp::CounterRng(a.seed, 1));
  std::cout << "kappa_hat = " << sbp::format_sig6(r.kappa_hat)
            << (r.success ? "  (feasible)" : "  (not feasible)") << "\n"
            << "outer_iters = " << r.outer_iters
            << ", inner_iters = " << r.inner_iters_total
            << ", restarts = " << r.restarts_used << "\n";
  sbp::Provenance prov;
  prov.command = "clup";
  prov.add("n", static_cast<long long>(a.n));
  prov.add("alpha", a.alpha);
  prov.add("kappa", a.kappa);
  prov.add("seed", static_cast<long long>(a.seed));
  prov.add("kappa0", cfg.effective_kappa0(a.kappa));
  prov.add("t0x", a.t0x);
  prov.add("factor", a.factor);
  prov.add("restarts", static_cast<long long>(a.restarts));
  sbp::Table t("sbp.clup.v1",
               {"n", "m", "alpha", "kappa", "seed", "kappa_hat", "success",
                "outer_iters", "inner_iters", "restarts_used", "sign_out"});
  t.add_row({std::to_string(inst.n), std::to_string(inst.m),
             sbp::format_full(a.alpha), sbp::format_full(a.kappa),
             std::to_string(a.seed), sbp::format_full(r.kappa_hat),
             r.success ? "true" : "false", std::to_string(r.outer_iters),
             std::to_string(r.inner_iters_total),
             std::to_string(r.restarts_used), sign_str(r.sign_out)});
  emit(t, prov, a.out, a.format);
  return 0;
}

struct McArgs {
  int n = 100, trials = 20;
  double kappa = 1.0;
  std::string alpha_grid = "0.6:1.6:0.1";
  std::uint64_t seed = 1;
  double kappa0 = 0.0, t0x = 1.3, factor = 1.1;
  int restarts = 20;
  std::string out, format = "csv";
};

int run_mc(McArgs a) {
  config_override("n", a.n);
  config_override("trials", a.trials);
  config_override("kappa", a.kappa);
  config_override("alpha-grid", a.alpha_grid);
  config_override("seed", a.seed);
  config_override("restarts", a.restarts);
  sbp::ClupConfig cfg;
  cfg.kappa0 = a.kappa0;
  cfg.t0x_init = a.t0x;
  cfg.schedule_factor = a.factor;
  cfg.max_restarts = a.restarts;
  const std::vector<double> grid = parse_grid(a.alpha_grid);
  const auto rows = sbp::monte_carlo(a.n, grid, a.kappa, a.trials, cfg, a.seed);

  sbp::Provenance prov;
  prov.command = "mc";
  prov.add("n", static_cast<long long>(a.n));
  prov.add("kappa", a.kappa);
  prov.add("alpha-grid", a.alpha_grid);
  prov.add("trials", static_cast<long long>(a.trials));
  prov.add("seed", static_cast<long long>(a.seed));
  prov.add("restarts", static_cast<long long>(a.restarts));
  sbp::Table t("sbp.mc.v1",
               {"alpha", "mean_kappa_hat", "stderr_kappa_hat", "success_rate",
                "mean_restarts", "trials"});
  for (const auto& r : rows) {
    t.add_row({sbp::format_full(r.alpha), sbp::format_full(r.mean_kappa_hat),
               sbp::format_full(r.stderr_kappa_hat),
               sbp::format_full(r.success_rate),
               sbp::format_full(r.mean_restarts), std::to_string(r.trials)});
    std::cout << "alpha=" << sbp::format_sig6(r.alpha)
              << " mean_kappa_hat=" << sbp::format_sig6(r.mean_kappa_hat)
              << " success_rate=" << sbp::format_sig6(r.success_rate) << "\n";
  }
  emit(t, prov, a.out, a.format);
  return 0;
}

struct OracleArgs {
  int n = 12;
  double alpha = 1.0, kappa = 1.0;
  std::uint64_t seed = 1;
  std::string out, format = "csv", load;
};

int run_oracle(OracleArgs a) {
  config_override("n", a.n);
  config_override("alpha", a.alpha);
  config_override("kappa", a.kappa);
  config_override("seed", a.seed);
  const sbp::SbpInstance inst =
      a.load.empty() ? sbp::gen_instance(a.n, a.alpha, a.kappa, a.seed)
                     : sbp::load_instance(a.load);
  const sbp::OracleResult r = sbp::brute_force(inst);
  std::cout << "xi_star = " << sbp::format_sig6(r.xi_star)
            << (r.feasible ? "  (feasible at kappa)" : "  (infeasible at kappa)")
            << "\n"
            << "enumerated = " << r.enumerated << "\n";
  sbp::Provenance prov;
  prov.command = "oracle";
  prov.add("n", static_cast<long long>(inst.n));
  prov.add("alpha", inst.alpha);
  prov.add("kappa", inst.kappa);
  prov.add("seed", static_cast<long long>(inst.seed));
  sbp::Table t("sbp.oracle.v1",
               {"n", "m", "kappa", "seed", "xi_star", "feasible", "enumerated",
                "argmin_sign"});
  t.add_row({std::to_string(inst.n), std::to_string(inst.m),
             sbp::format_full(inst.kappa), std::to_string(inst.seed),
             sbp::format_full(r.xi_star), r.feasible ? "true" : "false",
             std::to_string(r.enumerated), sign_str(r.argmin_sign)});
  emit(t, prov, a.out, a.format);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symmetric binary perceptron capacity estimates and solvers"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON file overriding any flag")
      ->expected(1);

  CapacityArgs cap;
  auto* c_cap = app.add_subcommand("capacity", "capacity estimate at one level");
  c_cap->add_option("--kappa", cap.kappa);
  c_cap->add_option("--level", cap.level)->check(CLI::Range(1, 5));
  c_cap->add_option("--bracket", cap.bracket, "alpha bracket lo:hi");
  c_cap->add_option("--order", cap.order, "quadrature order override");
  c_cap->add_option("--out", cap.out);
  c_cap->add_option("--format", cap.format)->check(CLI::IsMember({"csv", "json"}));

  SweepArgs sw;
  auto* c_sw = app.add_subcommand("sweep", "alpha_c over a kappa grid");
  c_sw->add_option("--kappa-grid", sw.kappa_grid, "lo:hi:step or single value");
  c_sw->add_option("--levels", sw.levels, "comma list of levels");
  c_sw->add_option("--cutoff", sw.cutoff, "asymptotic-branch cutoff");
  c_sw->add_option("--out", sw.out);
  c_sw->add_option("--format", sw.format)->check(CLI::IsMember({"csv", "json"}));

  std::string asym_out, asym_format = "csv";
  auto* c_as = app.add_subcommand("asym", "small-alpha constants");
  c_as->add_option("--out", asym_out);
  c_as->add_option("--format", asym_format)->check(CLI::IsMember({"csv", "json"}));

  ClupArgs cl;
  auto* c_cl = app.add_subcommand("clup", "barrier solver on one instance");
  c_cl->add_option("--n", cl.n);
  c_cl->add_option("--alpha", cl.alpha);
  c_cl->add_option("--kappa", cl.kappa);
  c_cl->add_option("--seed", cl.seed);
  c_cl->add_option("--kappa0", cl.kappa0, "barrier margin (0 = auto)");
  c_cl->add_option("--t0x", cl.t0x);
  c_cl->add_option("--factor", cl.factor);
  c_cl->add_option("--restarts", cl.restarts);
  c_cl->add_option("--out", cl.out);
  c_cl->add_option("--format", cl.format)->check(CLI::IsMember({"csv", "json"}));

  McArgs mc;
  auto* c_mc = app.add_subcommand("mc", "Monte Carlo sweep over alpha");
  c_mc->add_option("--n", mc.n);
  c_mc->add_option("--kappa", mc.kappa);
  c_mc->add_option("--alpha-grid", mc.alpha_grid);
  c_mc->add_option("--trials", mc.trials);
  c_mc->add_option("--seed", mc.seed);
  c_mc->add_option("--kappa0", mc.kappa0);
  c_mc->add_option("--t0x", mc.t0x);
  c_mc->add_option("--factor", mc.factor);
  c_mc->add_option("--restarts", mc.restarts);
  c_mc->add_option("--out", mc.out);
  c_mc->add_option("--format", mc.format)->check(CLI::IsMember({"csv", "json"}));

  OracleArgs ora;
  auto* c_or = app.add_subcommand("oracle", "exact brute-force discrepancy");
  c_or->add_option("--n", ora.n)->check(CLI::Range(1, 26));
  c_or->add_option("--alpha", ora.alpha);
  c_or->add_option("--kappa", ora.kappa);
  c_or->add_option("--seed", ora.seed);
  c_or->add_option("--load", ora.load, "read instance from file instead");
  c_or->add_option("--out", ora.out);
  c_or->add_option("--format", ora.format)->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw sbp::parameter_error("cannot open config " + config_path);
      g_config = nlohmann::json::parse(in);
    }
    if (c_cap->parsed()) return run_capacity(cap);
    if (c_sw->parsed()) return run_sweep(sw);
    if (c_as->parsed()) return run_asym(asym_out, asym_format);
    if (c_cl->parsed()) return run_clup(cl);
    if (c_mc->parsed()) return run_mc(mc);
    if (c_or->parsed()) return run_oracle(ora);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const sbp::parameter_error& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const sbp::invariant_error& e) {
    std::cerr << "invariant error: " << e.what() << "\n";
    return 2;
  } catch (const sbp::bracket_error& e) {
    std::cerr << "solver failure: " << e.what()
              << " (f_lo=" << e.f_lo << ", f_hi=" << e.f_hi << ")\n";
    return 3;
  } catch (const sbp::solver_error& e) {
    std::cerr << "solver failure: " << e.what()
              << " (best residual " << e.best_residual << ")\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
