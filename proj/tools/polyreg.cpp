// polyreg command line: gradient checks, single registrations, the
// convergence-rate experiment and subgradient certificates.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "polyreg/bregman.hpp"
#include "polyreg/config.hpp"
#include "polyreg/errors.hpp"
#include "polyreg/field_calculus.hpp"
#include "polyreg/io.hpp"
#include "polyreg/rates.hpp"
#include "polyreg/registration.hpp"
#include "polyreg/solver.hpp"

namespace fs = std::filesystem;
using namespace polyreg;

namespace {

Config load_config(const std::string& path) {
  return path.empty() ? Config{} : Config::load(path);
}

// Largest |analytic - central difference| over all entries, relative to the
// largest analytic entry.
template <class Value, class Grad>
double fd_mismatch(MatrixField u, double h, Value value, Grad grad) {
  const std::vector<double> g = grad(u);
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x0 = u.values()[i];
    u.values()[i] = x0 + h;
    const double fp = value(u);
    u.values()[i] = x0 - h;
    const double fm = value(u);
    u.values()[i] = x0;
    err = std::max(err, std::abs(g[i] - (fp - fm) / (2.0 * h)));
    scale = std::max(scale, std::abs(g[i]));
  }
  return scale > 0.0 ? err / scale : err;
}

int cmd_check_gradient(const Config& c) {
  const auto& gc = c.gradient_check;
  const Grid grid(c.grid.xmin, c.grid.xmax, c.grid.ymin, c.grid.ymax, gc.nx, gc.nx);
  const auto domain = std::make_shared<const Domain>(Domain::full(grid));
  bool ok = true;
  for (const std::string name : {"rotation", "pq", "detsq"}) {
    const Integrand f = make_integrand(name, name == "rotation" ? c.integrand.p : 4.0, 2.0);
    double worst = 0.0;
    for (int t = 0; t < gc.fields; ++t) {
      MatrixField u = MatrixField::identity(domain);
      const MatrixField bump = random_smooth_field(domain, 2, gc.seed + t);
      for (std::size_t i = 0; i < u.values().size(); ++i) u.values()[i] += 0.3 * bump.values()[i];
      worst = std::max(worst, fd_mismatch(
                                  u, gc.h, [&](const MatrixField& v) { return energy(v, f).value; },
                                  [&](const MatrixField& v) { return energy_gradient(v, f); }));
    }
    const bool pass = worst < gc.tol;
    ok &= pass;
    std::printf("%-9s max relative error %.3e  %s\n", name.c_str(), worst, pass ? "ok" : "FAIL");
  }
  return ok ? 0 : 1;
}

int cmd_register(const Config& c, double delta, std::uint64_t seed, const fs::path& out) {
  Scenario sc = build_scenario(c);
  NoisySample data = add_noise(sc.exact, delta, sc.q, noise_seed(seed, 0), *sc.domain);
  const double alpha = delta > 0.0
                           ? choose_alpha(delta, sc.q, c.experiment.alpha0, c.experiment.epsilon,
                                          c.experiment.beta2)
                           : c.experiment.alpha0 * 1e-3;
  TikhonovProblem problem{sc.integrand, sc.reference, data.image, sc.q, alpha,
                          MatrixField::identity(sc.domain)};
  SolveResult r = minimize(problem, c.solver_options());
  const int projected = project_into_domain(r.u);
  const ScalarImage ku = warp(sc.reference, r.u, WarpMode::strict);
  const double residual = lq_distance(ku, data.image, sc.q, *sc.domain);
  const double d = bregman_poly(sc.integrand, r.u, sc.u_dagger,
                                PolySubgradient::zero(sc.u_dagger, energy(sc.u_dagger, sc.integrand).value));

  write_field_csv(out / "field.csv", r.u);
  write_mask_csv(out / "mask.csv", *sc.domain);
  write_image_csv(out / "warped.csv", ku);
  write_pgm(out / "warped.pgm", ku);
  write_pgm(out / "data.pgm", data.image);
  write_pgm(out / "reference.pgm", sc.reference);
  const nlohmann::json summary = {
      {"delta", delta},          {"alpha", alpha},
      {"seed", seed},            {"objective", tikhonov_objective(problem, r.u)},
      {"iterations", r.iterations}, {"converged", r.converged},
      {"stop_reason", r.stop_reason}, {"gradient_norm", r.gradient_norm},
      {"residual", residual},    {"D_poly", d},
      {"projected_nodes", projected},
  };
  write_text(out / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << '\n';
  return r.converged ? 0 : 2;
}

int cmd_rates(const Config& c, const fs::path& out) {
  const RateExperiment e = make_rate_experiment(c);
  const RateReport report = run_rates(e);
  write_text(out / "report.csv", rate_report_csv(report));
  const nlohmann::json slopes = slopes_json(report);
  write_text(out / "slopes.json", slopes.dump(2) + "\n");
  std::cout << rate_report_csv(report);
  std::cout << "D_poly slope: " << slopes["D_poly"].dump() << '\n'
            << "residual slope: " << slopes["residual"].dump() << '\n';
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  return 0;
}

int cmd_verify_subgradient(const Config& c, const fs::path& out) {
  Scenario sc = build_scenario(c);
  const auto& cert = c.certificate;
  bool ok = true;
  for (int b = 0; b < cert.base_points; ++b) {
    MatrixField base = sc.u_dagger;
    if (b > 0) {
      const MatrixField bump = random_smooth_field(sc.domain, 2, cert.seed + b);
      for (std::size_t i = 0; i < base.values().size(); ++i) base.values()[i] += 0.05 * bump.values()[i];
    }
    const PolySubgradient w = poly_subgradient(sc.integrand, base);
    const SubgradientReport r = verify_subgradient(sc.integrand, w, cert.trials, cert.seed + 1000 + b, cert.radius);
    ok &= r.violations == 0;
    std::printf("base %d: %d trials, %d violations, min D %.3e\n", b, r.trials, r.violations, r.worst_gap);
    if (!out.empty()) {
      write_certificate(out / ("base_" + std::to_string(b)), w,
                        "random probes: smooth, bump, noise and large; radius " +
                            format_double(cert.radius));
    }
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational registration with polyconvex regularizers"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON configuration")->check(CLI::ExistingFile);

  auto* grad = app.add_subcommand("check-gradient", "compare energy gradients with finite differences");

  double delta = 0.01;
  std::uint64_t seed = 1;
  std::string out = "out";
  auto* reg = app.add_subcommand("register", "solve one noisy registration problem");
  reg->add_option("--delta", delta, "noise level")->check(CLI::NonNegativeNumber);
  reg->add_option("--seed", seed, "noise seed");
  reg->add_option("--out", out, "output directory");

  auto* rates = app.add_subcommand("rates", "run the convergence-rate experiment");
  rates->add_option("--out", out, "output directory");

  std::string cert_out;
  auto* verify = app.add_subcommand("verify-subgradient", "test W_poly subgradient certificates");
  verify->add_option("--out", cert_out, "write certificates to this directory");

  for (auto* sub : {grad, reg, rates, verify}) {
    sub->add_option("--config", config_path, "JSON configuration")->check(CLI::ExistingFile);
  }

  CLI11_PARSE(app, argc, argv);
  try {
    const Config c = load_config(config_path);
    if (*grad) return cmd_check_gradient(c);
    if (*reg) return cmd_register(c, delta, seed, out);
    if (*rates) return cmd_rates(c, out);
    if (*verify) return cmd_verify_subgradient(c, cert_out);
  } catch (const std::exception& e) {
    std::cerr << "polyreg: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
