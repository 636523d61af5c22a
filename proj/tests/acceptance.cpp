// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Reference values come from the oracles in tests/oracles
// or from closed forms computed here, never from the library under test.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/finite_diff.hpp"
#include "oracles/leibniz.hpp"
#include "polyreg/bregman.hpp"
#include "polyreg/config.hpp"
#include "polyreg/field_calculus.hpp"
#include "polyreg/io.hpp"
#include "polyreg/registration.hpp"

using namespace polyreg;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

SmallMatrix random_matrix(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  SmallMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = u(rng);
  }
  return a;
}

Eigen::Matrix2d rotation(double t) {
  Eigen::Matrix2d r;
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

SmallMatrix small(const Eigen::Matrix2d& a) {
  SmallMatrix m(2, 2);
  m << a(0, 0), a(0, 1), a(1, 0), a(1, 1);
  return m;
}

MatrixField perturb(const MatrixField& u, std::uint64_t seed, double amp) {
  MatrixField v = u;
  const MatrixField bump = random_smooth_field(u.domain_ptr(), u.dim(), seed);
  for (std::size_t i = 0; i < v.values().size(); ++i) v.values()[i] += amp * bump.values()[i];
  return v;
}

std::vector<Integrand> builtins() {
  return {rotation_energy(4.0), pq_energy(4.0, 2.0), detsq_energy()};
}

// Cell determinants from corner values, independent of the library kernels.
std::vector<double> cell_dets(const MatrixField& u) {
  const Grid& g = u.grid();
  const auto v = u.values();
  std::vector<double> out(g.num_cells());
  for (int cj = 0; cj < g.cells_y(); ++cj) {
    for (int ci = 0; ci < g.cells_x(); ++ci) {
      const std::size_t a = g.node_index(ci, cj), b = g.node_index(ci + 1, cj),
                        c = g.node_index(ci, cj + 1), d = g.node_index(ci + 1, cj + 1);
      double j[2][2];
      for (int r = 0; r < 2; ++r) {
        j[r][0] = (v[2 * b + r] - v[2 * a + r] + v[2 * d + r] - v[2 * c + r]) / (2 * g.hx());
        j[r][1] = (v[2 * c + r] - v[2 * a + r] + v[2 * d + r] - v[2 * b + r]) / (2 * g.hy());
      }
      out[g.cell_index(ci, cj)] = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    }
  }
  return out;
}

Outcome minors_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int n : {2, 3}) {
    for (int t = 0; t < 1000; ++t) {
      const SmallMatrix a = random_matrix(n, rng);
      const MinorsVector m = all_minors(a);
      const auto ref = oracle::all_minors(a);
      if (m.slots.size() != static_cast<int>(ref.size())) return {false, "length mismatch"};
      for (std::size_t i = 0; i < ref.size(); ++i) {
        worst = std::max(worst, std::abs(m.slots[i] - ref[i].value) / ref[i].magnitude);
      }
      for (int s = 1; s <= n; ++s) {
        const MinorsVec adj = minors_of_order(a, s);
        const auto block = oracle::minors_of_order(a, s);
        for (std::size_t i = 0; i < block.size(); ++i) {
          worst = std::max(worst, std::abs(adj[i] - block[i].value) / block[i].magnitude);
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-14 && secs < 1.0,
          "max relative error " + fmt("%.2e", worst) + ", " + fmt("%.3f", secs) + " s"};
}

Outcome gradient_checks() {
  const auto t0 = Clock::now();
  const auto d = std::make_shared<const Domain>(Domain::full(Grid(-1, 1, -1, 1, 16, 16)));
  double worst = 0.0;
  for (const Integrand& f : builtins()) {
    for (int t = 0; t < 20; ++t) {
      const MatrixField u = perturb(MatrixField::identity(d), 500 + t, 0.3);
      const auto fd = oracle::central_gradient(
          [&](const std::vector<double>& x) { return energy(MatrixField(d, 2, x), f).value; },
          std::vector<double>(u.values().begin(), u.values().end()), 1e-5);
      worst = std::max(worst, oracle::relative_sup_error(energy_gradient(u, f), fd));
    }
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-6 && secs < 30.0,
          "max relative error " + fmt("%.2e", worst) + ", " + fmt("%.2f", secs) + " s"};
}

Outcome convexity() {
  std::ostringstream msg;
  bool ok = true;
  for (const Integrand& f : builtins()) {
    const ConvexityReport r = check_convexity(f, 10000, 202);
    ok &= r.violations == 0;
    msg << f.name() << " " << r.violations << ", ";
  }
  const Integrand planted(
      "planted", MinorsLayout(2, 2), {},
      [](const SmallVector&, const SmallVector&, const MinorsVec& xi) { return -xi[4] * xi[4]; },
      [](const SmallVector&, const SmallVector&, const MinorsVec& xi, IntegrandGradient& g) {
        g.dxi[4] = -2.0 * xi[4];
      });
  const ConvexityReport control = check_convexity(planted, 10000, 202);
  ok &= control.violations > 0;
  msg << "planted nonconvex control " << control.violations << " violations";
  return {ok, msg.str()};
}

Outcome coercivity() {
  // Independent sampling; the bound is checked directly on f and |A|.
  const Integrand f = rotation_energy(4.0);
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-3.0, 3.0), logscale(std::log(0.1), std::log(10.0));
  int violations = 0;
  double ratio = 1e300;
  for (int t = 0; t < 100000; ++t) {
    const double s = std::exp(logscale(rng));
    Eigen::Matrix2d a;
    a << s * u(rng), s * u(rng), s * u(rng), s * u(rng);
    const double n2 = a.squaredNorm();
    const double fa = f.density(small(a));
    if (fa < 0.5 * n2 * n2) ++violations;
    if (n2 > 0.0) ratio = std::min(ratio, fa / (n2 * n2));
  }
  const CoercivityReport lib = check_coercivity(f, 4.0, 0.5, 100000, 304);
  return {violations == 0 && lib.violations_at_c == 0,
          std::to_string(violations) + " violations of f >= 0.5 |A|^4 in 1e5 samples, min ratio " +
              fmt("%.4f", ratio)};
}

Outcome rotation_minimality() {
  const double p = 4.0;
  const Integrand f = rotation_energy(p);
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(-2.0, 2.0), angle(-M_PI, M_PI);
  double below = 0.0;
  for (int t = 0; t < 10000; ++t) {
    Eigen::Matrix2d a;
    a << u(rng), u(rng), u(rng), u(rng);
    below = std::max(below, (2.0 + p) - f.density(small(a)));
  }
  double at_rot = 0.0;
  for (int t = 0; t < 100; ++t) {
    at_rot = std::max(at_rot, std::abs(f.density(small(rotation(angle(rng)))) - (2.0 + p)));
  }
  double invariance = 0.0;
  for (int t = 0; t < 10000; ++t) {
    Eigen::Matrix2d a;
    a << u(rng), u(rng), u(rng), u(rng);
    const double fa = f.density(small(a));
    const double fb = f.density(small(rotation(angle(rng)) * a * rotation(angle(rng))));
    invariance = std::max(invariance, std::abs(fa - fb) / fa);
  }
  const bool ok = below <= 1e-12 && at_rot <= 1e-12 && invariance <= 1e-12;
  return {ok, "max shortfall below 2+p " + fmt("%.2e", std::max(below, 0.0)) +
                  ", rotation deviation " + fmt("%.2e", at_rot) + ", invariance " +
                  fmt("%.2e", invariance)};
}

Outcome subgradient_certificates(const Scenario& sc) {
  std::ostringstream msg;
  bool ok = true;
  int total_violations = 0, broken_detected = 0, broken_total = 0;
  double worst = 1e300;
  for (const Integrand& f : builtins()) {
    for (int b = 0; b < 5; ++b) {
      const MatrixField base = b == 0 ? sc.u_dagger : perturb(sc.u_dagger, 600 + b, 0.05);
      const PolySubgradient w = poly_subgradient(f, base);
      const SubgradientReport r = verify_subgradient(f, w, 1000, 700 + b, 0.1);
      total_violations += r.violations;
      worst = std::min(worst, r.worst_gap);
      PolySubgradient broken = w;
      const Grid& g = base.grid();
      broken.v2[g.cell_index(g.cells_x() / 2, g.cells_y() / 2)] += 1.0;
      ++broken_total;
      broken_detected += verify_subgradient(f, broken, 1000, 800 + b, 0.1).violations > 0;
    }
  }
  ok = total_violations == 0 && broken_detected == broken_total;
  msg << total_violations << " violations in 15 x 1000 trials (min D " << fmt("%.2e", worst)
      << "), perturbed certificates rejected " << broken_detected << "/" << broken_total;
  return {ok, msg.str()};
}

Outcome bregman_identities(const Scenario& sc) {
  const auto& d = sc.domain;
  double diagonal = 0.0;
  int negative = 0;
  double min_d = 1e300;
  for (const Integrand& f : builtins()) {
    for (int t = 0; t < 5; ++t) {
      const MatrixField u = perturb(sc.u_dagger, 900 + t, 0.05);
      const PolySubgradient w = poly_subgradient(f, u);
      diagonal = std::max(diagonal, std::abs(bregman_poly(f, u, u, w)));
    }
    const MatrixField u = perturb(sc.u_dagger, 950, 0.05);
    const PolySubgradient w = poly_subgradient(f, u);
    std::mt19937_64 rng(960);
    std::uniform_real_distribution<double> amp(std::log(1e-4), std::log(0.3));
    for (int t = 0; t < 1000; ++t) {
      const double dist = bregman_poly(f, perturb(u, 1000 + t, std::exp(amp(rng))), u, w);
      min_d = std::min(min_d, dist);
      negative += dist < -1e-8;
    }
  }
  double closed_form = 0.0;
  const Integrand ds = detsq_energy();
  for (int t = 0; t < 50; ++t) {
    const MatrixField u = perturb(MatrixField::identity(d), 3000 + t, 0.2);
    const MatrixField v = perturb(MatrixField::identity(d), 4000 + t, 0.3);
    const auto du = cell_dets(u), dv = cell_dets(v);
    std::vector<double> terms;
    for (std::size_t c = 0; c < du.size(); ++c) {
      if (d->cell_active(c)) terms.push_back(d->grid().cell_area() * (dv[c] - du[c]) * (dv[c] - du[c]));
    }
    double expect = 0.0;
    for (double x : terms) expect += x;
    const double got = bregman_poly(ds, v, u, poly_subgradient(ds, u));
    closed_form = std::max(closed_form, std::abs(got - expect) / expect);
  }
  const bool ok = diagonal <= 1e-12 && negative == 0 && closed_form <= 1e-10;
  return {ok, "D(u;u) " + fmt("%.2e", diagonal) + ", " + std::to_string(negative) +
                  " negative of 3000 probes (min " + fmt("%.2e", min_d) +
                  "), detsq closed form rel err " + fmt("%.2e", closed_form)};
}

Outcome source_condition(const Config& cfg, const Scenario& sc) {
  const Integrand& f = sc.integrand;
  const double r_dagger = energy(sc.u_dagger, f).value;
  SourceConditionParams params = cfg.source_params(r_dagger);
  params.beta1 = 0.5;
  params.beta2 = 1.0;
  const ForwardModel model{sc.reference, sc.exact, sc.q};
  const PolySubgradient w = PolySubgradient::zero(sc.u_dagger, r_dagger);
  std::mt19937_64 rng(1100);
  std::uniform_real_distribution<double> amp(std::log(1e-4), std::log(0.1)), angle(-M_PI, M_PI);
  int sampled = 0, violations = 0, attempts = 0;
  double worst = -1e300;
  while (sampled < 1000 && attempts < 5000) {
    ++attempts;
    // Perturbed rotations, some by other angles, made admissible by projection.
    const MatrixField base = attempts % 5 == 0 ? rotation_field(angle(rng), sc.domain) : sc.u_dagger;
    MatrixField u = perturb(base, 1200 + attempts, std::exp(amp(rng)));
    for (std::size_t k = 0; k < u.num_nodes(); ++k) {
      const Point p = sc.domain->project(Point(u.values()[2 * k], u.values()[2 * k + 1]));
      u.values()[2 * k] = p.x();
      u.values()[2 * k + 1] = p.y();
    }
    if (!admissibility_violations(u).empty() || !in_sublevel_set(f, model, u, params)) continue;
    ++sampled;
    const double res = source_condition_residual(f, model, w, sc.u_dagger, u, params);
    worst = std::max(worst, res);
    violations += res > 0.0;
  }
  return {sampled == 1000 && violations == 0,
          std::to_string(violations) + " positive residuals over " + std::to_string(sampled) +
              " admissible samples in the sublevel set (max " + fmt("%.2e", worst) + ")"};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + POLYREG_CLI + "\" " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

Outcome rate_experiment(const fs::path& work, double& runtime) {
  const fs::path out = work / "rates_run1";
  fs::remove_all(out);
  const auto t0 = Clock::now();
  const int status = run_cli("rates --config \"" POLYREG_DEFAULT_CONFIG "\" --out \"" + out.string() + "\"");
  runtime = seconds_since(t0);
  if (status != 0) return {false, "polyreg rates exited with status " + std::to_string(status)};
  const auto slopes = nlohmann::json::parse(read_text(out / "slopes.json"));
  if (slopes["D_poly"].is_null() || slopes["residual"].is_null()) {
    return {false, "insufficient data for a slope fit"};
  }
  const double sd = slopes["D_poly"]["slope"].get<double>();
  const double sr = slopes["residual"]["slope"].get<double>();
  const bool monotone = slopes["D_monotone"].get<bool>();
  const bool d_in = sd >= 0.8 && sd <= 1.2;
  const bool d_super = sd > 1.2 && monotone;
  const bool r_in = sr >= 0.8 && sr <= 1.2;
  const bool ok = (d_in || d_super) && r_in && runtime < 600.0;
  std::string detail = "D_poly slope " + fmt("%.3f", sd) + ", residual slope " + fmt("%.3f", sr) +
                       ", " + fmt("%.1f", runtime) + " s";
  if (d_super) detail += " (warning: superlinear D_poly with monotone decay)";
  return {ok, detail};
}

Outcome determinism(const fs::path& work) {
  const fs::path out = work / "rates_run2";
  fs::remove_all(out);
  const int status = run_cli("rates --config \"" POLYREG_DEFAULT_CONFIG "\" --out \"" + out.string() + "\"");
  if (status != 0) return {false, "second run exited with status " + std::to_string(status)};
  const fs::path first = work / "rates_run1" / "report.csv";
  if (!fs::exists(first)) return {false, "first run produced no report"};
  const std::string a = read_text(first), b = read_text(out / "report.csv");
  return {a == b && !a.empty(), a == b ? "report.csv identical (" + std::to_string(a.size()) + " bytes)"
                                       : "report.csv differs between runs"};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work = fs::temp_directory_path() / "polyreg_acceptance";
  int only = 0;  // 0 runs every criterion
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--work") work = argv[i + 1];
    if (std::string(argv[i]) == "--only") only = std::atoi(argv[i + 1]);
  }
  fs::create_directories(work);

  const Config cfg = Config::load(POLYREG_DEFAULT_CONFIG);
  const Scenario sc = build_scenario(cfg);

  int failures = 0;
  const auto report = [&](int id, const char* name, const std::function<Outcome()>& run) {
    if (only != 0 && id != only && !(only == 10 && id == 9)) return;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %2d %-26s %s  %s\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  };

  double rates_runtime = 0.0;
  report(1, "minors oracle", minors_oracle);
  report(2, "gradient checks", gradient_checks);
  report(3, "convexity certificates", convexity);
  report(4, "coercivity", coercivity);
  report(5, "rotation minimality", rotation_minimality);
  report(6, "subgradient certificates", [&] { return subgradient_certificates(sc); });
  report(7, "Bregman identities", [&] { return bregman_identities(sc); });
  report(8, "source condition", [&] { return source_condition(cfg, sc); });
  report(9, "rate experiment", [&] { return rate_experiment(work, rates_runtime); });
  report(10, "determinism", [&] { return determinism(work); });
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
