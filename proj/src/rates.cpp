#include "polyreg/rates.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "polyreg/bregman.hpp"
#include "polyreg/errors.hpp"
#include "polyreg/field_calculus.hpp"
#include "polyreg/io.hpp"
#include "polyreg/registration.hpp"

namespace polyreg {

namespace {

constexpr int kRigidScanSteps = 64;

// Best rigid rotation about the domain center by a scan of the data term;
// uses only the data, never the exact solution.
MatrixField rigid_scan(const TikhonovProblem& problem) {
  const auto& domain = problem.initial.domain_ptr();
  MatrixField best = problem.initial;
  double best_fit = std::numeric_limits<double>::infinity();
  for (int s = 0; s < kRigidScanSteps; ++s) {
    const double theta = -M_PI + 2.0 * M_PI * s / kRigidScanSteps;
    MatrixField u = rotation_field(theta, domain);
    const double fit = data_term(warp(problem.reference, u, WarpMode::clamp), problem.data,
                                 problem.q, *domain);
    if (fit < best_fit) {
      best_fit = fit;
      best = std::move(u);
    }
  }
  return best;
}

struct Solved {
  SolveResult result;
  int start = 0;
};

Solved solve_multistart(TikhonovProblem problem, const RateExperiment& e,
                        const std::vector<MatrixField>& starts) {
  Solved best{SolveResult{problem.initial, std::numeric_limits<double>::infinity(), 0, false, 0.0,
                          0, ""},
              -1};
  for (std::size_t s = 0; s < starts.size(); ++s) {
    problem.initial = starts[s];
    SolveResult r = minimize(problem, e.solver);
    if (r.objective < best.result.objective) best = Solved{std::move(r), static_cast<int>(s)};
  }
  return best;
}

RateRow finish_row(const RateExperiment& e, const TikhonovProblem& problem, Solved solved,
                   std::uint64_t seed, double delta,
                   std::chrono::steady_clock::time_point started) {
  MatrixField& u = solved.result.u;
  RateRow row;
  row.delta = delta;
  row.alpha = problem.alpha;
  row.seed = seed;
  row.projected_nodes = project_into_domain(u);
  row.objective = tikhonov_objective(problem, u);
  row.iterations = solved.result.iterations;
  row.converged = solved.result.converged;
  row.start = solved.start;
  // Strict: reported solutions must map the domain into itself.
  const ScalarImage ku = warp(e.scenario.reference, u, WarpMode::strict);
  row.residual = lq_distance(ku, problem.data, problem.q, u.domain());
  row.d_poly = bregman_poly(e.scenario.integrand, u, e.scenario.u_dagger, e.w);
  row.regularizer = energy(u, e.scenario.integrand).value;
  row.wallclock =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return row;
}

std::optional<SlopeFit> try_fit(const std::vector<std::pair<double, double>>& pts) {
  try {
    return fit_slope(pts);
  } catch (const InsufficientDataError&) {
    return std::nullopt;
  }
}

nlohmann::json fit_json(const std::optional<SlopeFit>& f) {
  if (!f) return nullptr;
  return {{"slope", f->slope}, {"intercept", f->intercept}, {"r2", f->r2}, {"points", f->points}};
}

}  // namespace

SlopeFit fit_slope(std::span<const std::pair<double, double>> rows) {
  std::vector<double> xs, ys;
  for (const auto& [delta, value] : rows) {
    if (delta > 0.0 && value > 0.0 && std::isfinite(delta) && std::isfinite(value)) {
      xs.push_back(std::log(delta));
      ys.push_back(std::log(value));
    }
  }
  if (xs.size() < 3) {
    throw InsufficientDataError("slope fit needs at least 3 rows with positive delta and value, got " +
                                std::to_string(xs.size()));
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw InsufficientDataError("slope fit needs at least two distinct deltas");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.points = static_cast<int>(xs.size());
  return fit;
}

RateExperiment make_rate_experiment(const Config& config) {
  Scenario scenario = build_scenario(config);
  if (scenario.u_dagger.dim() != 2) throw ConfigError("rate experiment needs a 2D deformation");
  const double r_dagger = energy(scenario.u_dagger, scenario.integrand).value;
  PolySubgradient w = config.experiment.subgradient == "zero"
                          ? PolySubgradient::zero(scenario.u_dagger, r_dagger)
                          : poly_subgradient(scenario.integrand, scenario.u_dagger);
  std::vector<double> deltas;
  for (int k = config.experiment.level_min; k <= config.experiment.level_max; ++k) {
    deltas.push_back(config.experiment.delta0 * std::ldexp(1.0, -k));
  }
  return RateExperiment{
      .scenario = std::move(scenario),
      .w = std::move(w),
      .deltas = std::move(deltas),
      .alpha0 = config.experiment.alpha0,
      .epsilon = config.experiment.epsilon,
      .beta2 = config.experiment.beta2,
      .seeds = config.experiment.seeds,
      .solver = config.solver_options(),
      .starts = config.solver.starts,
      .random_start_scale = config.solver.random_start_scale,
      .fit_levels = config.experiment.fit_levels,
      .include_exact_row = config.experiment.include_exact_row,
  };
}

std::uint64_t noise_seed(std::uint64_t seed, int level) {
  // splitmix64 finalizer over (seed, level)
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(level) + 1;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

int project_into_domain(MatrixField& u) {
  const Domain& d = u.domain();
  const double tol = kWarpToleranceFactor * domain_diameter(d);
  int moved = 0;
  for (std::size_t k = 0; k < u.num_nodes(); ++k) {
    if (!d.node_in_closure(k)) continue;
    const Point p(u.values()[k * 2], u.values()[k * 2 + 1]);
    if (d.distance_outside(p) <= tol) continue;
    const Point q = d.project(p);
    u.values()[k * 2] = q.x();
    u.values()[k * 2 + 1] = q.y();
    ++moved;
  }
  return moved;
}

RateReport run_rates(const RateExperiment& e) {
  if (e.deltas.empty()) throw ConfigError("rate experiment has no noise levels");
  if (e.seeds.empty()) throw ConfigError("rate experiment has no seeds");
  const Scenario& sc = e.scenario;
  const auto& domain = sc.domain;
  const std::optional<double> beta2 = e.beta2;
  const double alpha_min = choose_alpha(e.deltas.back(), sc.q, e.alpha0, e.epsilon, beta2);

  RateReport report;
  std::optional<MatrixField> smallest_solution;
  for (std::size_t si = 0; si < e.seeds.size(); ++si) {
    const std::uint64_t seed = e.seeds[si];
    std::optional<MatrixField> warm;
    for (std::size_t li = 0; li < e.deltas.size(); ++li) {
      const auto started = std::chrono::steady_clock::now();
      const double delta = e.deltas[li];
      NoisySample data = add_noise(sc.exact, delta, sc.q, noise_seed(seed, static_cast<int>(li)), *domain);
      TikhonovProblem problem{sc.integrand, sc.reference, std::move(data.image), sc.q,
                              choose_alpha(delta, sc.q, e.alpha0, e.epsilon, beta2),
                              MatrixField::identity(domain)};
      std::vector<MatrixField> starts{MatrixField::identity(domain)};
      if (e.starts >= 2) {
        MatrixField r = MatrixField::identity(domain);
        const MatrixField bump = random_smooth_field(domain, 2, noise_seed(seed ^ 0x5eedULL, static_cast<int>(li)));
        for (std::size_t i = 0; i < r.values().size(); ++i) {
          r.values()[i] += e.random_start_scale * bump.values()[i];
        }
        starts.push_back(std::move(r));
      }
      if (e.starts >= 3) starts.push_back(warm ? *warm : rigid_scan(problem));
      Solved solved = solve_multistart(problem, e, starts);
      warm = solved.result.u;
      report.rows.push_back(finish_row(e, problem, std::move(solved), seed, delta, started));
    }
    if (si == 0) smallest_solution = warm;
  }

  if (e.include_exact_row) {
    const auto started = std::chrono::steady_clock::now();
    TikhonovProblem problem{sc.integrand, sc.reference, sc.exact, sc.q, alpha_min,
                            MatrixField::identity(domain)};
    std::vector<MatrixField> starts{MatrixField::identity(domain)};
    if (smallest_solution) starts.push_back(*smallest_solution);
    report.rows.push_back(finish_row(e, problem, solve_multistart(problem, e, starts),
                                     e.seeds.front(), 0.0, started));
  }

  // Fits use converged rows with delta > 0 and D > 0.
  std::set<double> levels;
  for (const RateRow& r : report.rows) {
    if (r.delta <= 0.0) continue;
    if (!r.converged) {
      ++report.excluded_unconverged_rows;
      continue;
    }
    if (!(r.d_poly > 0.0)) ++report.excluded_zero_rows;
    levels.insert(r.delta);
  }
  std::vector<double> ascending(levels.begin(), levels.end());
  if (static_cast<int>(ascending.size()) > e.fit_levels) ascending.resize(e.fit_levels);
  const std::set<double> fit_set(ascending.begin(), ascending.end());
  if (!ascending.empty()) report.fit_range = {ascending.front(), ascending.back()};

  std::vector<std::pair<double, double>> d_pts, r_pts, d_all, r_all;
  std::map<double, std::pair<double, int>> d_mean;
  for (const RateRow& r : report.rows) {
    if (r.delta <= 0.0 || !r.converged) continue;
    d_all.emplace_back(r.delta, r.d_poly);
    r_all.emplace_back(r.delta, r.residual);
    if (fit_set.count(r.delta)) {
      d_pts.emplace_back(r.delta, r.d_poly);
      r_pts.emplace_back(r.delta, r.residual);
      d_mean[r.delta].first += r.d_poly;
      d_mean[r.delta].second += 1;
    }
  }
  report.d_fit = try_fit(d_pts);
  report.residual_fit = try_fit(r_pts);
  report.d_fit_full = try_fit(d_all);
  report.residual_fit_full = try_fit(r_all);

  report.d_monotone = d_mean.size() >= 2;
  double previous = -1.0;
  for (const auto& [delta, acc] : d_mean) {  // ascending delta
    const double mean = acc.first / acc.second;
    if (!(mean > previous)) report.d_monotone = false;
    previous = mean;
  }

  if (report.excluded_unconverged_rows > 0) {
    report.warnings.push_back(std::to_string(report.excluded_unconverged_rows) +
                              " unconverged row(s) excluded from the fits");
  }
  if (report.excluded_zero_rows > 0) {
    report.warnings.push_back(std::to_string(report.excluded_zero_rows) +
                              " row(s) with D_poly <= 0 excluded from the fits");
  }
  if (report.d_fit && report.d_fit->slope > 1.2 && report.d_monotone) {
    std::ostringstream msg;
    msg << "superlinear: D_poly slope " << report.d_fit->slope
        << " exceeds 1.2 with monotone D, consistent with an O(delta) bound";
    report.warnings.push_back(msg.str());
  }
  if (!report.d_fit) report.warnings.push_back("insufficient data for the D_poly fit");
  if (!report.residual_fit) report.warnings.push_back("insufficient data for the residual fit");
  return report;
}

std::string rate_report_csv(const RateReport& report) {
  std::ostringstream out;
  out << "delta,alpha,seed,D_poly,residual,objective,iters,converged\n";
  for (const RateRow& r : report.rows) {
    out << format_double(r.delta) << ',' << format_double(r.alpha) << ',' << r.seed << ','
        << format_double(r.d_poly) << ',' << format_double(r.residual) << ','
        << format_double(r.objective) << ',' << r.iterations << ',' << (r.converged ? 1 : 0)
        << '\n';
  }
  return out.str();
}

nlohmann::json slopes_json(const RateReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const RateRow& r : report.rows) {
    rows.push_back({{"delta", r.delta},
                    {"regularizer", r.regularizer},
                    {"start", r.start},
                    {"projected_nodes", r.projected_nodes},
                    {"wallclock", r.wallclock}});
  }
  return {
      {"D_poly", fit_json(report.d_fit)},
      {"residual", fit_json(report.residual_fit)},
      {"D_poly_all_levels", fit_json(report.d_fit_full)},
      {"residual_all_levels", fit_json(report.residual_fit_full)},
      {"fit_range", {report.fit_range.first, report.fit_range.second}},
      {"D_monotone", report.d_monotone},
      {"excluded_zero_rows", report.excluded_zero_rows},
      {"excluded_unconverged_rows", report.excluded_unconverged_rows},
      {"warnings", report.warnings},
      {"rows", rows},
  };
}

}  // namespace polyreg
