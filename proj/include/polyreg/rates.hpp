#pragma once

// Convergence-rate experiment: solve the registration problem over a
// geometric ladder of noise levels and fit log-log slopes of the Bregman
// distance and the residual against delta.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "polyreg/config.hpp"
#include "polyreg/poly_subgradient.hpp"
#include "polyreg/solver.hpp"

namespace polyreg {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
};

// OLS of log(value) on log(delta) over the rows with positive delta and
// value. Throws InsufficientDataError if fewer than 3 such rows remain.
SlopeFit fit_slope(std::span<const std::pair<double, double>> rows);

struct RateRow {
  double delta = 0.0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  double d_poly = 0.0;
  double residual = 0.0;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  // Diagnostics, not part of the CSV.
  double regularizer = 0.0;
  int start = 0;            // index of the winning start
  int projected_nodes = 0;  // nodes pulled back into the domain after solving
  double wallclock = 0.0;
};

struct RateReport {
  std::vector<RateRow> rows;
  std::optional<SlopeFit> d_fit;         // smallest fit_levels levels
  std::optional<SlopeFit> residual_fit;  // smallest fit_levels levels
  std::optional<SlopeFit> d_fit_full;
  std::optional<SlopeFit> residual_fit_full;
  std::pair<double, double> fit_range{0.0, 0.0};  // delta range of the asymptotic fit
  int excluded_zero_rows = 0;
  int excluded_unconverged_rows = 0;
  bool d_monotone = false;  // D decreases with delta over the fit range
  std::vector<std::string> warnings;
};

struct RateExperiment {
  Scenario scenario;
  PolySubgradient w;  // at u_dagger
  std::vector<double> deltas;  // descending
  double alpha0 = 1.0;
  double epsilon = 0.0;
  double beta2 = 1.0;
  std::vector<std::uint64_t> seeds;
  SolverOptions solver;
  int starts = 3;
  double random_start_scale = 0.01;
  int fit_levels = 4;
  bool include_exact_row = true;
};

RateExperiment make_rate_experiment(const Config& config);

// Noise seed used for level index `level` and experiment seed `seed`.
std::uint64_t noise_seed(std::uint64_t seed, int level);

RateReport run_rates(const RateExperiment& experiment);

// Pulls nodes of the closed domain that were mapped outside it back onto the
// domain boundary; returns how many moved.
int project_into_domain(MatrixField& u);

// CSV with header delta,alpha,seed,D_poly,residual,objective,iters,converged,
// floats in round-trip precision.
std::string rate_report_csv(const RateReport& report);
nlohmann::json slopes_json(const RateReport& report);

}  // namespace polyreg
