#include "polyreg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include "polyreg/errors.hpp"
#include "polyreg/field_calculus.hpp"
#include "polyreg/registration.hpp"

namespace polyreg {

double tikhonov_objective(const TikhonovProblem& problem, const MatrixField& u,
                          std::span<double> grad) {
  if (grad.empty()) {
    const ScalarImage ku = warp(problem.reference, u, WarpMode::clamp);
    return data_term(ku, problem.data, problem.q, u.domain()) +
           problem.alpha * energy(u, problem.integrand).value;
  }
  std::vector<double> reg_grad(grad.size());
  const double reg = energy_and_gradient(u, problem.integrand, reg_grad);
  const double fit = data_term_and_gradient(problem.reference, problem.data, problem.q, u, grad);
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += problem.alpha * reg_grad[i];
  return fit + problem.alpha * reg;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Pair {
  std::vector<double> s, y;
  double rho;
};

}  // namespace

SolveResult minimize(const TikhonovProblem& problem, const SolverOptions& options) {
  const MatrixField& start = problem.initial;
  const std::size_t n = start.values().size();
  const int dim = start.dim();
  const Grid& grid = start.grid();

  // Inverse lumped mass per value; 0 on nodes that carry no cells.
  std::vector<double> inv_mass(n, 0.0);
  for (std::size_t k = 0; k < grid.num_nodes(); ++k) {
    const double w = start.domain().node_weights()[k];
    for (int r = 0; r < dim; ++r) inv_mass[k * dim + r] = w > 0.0 ? 1.0 / w : 0.0;
  }
  const auto scaled_norm = [&](const std::vector<double>& g) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(g[i] * inv_mass[i]));
    return m;
  };

  SolveResult result{start, 0.0, 0, false, 0.0, 0, ""};
  MatrixField& x = result.u;
  std::vector<double> g(n), g_new(n), d(n);
  double f = tikhonov_objective(problem, x, g);
  ++result.evaluations;
  if (!std::isfinite(f)) throw DomainError("initial field has infinite objective");

  std::deque<Pair> memory;
  std::deque<double> history{f};
  const double first_step = 0.5 * std::min(grid.hx(), grid.hy());

  MatrixField trial = x;
  for (;;) {
    result.gradient_norm = scaled_norm(g);
    if (result.gradient_norm < options.tol) {
      result.converged = true;
      result.stop_reason = "gradient";
      break;
    }
    if (static_cast<int>(history.size()) > options.stall_window) {
      const double drop = history.front() - history.back();
      if (drop <= options.tol * options.tol * std::abs(history.back())) {
        result.converged = true;
        result.stop_reason = "stalled";
        break;
      }
    }
    if (result.iterations >= options.max_iter) {
      result.stop_reason = "max_iter";
      break;
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      // Two-loop recursion with H0 = gamma M^{-1}.
      d = g;
      std::vector<double> alphas(memory.size());
      for (std::size_t m = memory.size(); m-- > 0;) {
        alphas[m] = memory[m].rho * dot(memory[m].s, d);
        for (std::size_t i = 0; i < n; ++i) d[i] -= alphas[m] * memory[m].y[i];
      }
      double gamma = 1.0;
      if (!memory.empty()) {
        const Pair& last = memory.back();
        double ymy = 0.0;
        for (std::size_t i = 0; i < n; ++i) ymy += last.y[i] * last.y[i] * inv_mass[i];
        gamma = ymy > 0.0 ? dot(last.s, last.y) / ymy : 1.0;
      }
      for (std::size_t i = 0; i < n; ++i) d[i] *= gamma * inv_mass[i];
      for (std::size_t m = 0; m < memory.size(); ++m) {
        const double beta = memory[m].rho * dot(memory[m].y, d);
        for (std::size_t i = 0; i < n; ++i) d[i] += (alphas[m] - beta) * memory[m].s[i];
      }
      for (double& v : d) v = -v;
      if (memory.empty()) {
        // Steepest descent: cap the first trial displacement at half a cell.
        const double sup = *std::max_element(d.begin(), d.end(), [](double a, double b) {
          return std::abs(a) < std::abs(b);
        });
        if (sup != 0.0) {
          const double scale = first_step / std::abs(sup);
          for (double& v : d) v *= scale;
        }
      }

      const double slope = dot(g, d);
      if (!(slope < 0.0)) {
        memory.clear();
        continue;
      }
      double t = 1.0;
      for (int ls = 0; ls < 60; ++ls, t *= options.shrink) {
        for (std::size_t i = 0; i < n; ++i) trial.values()[i] = x.values()[i] + t * d[i];
        const double f_new = tikhonov_objective(problem, trial, g_new);
        ++result.evaluations;
        if (std::isfinite(f_new) && f_new <= f + options.armijo * t * slope) {
          Pair p{std::vector<double>(n), std::vector<double>(n), 0.0};
          for (std::size_t i = 0; i < n; ++i) {
            p.s[i] = trial.values()[i] - x.values()[i];
            p.y[i] = g_new[i] - g[i];
          }
          const double sy = dot(p.s, p.y);
          if (sy > 1e-12 * std::sqrt(dot(p.s, p.s) * dot(p.y, p.y))) {
            p.rho = 1.0 / sy;
            memory.push_back(std::move(p));
            if (static_cast<int>(memory.size()) > options.memory) memory.pop_front();
          }
          std::swap(x.storage(), trial.storage());
          std::swap(g, g_new);
          f = f_new;
          accepted = true;
          break;
        }
      }
      if (!accepted) memory.clear();
    }
    if (!accepted) {
      result.stop_reason = "line_search";
      break;
    }
    ++result.iterations;
    history.push_back(f);
    if (static_cast<int>(history.size()) > options.stall_window + 1) history.pop_front();
  }
  result.objective = f;
  return result;
}

double choose_alpha(double delta, double q, double alpha0, double epsilon,
                    std::optional<double> beta2) {
  if (!(delta > 0.0)) throw ConfigError("choose_alpha needs delta > 0");
  if (!(q >= 1.0)) throw ConfigError("choose_alpha needs q >= 1");
  if (!(alpha0 > 0.0)) throw ConfigError("choose_alpha needs alpha0 > 0");
  if (q > 1.0) return alpha0 * std::pow(delta, q - 1.0);
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ConfigError("for q = 1, epsilon must be in [0, 1)");
  const double alpha = alpha0 * std::pow(delta, epsilon);
  if (epsilon == 0.0) {
    if (!beta2 || !(alpha * *beta2 > 0.0 && alpha * *beta2 < 1.0)) {
      throw ConfigError("q = 1 with epsilon = 0 requires 0 < alpha * beta2 < 1");
    }
  }
  return alpha;
}

}  // namespace polyreg
