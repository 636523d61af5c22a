#pragma once

// Experiment configuration (JSON) and the scenario it describes.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "polyreg/bregman.hpp"
#include "polyreg/field.hpp"
#include "polyreg/image.hpp"
#include "polyreg/integrands.hpp"
#include "polyreg/solver.hpp"

namespace polyreg {

struct Config {
  struct GridSection {
    double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;
    int nx = 64, ny = 64;
  } grid;
  struct MaskSection {
    std::string type = "disk";  // disk | full | file
    double cx = 0.0, cy = 0.0, radius = 1.0;
    std::string path;  // 0/1 cell CSV for type "file"
  } mask;
  struct IntegrandSection {
    std::string name = "rotation";
    double p = 4.0;
    double q = 2.0;
  } integrand;
  struct ImageSection {
    std::vector<GaussianBlob> blobs;  // empty: random_blobs(count, seed)
    int count = 3;
    std::uint64_t seed = 7;
    int resolution = 0;  // nodes per axis of I2; 0 = field grid
  } image;
  struct ExperimentSection {
    double theta = M_PI / 6.0;
    double delta0 = 0.05;
    int level_min = 1;
    int level_max = 7;
    double alpha0 = 0.1;
    double epsilon = 0.0;
    double q = 2.0;  // data exponent
    std::vector<std::uint64_t> seeds{1};
    double beta1 = 0.5;
    double beta2 = 1.0;
    double alpha_bar = 0.0;  // 0: alpha0
    double rho = 0.0;        // 0: 10 alpha_bar R(u_dagger)
    int fit_levels = 4;
    bool include_exact_row = true;
    std::string subgradient = "zero";  // zero | poly
  } experiment;
  struct SolverSection {
    double tol = 1e-6;
    int max_iter = 3000;
    int memory = 10;
    int starts = 3;
    double random_start_scale = 0.01;
  } solver;
  struct CertificateSection {
    int trials = 1000;
    std::uint64_t seed = 11;
    double radius = 0.1;
    int base_points = 5;
  } certificate;
  struct GradientCheckSection {
    int fields = 20;
    int nx = 16;
    double h = 1e-5;
    double tol = 1e-6;
    std::uint64_t seed = 3;
  } gradient_check;

  static Config from_json(const nlohmann::json& j);
  static Config load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  SolverOptions solver_options() const;
  SourceConditionParams source_params(double r_dagger) const;
};

// Everything derived from a Config that the experiments share.
struct Scenario {
  std::shared_ptr<const Domain> domain;
  Integrand integrand;
  ScalarImage reference;  // I2
  MatrixField u_dagger;   // exact rotation
  ScalarImage exact;      // I1 = I2 o u_dagger
  double q;
};

Scenario build_scenario(const Config& config);

}  // namespace polyreg
