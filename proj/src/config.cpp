#include "polyreg/config.hpp"

#include <fstream>
#include <sstream>

#include "polyreg/errors.hpp"
#include "polyreg/io.hpp"
#include "polyreg/registration.hpp"

namespace polyreg {

namespace {

using nlohmann::json;

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object()) throw ConfigError(std::string("section '") + key + "' must be an object");
  return j.at(key);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

Config Config::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  Config c;
  {
    const json& s = section(j, "grid");
    read(s, "xmin", c.grid.xmin);
    read(s, "xmax", c.grid.xmax);
    read(s, "ymin", c.grid.ymin);
    read(s, "ymax", c.grid.ymax);
    read(s, "nx", c.grid.nx);
    read(s, "ny", c.grid.ny);
    require(c.grid.xmax > c.grid.xmin && c.grid.ymax > c.grid.ymin, "grid bounds are empty");
    require(c.grid.nx >= 2 && c.grid.ny >= 2, "grid needs at least 2 nodes per axis");
  }
  {
    const json& s = section(j, "mask");
    read(s, "type", c.mask.type);
    if (s.contains("center")) {
      const auto v = s.at("center").get<std::vector<double>>();
      require(v.size() == 2, "mask.center needs two entries");
      c.mask.cx = v[0];
      c.mask.cy = v[1];
    }
    read(s, "radius", c.mask.radius);
    read(s, "path", c.mask.path);
    require(c.mask.type == "disk" || c.mask.type == "full" || c.mask.type == "file",
            "mask.type must be disk, full or file");
    require(c.mask.type != "disk" || c.mask.radius > 0.0, "mask.radius must be positive");
    require(c.mask.type != "file" || !c.mask.path.empty(), "mask.path is required for type file");
  }
  {
    const json& s = section(j, "integrand");
    read(s, "name", c.integrand.name);
    read(s, "p", c.integrand.p);
    read(s, "q", c.integrand.q);
  }
  {
    const json& s = section(j, "image");
    if (s.contains("blobs")) {
      for (const json& b : s.at("blobs")) {
        GaussianBlob blob;
        const auto center = b.at("center").get<std::vector<double>>();
        require(center.size() == 2, "blob center needs two entries");
        blob.center = {center[0], center[1]};
        blob.amplitude = b.value("amplitude", 1.0);
        blob.sigma = b.value("sigma", 0.2);
        require(blob.sigma > 0.0, "blob sigma must be positive");
        c.image.blobs.push_back(blob);
      }
    }
    read(s, "count", c.image.count);
    read(s, "seed", c.image.seed);
    read(s, "resolution", c.image.resolution);
    require(c.image.count >= 1 || !c.image.blobs.empty(), "image needs at least one blob");
    require(c.image.resolution == 0 || c.image.resolution >= 2, "image.resolution must be 0 or >= 2");
  }
  {
    const json& s = section(j, "experiment");
    auto& e = c.experiment;
    read(s, "theta", e.theta);
    read(s, "delta0", e.delta0);
    read(s, "level_min", e.level_min);
    read(s, "level_max", e.level_max);
    read(s, "alpha0", e.alpha0);
    read(s, "epsilon", e.epsilon);
    read(s, "q", e.q);
    read(s, "seeds", e.seeds);
    read(s, "beta1", e.beta1);
    read(s, "beta2", e.beta2);
    read(s, "alpha_bar", e.alpha_bar);
    read(s, "rho", e.rho);
    read(s, "fit_levels", e.fit_levels);
    read(s, "include_exact_row", e.include_exact_row);
    read(s, "subgradient", e.subgradient);
    require(e.delta0 > 0.0, "experiment.delta0 must be positive");
    require(e.level_min >= 0 && e.level_max >= e.level_min, "bad experiment level range");
    require(e.alpha0 > 0.0, "experiment.alpha0 must be positive");
    require(e.q >= 1.0, "experiment.q must be >= 1");
    require(!e.seeds.empty(), "experiment.seeds is empty");
    require(e.fit_levels >= 3, "experiment.fit_levels must be >= 3");
    require(e.subgradient == "zero" || e.subgradient == "poly",
            "experiment.subgradient must be zero or poly");
    require(e.beta1 >= 0.0 && e.beta1 < 1.0, "experiment.beta1 must be in [0, 1)");
    require(e.beta2 >= 0.0, "experiment.beta2 must be >= 0");
  }
  {
    const json& s = section(j, "solver");
    read(s, "tol", c.solver.tol);
    read(s, "max_iter", c.solver.max_iter);
    read(s, "memory", c.solver.memory);
    read(s, "starts", c.solver.starts);
    read(s, "random_start_scale", c.solver.random_start_scale);
    require(c.solver.tol > 0.0, "solver.tol must be positive");
    require(c.solver.max_iter >= 1 && c.solver.memory >= 1, "solver limits must be positive");
    require(c.solver.starts >= 1 && c.solver.starts <= 3, "solver.starts must be in 1..3");
  }
  {
    const json& s = section(j, "certificate");
    read(s, "trials", c.certificate.trials);
    read(s, "seed", c.certificate.seed);
    read(s, "radius", c.certificate.radius);
    read(s, "base_points", c.certificate.base_points);
    require(c.certificate.radius > 0.0, "certificate.radius must be positive");
  }
  {
    const json& s = section(j, "gradient_check");
    read(s, "fields", c.gradient_check.fields);
    read(s, "nx", c.gradient_check.nx);
    read(s, "h", c.gradient_check.h);
    read(s, "tol", c.gradient_check.tol);
    read(s, "seed", c.gradient_check.seed);
    require(c.gradient_check.nx >= 3, "gradient_check.nx must be >= 3");
    require(c.gradient_check.h > 0.0, "gradient_check.h must be positive");
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  Config c = from_json(j);
  if (c.mask.type == "file" && std::filesystem::path(c.mask.path).is_relative()) {
    c.mask.path = (path.parent_path() / c.mask.path).string();
  }
  return c;
}

json Config::to_json() const {
  json blobs = json::array();
  for (const auto& b : image.blobs) {
    blobs.push_back({{"center", {b.center.x(), b.center.y()}},
                     {"amplitude", b.amplitude},
                     {"sigma", b.sigma}});
  }
  return {
      {"grid",
       {{"xmin", grid.xmin}, {"xmax", grid.xmax}, {"ymin", grid.ymin}, {"ymax", grid.ymax},
        {"nx", grid.nx}, {"ny", grid.ny}}},
      {"mask",
       {{"type", mask.type}, {"center", {mask.cx, mask.cy}}, {"radius", mask.radius},
        {"path", mask.path}}},
      {"integrand", {{"name", integrand.name}, {"p", integrand.p}, {"q", integrand.q}}},
      {"image",
       {{"blobs", blobs}, {"count", image.count}, {"seed", image.seed},
        {"resolution", image.resolution}}},
      {"experiment",
       {{"theta", experiment.theta},
        {"delta0", experiment.delta0},
        {"level_min", experiment.level_min},
        {"level_max", experiment.level_max},
        {"alpha0", experiment.alpha0},
        {"epsilon", experiment.epsilon},
        {"q", experiment.q},
        {"seeds", experiment.seeds},
        {"beta1", experiment.beta1},
        {"beta2", experiment.beta2},
        {"alpha_bar", experiment.alpha_bar},
        {"rho", experiment.rho},
        {"fit_levels", experiment.fit_levels},
        {"include_exact_row", experiment.include_exact_row},
        {"subgradient", experiment.subgradient}}},
      {"solver",
       {{"tol", solver.tol}, {"max_iter", solver.max_iter}, {"memory", solver.memory},
        {"starts", solver.starts}, {"random_start_scale", solver.random_start_scale}}},
      {"certificate",
       {{"trials", certificate.trials}, {"seed", certificate.seed},
        {"radius", certificate.radius}, {"base_points", certificate.base_points}}},
      {"gradient_check",
       {{"fields", gradient_check.fields}, {"nx", gradient_check.nx}, {"h", gradient_check.h},
        {"tol", gradient_check.tol}, {"seed", gradient_check.seed}}},
  };
}

SolverOptions Config::solver_options() const {
  SolverOptions o;
  o.tol = solver.tol;
  o.max_iter = solver.max_iter;
  o.memory = solver.memory;
  return o;
}

SourceConditionParams Config::source_params(double r_dagger) const {
  SourceConditionParams p;
  p.beta1 = experiment.beta1;
  p.beta2 = experiment.beta2;
  p.alpha_bar = experiment.alpha_bar > 0.0 ? experiment.alpha_bar : experiment.alpha0;
  p.rho = experiment.rho > 0.0 ? experiment.rho : 10.0 * p.alpha_bar * r_dagger;
  // rho must strictly exceed alpha_bar R(u_dagger); keep it positive when R vanishes.
  if (!(p.rho > p.alpha_bar * r_dagger)) p.rho = p.alpha_bar * r_dagger + 1.0;
  p.validate(r_dagger);
  return p;
}

Scenario build_scenario(const Config& config) {
  const auto& g = config.grid;
  const Grid grid(g.xmin, g.xmax, g.ymin, g.ymax, g.nx, g.ny);
  std::shared_ptr<const Domain> domain;
  const Disk disk{{config.mask.cx, config.mask.cy}, config.mask.radius};
  if (config.mask.type == "disk") {
    domain = std::make_shared<const Domain>(Domain::disk(grid, disk));
  } else if (config.mask.type == "full") {
    domain = std::make_shared<const Domain>(Domain::full(grid));
  } else {
    domain = std::make_shared<const Domain>(Domain::masked(grid, read_mask_csv(config.mask.path, grid)));
  }

  Integrand integrand = make_integrand(config.integrand.name, config.integrand.p, config.integrand.q);
  if (integrand.layout().rows() != 2) throw ConfigError("registration needs a 2D integrand");

  std::vector<GaussianBlob> blobs = config.image.blobs;
  if (blobs.empty()) {
    Disk region = disk;
    if (config.mask.type != "disk") {
      region.center = {(g.xmin + g.xmax) / 2, (g.ymin + g.ymax) / 2};
      region.radius = std::min(g.xmax - g.xmin, g.ymax - g.ymin) / 2;
    }
    blobs = random_blobs(config.image.count, config.image.seed, region);
  }
  const int res = config.image.resolution;
  const Grid image_grid = res == 0 ? grid : Grid(g.xmin, g.xmax, g.ymin, g.ymax, res, res);
  ScalarImage reference = render_blobs(image_grid, blobs);

  MatrixField u_dagger = rotation_field(config.experiment.theta, domain);
  ScalarImage exact = warp(reference, u_dagger, WarpMode::clamp);
  return Scenario{domain, std::move(integrand), std::move(reference), std::move(u_dagger),
                  std::move(exact), config.experiment.q};
}

}  // namespace polyreg
