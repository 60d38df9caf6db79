#include "gpe_peaks/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace gpe {

using nlohmann::json;

const char* to_string(RunMode mode) {
  switch (mode) {
    case RunMode::kSingle: return "single";
    case RunMode::kSweep: return "sweep";
    case RunMode::kMultistart: return "multistart";
    case RunMode::kAsymptotics: return "asymptotics";
    case RunMode::kSymmetry: return "symmetry";
  }
  return "single";
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return dim == o.dim && params == o.params && v1 == o.v1 && v2 == o.v2 &&
         half_width == o.half_width && n_per_axis == o.n_per_axis && rescaled == o.rescaled &&
         mode == o.mode && eps == o.eps && eps_list == o.eps_list && n_starts == o.n_starts &&
         seed == o.seed && cluster_tol == o.cluster_tol && pohozaev_radius == o.pohozaev_radius &&
         discrete_reference == o.discrete_reference && solver == o.solver &&
         directory == o.directory && formats == o.formats && include_states == o.include_states;
}

namespace {

// Read access to one JSON object that remembers its path and rejects unknown keys.
class Section {
 public:
  Section(const json& node, std::string path, std::set<std::string> allowed)
      : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_, "expected an object");
    for (const auto& [key, value] : node_.items()) {
      if (!allowed.count(key)) throw ConfigError(child(key), "unknown key \"" + key + "\"");
    }
  }

  std::string child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) const { return node_.contains(key); }
  const json& at(const std::string& key) const { return node_.at(key); }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key)) return required(key, fallback);
    const json& v = node_.at(key);
    if (!v.is_number()) throw ConfigError(child(key), "expected a number");
    return v.get<double>();
  }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt) const {
    if (!has(key)) return required(key, fallback);
    const json& v = node_.at(key);
    if (!v.is_number_integer()) throw ConfigError(child(key), "expected an integer");
    return v.get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_unsigned()) throw ConfigError(child(key), "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_boolean()) throw ConfigError(child(key), "expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) const {
    if (!has(key)) return required(key, fallback);
    const json& v = node_.at(key);
    if (!v.is_string()) throw ConfigError(child(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    const json& v = node_.at(key);
    if (!v.is_array()) throw ConfigError(child(key), "expected an array of numbers");
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!v[k].is_number()) {
        throw ConfigError(child(key) + "[" + std::to_string(k) + "]", "expected a number");
      }
      out.push_back(v[k].get<double>());
    }
    return out;
  }

  Section object(const std::string& key, std::set<std::string> allowed) const {
    static const json empty = json::object();
    return Section(has(key) ? node_.at(key) : empty, child(key), std::move(allowed));
  }

 private:
  template <typename T>
  T required(const std::string& key, const std::optional<T>& fallback) const {
    if (!fallback) throw ConfigError(child(key), "missing required key");
    return *fallback;
  }

  const json& node_;
  std::string path_;
};

PotentialEntry parse_potential(const Section& parent, const std::string& key, int dim, double mu,
                               const std::string& base_dir) {
  if (!parent.has(key)) throw ConfigError(parent.child(key), "missing required key");
  const json& node = parent.at(key);
  const std::string path = parent.child(key);
  if (!node.is_object() || !node.contains("kind") || !node.at("kind").is_string()) {
    throw ConfigError(path + ".kind", "missing or non-string potential kind");
  }
  const std::string kind = node.at("kind").get<std::string>();
  PotentialEntry entry;
  try {
    if (kind == "constant") {
      Section s(node, path, {"kind"});
      entry.spec = PotentialSpec<double>::constant(mu);
    } else if (kind == "polynomial_well") {
      Section s(node, path, {"kind", "center", "m", "p", "skew"});
      std::vector<double> c = s.numbers("center");
      if (c.empty()) c.assign(dim, 0.0);
      if (static_cast<int>(c.size()) != dim) {
        throw ConfigError(path + ".center", "expected " + std::to_string(dim) + " coordinates");
      }
      Point<double> z(dim);
      for (int a = 0; a < dim; ++a) z[a] = c[a];
      entry.spec = PotentialSpec<double>::polynomial_well(mu, z, s.number("m", 1.0), s.number("p", 2.0),
                                                          s.number("skew", 0.0));
    } else if (kind == "ring") {
      Section s(node, path, {"kind", "rings", "r0", "plateau"});
      if (dim < 2) throw ConfigError(path + ".kind", "ring potentials need dim >= 2");
      if (!s.has("rings") || !s.at("rings").is_array() || s.at("rings").empty()) {
        throw ConfigError(path + ".rings", "expected a nonempty array of rings");
      }
      std::vector<RingTerm<double>> rings;
      const json& arr = s.at("rings");
      for (std::size_t k = 0; k < arr.size(); ++k) {
        Section r(arr[k], path + ".rings[" + std::to_string(k) + "]", {"A", "b", "p"});
        rings.push_back({r.number("A"), r.number("b", 1.0), r.number("p", 2.0)});
      }
      entry.spec = PotentialSpec<double>::ring(mu, std::move(rings), s.number("r0", 1.0),
                                               s.number("plateau", 1.0));
    } else if (kind == "tabulated") {
      Section s(node, path, {"kind", "file"});
      entry.file = s.text("file");
      std::filesystem::path file(entry.file);
      if (file.is_relative()) file = std::filesystem::path(base_dir) / file;
      entry.spec = load_tabulated_csv<double>(file.string(), dim, mu);
    } else {
      throw ConfigError(path + ".kind", "unknown potential kind \"" + kind + "\"");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
  return entry;
}

json potential_json(const PotentialEntry& entry) {
  json out;
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ConstantPotential<double>>) {
          out["kind"] = "constant";
        } else if constexpr (std::is_same_v<T, PolynomialWell<double>>) {
          out["kind"] = "polynomial_well";
          out["center"] = std::vector<double>(f.center.data(), f.center.data() + f.center.size());
          out["m"] = f.coefficient;
          out["p"] = f.exponent;
          out["skew"] = f.skew;
        } else if constexpr (std::is_same_v<T, RingPotential<double>>) {
          out["kind"] = "ring";
          json rings = json::array();
          for (const auto& t : f.rings) {
            rings.push_back({{"A", t.radius}, {"b", t.coefficient}, {"p", t.exponent}});
          }
          out["rings"] = rings;
          out["r0"] = f.r0;
          out["plateau"] = f.plateau;
        } else {
          out["kind"] = "tabulated";
          out["file"] = entry.file;
        }
      },
      entry.spec.form);
  return out;
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t k = 0; k < std::min(byte, text.size()); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    const auto pos = msg.find("parse error");
    throw ConfigError(line, col, pos == std::string::npos ? msg : msg.substr(pos));
  }

  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  Section top(root, "", {"problem", "grid", "run", "solver", "output"});

  if (!top.has("problem")) throw ConfigError("problem", "missing required key");
  const Section problem = top.object("problem", {"dim", "params", "potentials"});
  const auto dim = problem.integer("dim");
  if (dim < 1 || dim > 3) throw ConfigError("problem.dim", "must be 1, 2 or 3");
  cfg.dim = static_cast<int>(dim);

  const Section params = problem.object("params", {"a1", "a2", "beta", "mu"});
  cfg.params.a1 = params.number("a1");
  cfg.params.a2 = params.number("a2");
  cfg.params.beta = params.number("beta");
  cfg.params.mu = params.number("mu", 1.0);
  if (!(cfg.params.a1 > 0)) throw ConfigError("problem.params.a1", "must be positive");
  if (!(cfg.params.a2 > 0)) throw ConfigError("problem.params.a2", "must be positive");
  if (!(cfg.params.mu > 0)) throw ConfigError("problem.params.mu", "must be positive");
  if (!(cfg.params.beta > std::max(cfg.params.a1, cfg.params.a2))) {
    throw ConfigError("problem.params.beta",
                      "ground states need beta > max(a1, a2); there is no positive solution "
                      "for beta in [min(a1,a2), max(a1,a2)]");
  }

  const Section pots = problem.object("potentials", {"V1", "V2"});
  cfg.v1 = parse_potential(pots, "V1", cfg.dim, cfg.params.mu, base_dir);
  cfg.v2 = parse_potential(pots, "V2", cfg.dim, cfg.params.mu, base_dir);

  const Section grid = top.object("grid", {"half_width", "n_per_axis", "rescaled"});
  cfg.half_width = grid.number("half_width", 20.0);
  const auto n = grid.integer("n_per_axis", 801);
  cfg.rescaled = grid.boolean("rescaled", true);
  if (!(cfg.half_width > 0)) throw ConfigError("grid.half_width", "must be positive");
  if (n < 16) throw ConfigError("grid.n_per_axis", "must be at least 16");
  if (n > 1 << 20) throw ConfigError("grid.n_per_axis", "too large");
  cfg.n_per_axis = static_cast<int>(n);
  try {
    build_grid<double>(cfg.dim, cfg.half_width, cfg.n_per_axis);
  } catch (const Error& e) {
    throw ConfigError("grid.n_per_axis", e.what());
  }

  const Section run = top.object("run", {"mode", "eps", "eps_list", "n_starts", "seed", "cluster_tol",
                                         "pohozaev_radius", "expansion_reference"});
  const std::string mode = run.text("mode", std::string("single"));
  if (mode == "single") cfg.mode = RunMode::kSingle;
  else if (mode == "sweep") cfg.mode = RunMode::kSweep;
  else if (mode == "multistart") cfg.mode = RunMode::kMultistart;
  else if (mode == "asymptotics") cfg.mode = RunMode::kAsymptotics;
  else if (mode == "symmetry") cfg.mode = RunMode::kSymmetry;
  else throw ConfigError("run.mode", "unknown mode \"" + mode + "\"");
  cfg.eps = run.number("eps", 0.1);
  if (!(cfg.eps > 0)) throw ConfigError("run.eps", "must be positive");
  cfg.eps_list = run.numbers("eps_list");
  for (std::size_t k = 0; k < cfg.eps_list.size(); ++k) {
    const std::string at = "run.eps_list[" + std::to_string(k) + "]";
    if (!(cfg.eps_list[k] > 0)) throw ConfigError(at, "must be positive");
    if (k > 0 && !(cfg.eps_list[k] < cfg.eps_list[k - 1])) throw ConfigError(at, "eps_list must be strictly decreasing");
  }
  if (cfg.mode == RunMode::kSweep && cfg.eps_list.empty()) {
    throw ConfigError("run.eps_list", "sweep mode needs a nonempty eps_list");
  }
  if (cfg.mode == RunMode::kAsymptotics && cfg.eps_list.size() < 3) {
    throw ConfigError("run.eps_list", "asymptotics mode needs at least 3 eps values");
  }
  cfg.params.eps = cfg.eps_list.empty() ? cfg.eps : cfg.eps_list.front();
  const auto starts = run.integer("n_starts", 8);
  if (starts < 1) throw ConfigError("run.n_starts", "must be at least 1");
  cfg.n_starts = static_cast<int>(starts);
  cfg.seed = run.unsigned_integer("seed", 0);
  cfg.cluster_tol = run.number("cluster_tol", 1e-2);
  if (!(cfg.cluster_tol > 0)) throw ConfigError("run.cluster_tol", "must be positive");
  cfg.pohozaev_radius = run.number("pohozaev_radius", 0.0);
  if (!(cfg.pohozaev_radius >= 0)) throw ConfigError("run.pohozaev_radius", "must be nonnegative");
  const std::string ref = run.text("expansion_reference", std::string("discrete"));
  if (ref != "discrete" && ref != "closed_form") {
    throw ConfigError("run.expansion_reference", "expected \"discrete\" or \"closed_form\"");
  }
  cfg.discrete_reference = ref == "discrete";
  if (cfg.mode == RunMode::kSymmetry && cfg.dim < 2) {
    throw ConfigError("run.mode", "symmetry mode needs dim 2 or 3");
  }

  const Section solver = top.object("solver", {"step", "max_iter", "grad_tol", "precondition", "backend"});
  cfg.solver.step = solver.number("step", 0.5);
  const auto max_iter = solver.integer("max_iter", 20000);
  cfg.solver.grad_tol = solver.number("grad_tol", 1e-8);
  cfg.solver.precondition = solver.boolean("precondition", true);
  const std::string backend = solver.text("backend", std::string("spectral"));
  if (!(cfg.solver.step > 0)) throw ConfigError("solver.step", "must be positive");
  if (max_iter < 0 || max_iter > std::numeric_limits<int>::max()) {
    throw ConfigError("solver.max_iter", "must be a nonnegative int");
  }
  cfg.solver.max_iter = static_cast<int>(max_iter);
  if (!(cfg.solver.grad_tol > 0)) throw ConfigError("solver.grad_tol", "must be positive");
  if (backend == "spectral") cfg.solver.backend = HelmholtzBackend::kSpectral;
  else if (backend == "cg") cfg.solver.backend = HelmholtzBackend::kConjugateGradient;
  else throw ConfigError("solver.backend", "expected \"spectral\" or \"cg\"");
  cfg.solver.seed = cfg.seed;
  cfg.solver.rescaled = cfg.rescaled;

  const Section output = top.object("output", {"directory", "formats", "include_states"});
  cfg.directory = output.text("directory", std::string("output"));
  if (output.has("formats")) {
    const json& f = output.at("formats");
    if (!f.is_array()) throw ConfigError("output.formats", "expected an array");
    cfg.formats.clear();
    for (std::size_t k = 0; k < f.size(); ++k) {
      const std::string at = "output.formats[" + std::to_string(k) + "]";
      if (!f[k].is_string()) throw ConfigError(at, "expected a string");
      const std::string v = f[k].get<std::string>();
      if (v != "csv" && v != "json") throw ConfigError(at, "expected \"csv\" or \"json\"");
      if (std::find(cfg.formats.begin(), cfg.formats.end(), v) != cfg.formats.end()) {
        throw ConfigError(at, "duplicate format");
      }
      cfg.formats.push_back(v);
    }
  }
  cfg.include_states = output.boolean("include_states", true);
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto parent = std::filesystem::path(path).parent_path();
  return parse_config_text(buf.str(), parent.empty() ? std::string(".") : parent.string());
}

std::string serialize_config(const ExperimentConfig& c) {
  json root;
  root["problem"] = {
      {"dim", c.dim},
      {"params", {{"a1", c.params.a1}, {"a2", c.params.a2}, {"beta", c.params.beta}, {"mu", c.params.mu}}},
      {"potentials", {{"V1", potential_json(c.v1)}, {"V2", potential_json(c.v2)}}}};
  root["grid"] = {{"half_width", c.half_width}, {"n_per_axis", c.n_per_axis}, {"rescaled", c.rescaled}};
  json run = {{"mode", to_string(c.mode)},
              {"eps", c.eps},
              {"n_starts", c.n_starts},
              {"seed", c.seed},
              {"cluster_tol", c.cluster_tol},
              {"pohozaev_radius", c.pohozaev_radius},
              {"expansion_reference", c.discrete_reference ? "discrete" : "closed_form"}};
  if (!c.eps_list.empty()) run["eps_list"] = c.eps_list;
  root["run"] = run;
  root["solver"] = {{"step", c.solver.step},
                    {"max_iter", c.solver.max_iter},
                    {"grad_tol", c.solver.grad_tol},
                    {"precondition", c.solver.precondition},
                    {"backend", c.solver.backend == HelmholtzBackend::kSpectral ? "spectral" : "cg"}};
  root["output"] = {{"directory", c.directory}, {"formats", c.formats}, {"include_states", c.include_states}};
  return root.dump(2) + "\n";
}

}  // namespace gpe
