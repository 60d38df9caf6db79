#ifndef GPE_PEAKS_CONFIG_HPP
#define GPE_PEAKS_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gpe_peaks/error.hpp"
#include "gpe_peaks/grid.hpp"
#include "gpe_peaks/potentials.hpp"
#include "gpe_peaks/report.hpp"

namespace gpe {

/// Raised for malformed or invalid experiment configs. Parse errors carry a
/// 1-based line and column; validation errors carry the offending field path.
class ConfigError : public Error {
 public:
  ConfigError(int line, int column, const std::string& message)
      : Error(ErrorCode::kParseError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  ConfigError(std::string field_path, const std::string& message)
      : Error(ErrorCode::kValidationError, field_path + ": " + message),
        field_path_(std::move(field_path)) {}

  const std::string& field_path() const { return field_path_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string field_path_;
  int line_ = 0;
  int column_ = 0;
};

enum class RunMode { kSingle, kSweep, kMultistart, kAsymptotics, kSymmetry };

const char* to_string(RunMode mode);

struct PotentialEntry {
  PotentialSpec<double> spec;
  std::string file;  // tabulated kind only, as written in the config
  bool operator==(const PotentialEntry&) const = default;
};

struct ExperimentConfig {
  // problem
  int dim = 1;
  GpeParams<double> params{1, 1, 2, 0.1, 1};
  PotentialEntry v1;
  PotentialEntry v2;
  // grid
  double half_width = 20;
  int n_per_axis = 801;
  bool rescaled = true;
  // run
  RunMode mode = RunMode::kSingle;
  double eps = 0.1;
  std::vector<double> eps_list;
  int n_starts = 8;
  std::uint64_t seed = 0;
  double cluster_tol = 1e-2;
  double pohozaev_radius = 0;      // 0: three peak widths
  bool discrete_reference = true;  // asymptotics: c_mu from a constant-potential solve
  // solver
  SolverOptions<double> solver;
  // output
  std::string directory = "output";
  std::vector<std::string> formats{"csv", "json"};
  bool include_states = true;

  std::string base_dir;  // resolves relative tabulated files; not serialised

  bool operator==(const ExperimentConfig& o) const;
};

/// Parses and validates a JSON config; relative table files resolve
/// against base_dir.
ExperimentConfig parse_config_text(const std::string& text, const std::string& base_dir = ".");
ExperimentConfig parse_config(const std::string& path);

/// Canonical JSON text of a config; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

}  // namespace gpe

#endif  // GPE_PEAKS_CONFIG_HPP
