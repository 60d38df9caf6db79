#ifndef GPE_PEAKS_RUNNER_HPP
#define GPE_PEAKS_RUNNER_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include "gpe_peaks/config.hpp"
#include "gpe_peaks/scalar_field.hpp"

namespace gpe {

struct RunOptions {
  std::optional<std::string> out_dir;  // overrides output.directory
  bool overwrite = false;              // write into the directory itself, not a timestamped child
  int threads = 1;
};

struct RunResult {
  int exit_code = 0;  // 0 all converged, 2 otherwise
  std::string output_dir;
};

/// Executes the configured mode and writes report.json / sweep.csv.
/// Throws Error(kIo) when the output cannot be written.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options,
                         std::ostream& log);

/// Writes profile_N.csv (header "r,w") into dir and returns its path.
std::string write_profile_csv(int dim, const std::string& dir);

/// "%.17g" formatting used for every float written to CSV.
std::string format_real(double v);

}  // namespace gpe

#endif  // GPE_PEAKS_RUNNER_HPP
