#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cutplate/verification.hpp"

namespace cutplate::cli {

struct RunConfig {
  StudyConfig study;
  std::filesystem::path output_dir = ".";
  bool emit_plot = false;
  int samples = 101;  // elevation grid resolution per direction

  void validate() const;
};

/// Applies `key = value` lines (blank lines and '#' comments ignored) onto `config`.
void apply_config_file(std::istream& in, RunConfig& config);

/// Writes convergence.csv, run.log, solution_<level>.txt and optionally plot.gp.
/// Throws cutplate::Error subclasses on pipeline failure.
StudyReport run(const RunConfig& config);

/// Formats with 9 significant digits independent of the global locale.
std::string format_number(double v);

/// Command-line entry point; returns the process exit status.
int main(int argc, char** argv);

}  // namespace cutplate::cli
