#pragma once

// The fit, simulate and profile commands behind the command-line tool.

#include "selmod/io.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace selmod {

struct FitCommand {
  std::filesystem::path data;
  std::filesystem::path spec;
  std::optional<std::filesystem::path> out;          // JSON report
  std::optional<std::filesystem::path> profile_out;  // defaults to <out>.profile.csv
  bool lenient = false;
};

// Throws SchemaError for bad inputs and ConvergenceError when the estimator
// fails.
FitReportFile cmd_fit(const FitCommand& cmd);

// Writes the simulated CSV and returns the dataset.
Dataset cmd_simulate(const std::filesystem::path& config, const std::filesystem::path& out);

// "auto" (empty result), a comma-separated list, or lo:hi:step.
std::vector<double> parse_alpha_list(const std::string& text);

struct ProfileCommand {
  std::filesystem::path data;
  std::filesystem::path spec;
  std::string alphas = "auto";
  std::filesystem::path out;
  bool lenient = false;
};

ProfileCurve cmd_profile(const ProfileCommand& cmd);

// 0 success, 2 schema error, 3 non-convergence, 1 anything else.
int exit_code(const std::exception& e) noexcept;

}  // namespace selmod
