#pragma once

// File formats: CSV datasets, YAML model specs and simulation configs, JSON
// fit reports and profile-curve CSVs.

#include "selmod/dataset.hpp"
#include "selmod/estimator.hpp"
#include "selmod/likelihood.hpp"
#include "selmod/simulator.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace selmod {

struct ModelSpec {
  std::string family = "poisson";
  std::string link;  // empty selects the family default
  std::string mechanism = "probit-linear";
  std::string response_col = "y";
  std::string selection_col = "d";
  std::vector<std::string> x_cols;
  std::vector<std::string> w_cols;
  bool x_intercept = true;
  bool w_intercept = true;
  std::optional<int> truncation_K;
  double ci_level = 0.95;
  std::optional<double> kappa;
  // Explicit alpha grid; empty means the automatic scan.
  std::vector<double> grid;
  std::optional<double> grid_scale;
  unsigned threads = 1;

  // Throws SchemaError on unknown keys, bad values or overlapping columns.
  void validate() const;
  ResponseFamily make_family() const;
  Model make_model() const;
  GridConfig make_grid() const;
};

ModelSpec parse_model_spec(const std::string& yaml_text);
ModelSpec load_model_spec(const std::filesystem::path& path);
std::string dump_model_spec(const ModelSpec& spec);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

struct LoadOptions {
  // Accept a response on an unselected row, with a warning, and drop it.
  bool lenient = false;
};

struct LoadResult {
  Dataset data;
  std::vector<std::string> warnings;
};

// Builds the design matrices named by the spec; row numbers in errors are
// 1-based data rows (the header is row 0).
LoadResult dataset_from_csv(const CsvTable& table, const ModelSpec& spec, const LoadOptions& options = {});
LoadResult load_dataset(const std::filesystem::path& path, const ModelSpec& spec, const LoadOptions& options = {});

// Writes selection and response columns followed by every non-intercept
// covariate; numbers use the shortest representation that round-trips.
std::string dataset_to_csv(const Dataset& data, const std::string& response_col = "y",
                           const std::string& selection_col = "d");
void write_dataset(const std::filesystem::path& path, const Dataset& data, const std::string& response_col = "y",
                   const std::string& selection_col = "d");

SimConfig parse_sim_config(const std::string& yaml_text);
SimConfig load_sim_config(const std::filesystem::path& path);
// A model spec that fits data written from this config.
ModelSpec model_spec_for(const SimConfig& config);

std::string format_double(double v);
std::string sha256_hex(const std::string& bytes);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

struct Provenance {
  std::string version;
  std::string spec_sha256;
  std::string data_sha256;
  std::optional<std::uint64_t> seed;
};

struct FitReportFile {
  FitReport report;
  ModelSpec spec;
  Provenance provenance;
  std::vector<std::string> load_warnings;
  std::string json;   // serialized document
  std::string table;  // human-readable summary
};

std::string report_to_json(const FitReport& report, const ModelSpec& spec, const Dataset& data,
                           const Provenance& provenance, const std::vector<std::string>& load_warnings = {});
// Columns alpha, rel_loglik, status; failed points have an empty rel_loglik
// and status "failed".
std::string profile_to_csv(const ProfileCurve& curve);
// Human-readable estimate / std.err / ratio tables.
std::string format_report_table(const FitReport& report, const Dataset& data, const ModelSpec& spec);

const char* library_version();

}  // namespace selmod
