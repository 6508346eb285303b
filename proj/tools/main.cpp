#include "selmod/commands.hpp"
#include "selmod/error.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Selection-model regression: fit, simulate and profile"};
  app.set_version_flag("--version", selmod::library_version());
  app.require_subcommand(1);

  selmod::FitCommand fit;
  std::string fit_out, fit_profile;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model and report estimates");
  fit_cmd->add_option("data", fit.data, "CSV data file")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("spec", fit.spec, "YAML model spec")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--out", fit_out, "JSON report path");
  fit_cmd->add_option("--profile-out", fit_profile, "profile curve CSV (default <out>.profile.csv)");
  fit_cmd->add_flag("--lenient", fit.lenient, "warn instead of failing on responses of unselected rows");

  std::filesystem::path sim_config, sim_out;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a dataset from a YAML config");
  sim_cmd->add_option("config", sim_config, "YAML simulation config")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--out", sim_out, "CSV output path")->required();

  selmod::ProfileCommand prof;
  auto* prof_cmd = app.add_subcommand("profile", "Relative profile log-likelihood over alpha");
  prof_cmd->add_option("data", prof.data, "CSV data file")->required()->check(CLI::ExistingFile);
  prof_cmd->add_option("spec", prof.spec, "YAML model spec")->required()->check(CLI::ExistingFile);
  prof_cmd->add_option("--alphas", prof.alphas, "auto, a comma list, or lo:hi:step")->default_val("auto");
  prof_cmd->add_option("--out", prof.out, "CSV output path")->required();
  prof_cmd->add_flag("--lenient", prof.lenient, "warn instead of failing on responses of unselected rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*fit_cmd) {
      if (!fit_out.empty()) fit.out = fit_out;
      if (!fit_profile.empty()) fit.profile_out = fit_profile;
      const selmod::FitReportFile file = selmod::cmd_fit(fit);
      for (const auto& w : file.load_warnings) std::cerr << "warning: " << w << "\n";
      if (fit.out) {
        std::cout << file.table;
      } else {
        std::cout << file.json;
      }
    } else if (*sim_cmd) {
      const selmod::Dataset data = selmod::cmd_simulate(sim_config, sim_out);
      std::cerr << "wrote " << data.n() << " rows (" << data.n_selected() << " selected) to " << sim_out << "\n";
    } else if (*prof_cmd) {
      const selmod::ProfileCurve curve = selmod::cmd_profile(prof);
      std::cerr << "wrote " << curve.alphas.size() << " profile points to " << prof.out << "\n";
    }
  } catch (const selmod::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const selmod::ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return selmod::exit_code(e);
  }
  return 0;
}
