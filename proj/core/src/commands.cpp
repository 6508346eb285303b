#include "selmod/commands.hpp"

#include "selmod/error.hpp"

#include <cmath>
#include <sstream>

namespace selmod {

namespace {

double parse_alpha(const std::string& token) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  while (used < token.size() && token[used] == ' ') ++used;
  if (used == 0 || used != token.size() || !std::isfinite(v)) {
    throw SchemaError("invalid alpha value '" + token + "'", 0, "alphas");
  }
  return v;
}

}  // namespace

FitReportFile cmd_fit(const FitCommand& cmd) {
  FitReportFile file;
  const std::string spec_text = read_file(cmd.spec);
  const std::string data_text = read_file(cmd.data);
  file.spec = parse_model_spec(spec_text);
  LoadResult loaded = dataset_from_csv(parse_csv(data_text), file.spec, {cmd.lenient});
  file.load_warnings = std::move(loaded.warnings);
  file.provenance = {library_version(), sha256_hex(spec_text), sha256_hex(data_text), std::nullopt};

  file.report = profile_maximize(loaded.data, file.spec.make_model(), file.spec.make_grid());
  file.json = report_to_json(file.report, file.spec, loaded.data, file.provenance, file.load_warnings);
  file.table = format_report_table(file.report, loaded.data, file.spec);

  if (cmd.out) write_file(*cmd.out, file.json);
  std::optional<std::filesystem::path> sidecar = cmd.profile_out;
  if (!sidecar && cmd.out) sidecar = std::filesystem::path(cmd.out->string() + ".profile.csv");
  if (sidecar) write_file(*sidecar, profile_to_csv(file.report.profile));
  return file;
}

Dataset cmd_simulate(const std::filesystem::path& config, const std::filesystem::path& out) {
  const SimConfig c = load_sim_config(config);
  Dataset data = simulate(c);
  write_dataset(out, data);
  return data;
}

std::vector<double> parse_alpha_list(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (c != ' ' && c != '\t') s += c;
  }
  if (s.empty() || s == "auto") return {};
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw SchemaError("alpha range must be lo:hi:step", 0, "alphas");
    const double lo = parse_alpha(parts[0]), hi = parse_alpha(parts[1]), step = parse_alpha(parts[2]);
    if (!(step > 0.0) || hi < lo) throw SchemaError("alpha range needs lo <= hi and step > 0", 0, "alphas");
    const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    if (count > 100000) throw SchemaError("alpha range has too many points", 0, "alphas");
    std::vector<double> out;
    for (long i = 0; i <= count; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
  }
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, ',');) {
    if (!part.empty()) out.push_back(parse_alpha(part));
  }
  if (out.empty()) throw SchemaError("empty alpha list", 0, "alphas");
  return out;
}

ProfileCurve cmd_profile(const ProfileCommand& cmd) {
  const ModelSpec spec = load_model_spec(cmd.spec);
  const LoadResult loaded = load_dataset(cmd.data, spec, {cmd.lenient});
  const std::vector<double> alphas = parse_alpha_list(cmd.alphas);
  const Model model = spec.make_model();
  GridConfig grid = spec.make_grid();
  ProfileCurve curve;
  if (alphas.empty()) {
    grid.alphas.clear();
    curve = profile_maximize(loaded.data, model, grid).profile;
  } else {
    curve = profile_at(loaded.data, model, alphas, grid.inner);
  }
  write_file(cmd.out, profile_to_csv(curve));
  return curve;
}

int exit_code(const std::exception& e) noexcept {
  if (dynamic_cast<const SchemaError*>(&e)) return 2;
  if (dynamic_cast<const ConvergenceError*>(&e)) return 3;
  if (dynamic_cast<const RankDeficientError*>(&e)) return 3;
  return 1;
}

}  // namespace selmod
