#include "selmod/io.hpp"

#include "selmod/error.hpp"

#include <boost/tokenizer.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#ifndef SELMOD_VERSION
#define SELMOD_VERSION "0.0.0"
#endif

namespace selmod {

namespace {

using json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kIntercept = "(Intercept)";

std::optional<double> parse_number(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; });
}

template <typename T>
T yaml_as(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw SchemaError("invalid value for '" + key + "'", 0, key);
  }
}

std::vector<double> yaml_doubles(const YAML::Node& node, const std::string& key) {
  if (node.IsScalar()) return {yaml_as<double>(node, key)};
  if (!node.IsSequence()) throw SchemaError("'" + key + "' must be a list of numbers", 0, key);
  std::vector<double> out;
  for (const auto& v : node) out.push_back(yaml_as<double>(v, key));
  return out;
}

YAML::Node load_yaml_map(const std::string& text, const char* what) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw SchemaError(std::string("cannot parse ") + what + ": " + e.what());
  }
  if (!root.IsMap()) throw SchemaError(std::string(what) + " must be a key/value mapping");
  return root;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json coef_block(const std::vector<std::string>& names, const Eigen::VectorXd& est, const Eigen::VectorXd& se,
                const Eigen::VectorXd& ratio, Eigen::Index offset) {
  json out = json::array();
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto k = offset + static_cast<Eigen::Index>(j);
    out.push_back({{"name", names[j]},
                   {"estimate", number(est[static_cast<Eigen::Index>(j)])},
                   {"std_err", number(se.size() > k ? se[k] : kNaN)},
                   {"ratio", number(ratio.size() > k ? ratio[k] : kNaN)}});
  }
  return out;
}

json glm_block(const std::vector<std::string>& names, const GlmFit& fit) {
  json out = json::array();
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    out.push_back({{"name", names[j]}, {"estimate", number(fit.coef[k])}, {"std_err", number(fit.std_err[k])}});
  }
  return out;
}

json bound_json(const CiBound& b) { return {{"value", number(b.value)}, {"kind", to_string(b.kind)}}; }

}  // namespace

const char* library_version() { return SELMOD_VERSION; }

// ---------------------------------------------------------------- model spec

void ModelSpec::validate() const {
  try {
    make_model().validate();
  } catch (const SchemaError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  if (response_col.empty() || selection_col.empty()) throw SchemaError("response_col and selection_col are required");
  if (response_col == selection_col) throw SchemaError("response_col and selection_col must differ", 0, response_col);
  for (const auto* cols : {&x_cols, &w_cols}) {
    std::set<std::string> seen;
    for (const auto& c : *cols) {
      if (c == response_col || c == selection_col) {
        throw SchemaError("covariate '" + c + "' is also the response or selection column", 0, c);
      }
      if (!seen.insert(c).second) throw SchemaError("covariate '" + c + "' listed twice", 0, c);
    }
  }
  if (x_cols.empty() && !x_intercept) throw SchemaError("the response model has no covariates");
  if (w_cols.empty() && !w_intercept) throw SchemaError("the selection model has no covariates");
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw SchemaError("ci_level must lie in (0, 1)", 0, "ci_level");
  if (truncation_K && *truncation_K < 1) throw SchemaError("truncation_K must be at least 1", 0, "truncation_K");
  if (grid_scale && !(*grid_scale > 0.0)) throw SchemaError("grid_scale must be positive", 0, "grid_scale");
  if (threads < 1) throw SchemaError("threads must be at least 1", 0, "threads");
}

ResponseFamily ModelSpec::make_family() const {
  try {
    if (family == "bernoulli") return link.empty() ? ResponseFamily::bernoulli() : ResponseFamily::bernoulli(link_from_string(link));
    if (family == "poisson") return link.empty() ? ResponseFamily::poisson() : ResponseFamily::poisson(link_from_string(link));
    if (family == "normal") return link.empty() ? ResponseFamily::normal() : ResponseFamily::normal(link_from_string(link));
    if (family == "negbin") {
      if (!kappa) throw SchemaError("the negbin family needs kappa", 0, "kappa");
      return link.empty() ? ResponseFamily::negative_binomial(*kappa)
                          : ResponseFamily::negative_binomial(*kappa, link_from_string(link));
    }
  } catch (const SchemaError&) {
    throw;
  } catch (const std::exception& e) {
    throw SchemaError(e.what(), 0, "link");
  }
  throw SchemaError("unknown family '" + family + "' (bernoulli, poisson, negbin, normal)", 0, "family");
}

Model ModelSpec::make_model() const {
  try {
    return Model{make_family(), SelectionMechanism::from_key(mechanism), truncation_K};
  } catch (const SchemaError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what(), 0, "mechanism");
  }
}

GridConfig ModelSpec::make_grid() const {
  GridConfig g;
  g.alphas = grid;
  g.ci_level = ci_level;
  if (grid_scale) g.scale = *grid_scale;
  g.inner.eval.threads = threads;
  return g;
}

ModelSpec parse_model_spec(const std::string& yaml_text) {
  const YAML::Node root = load_yaml_map(yaml_text, "model spec");
  ModelSpec s;
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    if (key == "family") s.family = yaml_as<std::string>(v, key);
    else if (key == "link") s.link = yaml_as<std::string>(v, key);
    else if (key == "mechanism") s.mechanism = yaml_as<std::string>(v, key);
    else if (key == "response_col") s.response_col = yaml_as<std::string>(v, key);
    else if (key == "selection_col") s.selection_col = yaml_as<std::string>(v, key);
    else if (key == "x_cols") s.x_cols = v.IsNull() ? std::vector<std::string>{} : yaml_as<std::vector<std::string>>(v, key);
    else if (key == "w_cols") s.w_cols = v.IsNull() ? std::vector<std::string>{} : yaml_as<std::vector<std::string>>(v, key);
    else if (key == "x_intercept") s.x_intercept = yaml_as<bool>(v, key);
    else if (key == "w_intercept") s.w_intercept = yaml_as<bool>(v, key);
    else if (key == "truncation_K") s.truncation_K = yaml_as<int>(v, key);
    else if (key == "ci_level") s.ci_level = yaml_as<double>(v, key);
    else if (key == "kappa") s.kappa = yaml_as<double>(v, key);
    else if (key == "grid") {
      if (v.IsScalar() && v.Scalar() == "auto") s.grid.clear();
      else s.grid = yaml_doubles(v, key);
    } else if (key == "grid_scale") s.grid_scale = yaml_as<double>(v, key);
    else if (key == "threads") s.threads = yaml_as<unsigned>(v, key);
    else throw SchemaError("unknown model spec key '" + key + "'", 0, key);
  }
  s.validate();
  return s;
}

ModelSpec load_model_spec(const std::filesystem::path& path) { return parse_model_spec(read_file(path)); }

std::string dump_model_spec(const ModelSpec& s) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "family" << YAML::Value << s.family;
  if (!s.link.empty()) out << YAML::Key << "link" << YAML::Value << s.link;
  if (s.kappa) out << YAML::Key << "kappa" << YAML::Value << format_double(*s.kappa);
  out << YAML::Key << "mechanism" << YAML::Value << s.mechanism;
  out << YAML::Key << "response_col" << YAML::Value << s.response_col;
  out << YAML::Key << "selection_col" << YAML::Value << s.selection_col;
  out << YAML::Key << "x_cols" << YAML::Value << YAML::Flow << s.x_cols;
  out << YAML::Key << "w_cols" << YAML::Value << YAML::Flow << s.w_cols;
  out << YAML::Key << "x_intercept" << YAML::Value << s.x_intercept;
  out << YAML::Key << "w_intercept" << YAML::Value << s.w_intercept;
  if (s.truncation_K) out << YAML::Key << "truncation_K" << YAML::Value << *s.truncation_K;
  out << YAML::Key << "ci_level" << YAML::Value << format_double(s.ci_level);
  if (!s.grid.empty()) {
    std::vector<std::string> g;
    for (double a : s.grid) g.push_back(format_double(a));
    out << YAML::Key << "grid" << YAML::Value << YAML::Flow << g;
  }
  if (s.grid_scale) out << YAML::Key << "grid_scale" << YAML::Value << format_double(*s.grid_scale);
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

// ---------------------------------------------------------------- CSV

CsvTable parse_csv(const std::string& text) {
  using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.empty() && !have_header) continue;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    try {
      Tokenizer tok(line, boost::escaped_list_separator<char>('\\', ',', '"'));
      fields.assign(tok.begin(), tok.end());
    } catch (const boost::escaped_list_error& e) {
      throw SchemaError(std::string("malformed CSV line: ") + e.what(), line_no - 1);
    }
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw SchemaError(fmt::format("row {} has {} fields, header has {}", t.rows.size() + 1, fields.size(),
                                    t.header.size()),
                        t.rows.size() + 1);
    }
    t.rows.push_back(std::move(fields));
  }
  if (!have_header) throw SchemaError("CSV file has no header row");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

LoadResult dataset_from_csv(const CsvTable& table, const ModelSpec& spec, const LoadOptions& options) {
  spec.validate();
  const ResponseFamily family = spec.make_family();
  auto column = [&](const std::string& name) {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) throw SchemaError("column '" + name + "' not found in header", 0, name);
    if (std::find(it + 1, table.header.end(), name) != table.header.end()) {
      throw SchemaError("column '" + name + "' appears more than once", 0, name);
    }
    return static_cast<std::size_t>(it - table.header.begin());
  };
  const std::size_t dcol = column(spec.selection_col);
  const std::size_t ycol = column(spec.response_col);
  std::vector<std::size_t> xcols, wcols;
  for (const auto& c : spec.x_cols) xcols.push_back(column(c));
  for (const auto& c : spec.w_cols) wcols.push_back(column(c));

  const auto n = static_cast<Eigen::Index>(table.rows.size());
  const Eigen::Index xo = spec.x_intercept ? 1 : 0;
  const Eigen::Index wo = spec.w_intercept ? 1 : 0;
  LoadResult r;
  Dataset& data = r.data;
  data.d.resize(n);
  data.y.resize(n);
  data.X.resize(n, xo + static_cast<Eigen::Index>(xcols.size()));
  data.W.resize(n, wo + static_cast<Eigen::Index>(wcols.size()));
  if (spec.x_intercept) data.x_names.push_back(kIntercept);
  if (spec.w_intercept) data.w_names.push_back(kIntercept);
  data.x_names.insert(data.x_names.end(), spec.x_cols.begin(), spec.x_cols.end());
  data.w_names.insert(data.w_names.end(), spec.w_cols.begin(), spec.w_cols.end());

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    const std::size_t rn = static_cast<std::size_t>(i) + 1;
    auto numeric = [&](std::size_t c) {
      const auto v = parse_number(row[c]);
      if (!v || !std::isfinite(*v)) {
        throw SchemaError(fmt::format("row {}, column '{}': '{}' is not a finite number", rn, table.header[c], row[c]),
                          rn, table.header[c]);
      }
      return *v;
    };

    const auto dv = parse_number(row[dcol]);
    if (!dv || (*dv != 0.0 && *dv != 1.0)) {
      throw SchemaError(fmt::format("row {}, column '{}': selection indicator must be 0 or 1, got '{}'", rn,
                                    spec.selection_col, row[dcol]),
                        rn, spec.selection_col);
    }
    data.d[i] = static_cast<int>(*dv);
    const bool y_blank = blank(row[ycol]);
    if (data.d[i] == 1) {
      if (y_blank) {
        throw SchemaError(fmt::format("row {}, column '{}': response missing on a selected row", rn, spec.response_col),
                          rn, spec.response_col);
      }
      data.y[i] = numeric(ycol);
      if (!family.in_support(data.y[i])) {
        throw SchemaError(fmt::format("row {}, column '{}': {} is outside the support of the {} family", rn,
                                      spec.response_col, row[ycol], family.name()),
                          rn, spec.response_col);
      }
    } else {
      if (!y_blank) {
        const std::string msg = fmt::format("row {}, column '{}': response present on an unselected row", rn,
                                            spec.response_col);
        if (!options.lenient) throw SchemaError(msg, rn, spec.response_col);
        r.warnings.push_back(msg + "; ignored");
      }
      data.y[i] = kNaN;
    }
    if (spec.x_intercept) data.X(i, 0) = 1.0;
    if (spec.w_intercept) data.W(i, 0) = 1.0;
    for (std::size_t j = 0; j < xcols.size(); ++j) data.X(i, xo + static_cast<Eigen::Index>(j)) = numeric(xcols[j]);
    for (std::size_t j = 0; j < wcols.size(); ++j) data.W(i, wo + static_cast<Eigen::Index>(j)) = numeric(wcols[j]);
  }
  data.validate();
  return r;
}

LoadResult load_dataset(const std::filesystem::path& path, const ModelSpec& spec, const LoadOptions& options) {
  return dataset_from_csv(read_csv(path), spec, options);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "NaN";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string dataset_to_csv(const Dataset& data, const std::string& response_col, const std::string& selection_col) {
  struct Col {
    std::string name;
    const Eigen::MatrixXd* m;
    Eigen::Index j;
  };
  std::vector<Col> cols;
  auto add = [&](const std::vector<std::string>& names, const Eigen::MatrixXd& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const std::string name =
          static_cast<std::size_t>(j) < names.size() ? names[static_cast<std::size_t>(j)] : "c" + std::to_string(j);
      if (name == kIntercept) continue;
      const auto dup = std::find_if(cols.begin(), cols.end(), [&](const Col& c) { return c.name == name; });
      if (dup != cols.end()) {
        if (dup->m->col(dup->j) != m.col(j)) throw std::invalid_argument("covariate name '" + name + "' is ambiguous");
        continue;
      }
      cols.push_back({name, &m, j});
    }
  };
  add(data.x_names, data.X);
  add(data.w_names, data.W);

  std::string out = selection_col + "," + response_col;
  for (const auto& c : cols) out += "," + c.name;
  out += "\n";
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out += data.d[i] == 1 ? "1," : "0,";
    if (data.d[i] == 1) out += format_double(data.y[i]);
    for (const auto& c : cols) {
      out += ",";
      out += format_double((*c.m)(i, c.j));
    }
    out += "\n";
  }
  return out;
}

void write_dataset(const std::filesystem::path& path, const Dataset& data, const std::string& response_col,
                   const std::string& selection_col) {
  write_file(path, dataset_to_csv(data, response_col, selection_col));
}

// ---------------------------------------------------------------- sim config

SimConfig parse_sim_config(const std::string& yaml_text) {
  const YAML::Node root = load_yaml_map(yaml_text, "simulation config");
  ModelSpec fam;  // reuses family/link/kappa handling
  SimConfig c;
  std::string mechanism = "probit-linear";
  bool have_beta = false, have_gamma = false;
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    if (key == "n") {
      const long n = yaml_as<long>(v, key);
      if (n < 0) throw SchemaError("n must be nonnegative", 0, key);
      c.n = n;
    } else if (key == "seed") c.seed = yaml_as<std::uint64_t>(v, key);
    else if (key == "family") fam.family = yaml_as<std::string>(v, key);
    else if (key == "link") fam.link = yaml_as<std::string>(v, key);
    else if (key == "kappa") fam.kappa = yaml_as<double>(v, key);
    else if (key == "mechanism") mechanism = yaml_as<std::string>(v, key);
    else if (key == "alpha") c.alpha_true = yaml_as<double>(v, key);
    else if (key == "psi") c.psi_true = yaml_as<double>(v, key);
    else if (key == "beta") { c.beta_true = to_vector(yaml_doubles(v, key)); have_beta = true; }
    else if (key == "gamma") { c.gamma_true = to_vector(yaml_doubles(v, key)); have_gamma = true; }
    else if (key == "threads") c.threads = yaml_as<unsigned>(v, key);
    else throw SchemaError("unknown simulation config key '" + key + "'", 0, key);
  }
  if (!have_beta || !have_gamma) throw SchemaError("simulation config needs beta and gamma");
  c.family = fam.make_family();
  try {
    c.mechanism = SelectionMechanism::from_key(mechanism);
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  return c;
}

SimConfig load_sim_config(const std::filesystem::path& path) { return parse_sim_config(read_file(path)); }

ModelSpec model_spec_for(const SimConfig& config) {
  ModelSpec s;
  s.family = config.family.name();
  s.link = std::string(to_string(config.family.link()));
  if (config.family.kind() == FamilyKind::NegativeBinomial) s.kappa = config.family.kappa();
  s.mechanism = config.mechanism.key();
  s.response_col = "y";
  s.selection_col = "d";
  for (Eigen::Index j = 1; j < config.beta_true.size(); ++j) s.x_cols.push_back("x" + std::to_string(j));
  for (Eigen::Index j = 1; j < config.gamma_true.size(); ++j) s.w_cols.push_back("w" + std::to_string(j));
  return s;
}

// ---------------------------------------------------------------- files

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw std::runtime_error("error while writing '" + path.string() + "'");
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

// ---------------------------------------------------------------- reports

std::string report_to_json(const FitReport& r, const ModelSpec& spec, const Dataset& data, const Provenance& prov,
                           const std::vector<std::string>& load_warnings) {
  const Eigen::Index p = data.p();
  const Eigen::Index q = data.q();
  json doc;
  doc["provenance"] = {{"version", prov.version},
                       {"spec_sha256", prov.spec_sha256},
                       {"data_sha256", prov.data_sha256},
                       {"seed", prov.seed ? json(*prov.seed) : json(nullptr)}};
  doc["model"] = {{"family", spec.family},
                  {"link", std::string(to_string(spec.make_family().link()))},
                  {"mechanism", spec.mechanism},
                  {"kappa", spec.kappa ? json(*spec.kappa) : json(nullptr)},
                  {"n", data.n()},
                  {"n_selected", data.n_selected()}};
  doc["alpha"] = {{"estimate", number(r.alpha_hat)},
                  {"boundary", to_string(r.boundary)},
                  {"ci",
                   {{"level", r.alpha_ci.level},
                    {"quantile", r.alpha_ci.quantile},
                    {"lower", bound_json(r.alpha_ci.lower)},
                    {"upper", bound_json(r.alpha_ci.upper)}}}};
  doc["max_loglik"] = number(r.loglik_max);
  doc["response"] = coef_block(data.x_names, r.theta_hat.beta, r.std_err, r.ratio, 0);
  doc["selection"] = coef_block(data.w_names, r.theta_hat.gamma, r.std_err, r.ratio, p);
  if (r.theta_hat.psi) {
    const Eigen::Index k = p + q;
    doc["dispersion"] = {{"estimate", number(*r.theta_hat.psi)},
                         {"std_err", number(r.std_err.size() > k ? r.std_err[k] : kNaN)},
                         {"ratio", number(r.ratio.size() > k ? r.ratio[k] : kNaN)}};
  }
  doc["std_err_available"] = r.std_err_ok;
  doc["min_information_eigenvalue"] = number(r.min_info_eigenvalue);
  doc["baseline"] = {{"response", glm_block(data.x_names, r.baseline.response)},
                     {"selection", glm_block(data.w_names, r.baseline.selection)},
                     {"loglik_response", number(r.baseline.response.loglik)},
                     {"loglik_selection", number(r.baseline.selection.loglik)}};
  json alphas = json::array(), rel = json::array(), ok = json::array();
  for (std::size_t i = 0; i < r.profile.alphas.size(); ++i) {
    alphas.push_back(r.profile.alphas[i]);
    rel.push_back(number(r.profile.rel_loglik[i]));
    ok.push_back(static_cast<bool>(r.profile.ok[i]));
  }
  doc["profile"] = {{"alpha", alphas}, {"rel_loglik", rel}, {"ok", ok}};
  std::vector<std::string> warnings = load_warnings;
  warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
  doc["diagnostics"] = {{"grid_step", r.grid_step},
                        {"dropped_points", r.dropped_points},
                        {"profile_evaluations", r.profile_evaluations},
                        {"tail_warnings", r.tail_warnings},
                        {"warnings", warnings}};
  return doc.dump(2) + "\n";
}

std::string profile_to_csv(const ProfileCurve& curve) {
  std::string out = "alpha,rel_loglik,status\n";
  for (std::size_t i = 0; i < curve.alphas.size(); ++i) {
    out += format_double(curve.alphas[i]);
    out += ",";
    if (curve.ok[i]) out += format_double(curve.rel_loglik[i]);
    out += curve.ok[i] ? ",ok\n" : ",failed\n";
  }
  return out;
}

std::string format_report_table(const FitReport& r, const Dataset& data, const ModelSpec& spec) {
  std::string out;
  auto fmt_num = [](double v) { return std::isfinite(v) ? fmt::format("{:>12.4f}", v) : fmt::format("{:>12}", "-"); };
  auto block = [&](const char* title, const std::vector<std::string>& names, const Eigen::VectorXd& est,
                   Eigen::Index offset) {
    out += fmt::format("{} model\n{:<20}{:>12}{:>12}{:>12}\n", title, "", "estimate", "std.err", "ratio");
    for (std::size_t j = 0; j < names.size(); ++j) {
      const auto k = offset + static_cast<Eigen::Index>(j);
      out += fmt::format("{:<20}{}{}{}\n", names[j], fmt_num(est[static_cast<Eigen::Index>(j)]),
                         fmt_num(r.std_err.size() > k ? r.std_err[k] : kNaN),
                         fmt_num(r.ratio.size() > k ? r.ratio[k] : kNaN));
    }
    out += "\n";
  };
  out += fmt::format("family {} ({}), mechanism {}, n = {}, selected = {}\n\n", spec.family,
                     to_string(spec.make_family().link()), spec.mechanism, data.n(), data.n_selected());
  block("Response", data.x_names, r.theta_hat.beta, 0);
  block("Selection", data.w_names, r.theta_hat.gamma, data.p());
  if (r.theta_hat.psi) {
    const Eigen::Index k = data.p() + data.q();
    out += fmt::format("{:<20}{}{}{}\n\n", "psi", fmt_num(*r.theta_hat.psi),
                       fmt_num(r.std_err.size() > k ? r.std_err[k] : kNaN), fmt_num(r.ratio.size() > k ? r.ratio[k] : kNaN));
  }
  auto bound = [](const CiBound& b) {
    return b.kind == BoundKind::Finite || b.kind == BoundKind::AtConstraint ? fmt::format("{:.4f}", b.value)
                                                                            : to_string(b.kind);
  };
  out += fmt::format("alpha-hat = {:.4f} ({})\n", r.alpha_hat, to_string(r.boundary));
  out += fmt::format("{:g}% confidence interval for alpha: ({}, {})\n", 100.0 * r.alpha_ci.level,
                     bound(r.alpha_ci.lower), bound(r.alpha_ci.upper));
  out += fmt::format("maximized log L = {:.2f}\n", r.loglik_max);
  if (!r.std_err_ok) out += "standard errors withheld: observed information not positive definite\n";
  for (const auto& w : r.warnings) out += "warning: " + w + "\n";
  return out;
}

}  // namespace selmod
