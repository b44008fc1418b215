#pragma once

// Persistence: PcaModel <-> JSON document, and the plain-text key = value
// scenario config read by the simulate subcommand.
//
// Model document layout (all numbers are IEEE doubles, serialized
// shortest-round-trip so reload is bit-exact):
//   {
//     "kind": "winsor",            radial kind name
//     "k": 3,                      retained rank
//     "p": 4,                      ambient dimension
//     "center": [ ... p ... ],
//     "loadings": [ ... p*k, column-major ... ],
//     "eigenvalues_raw": [ ... k ... ],
//     "eigenvalues_corrected": [ ... k ... ]
//   }

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gspca/gspca.hpp"
#include "gspca/gsscm.hpp"
#include "gspca/simulate.hpp"

namespace gspca {

inline nlohmann::json model_to_json(const PcaModel& model) {
  nlohmann::json j;
  j["kind"] = radial_kind_name(model.kind);
  j["k"] = model.k;
  j["p"] = int(model.center.size());
  j["center"] = std::vector<double>(model.center.data(),
                                    model.center.data() + model.center.size());
  j["loadings"] = std::vector<double>(model.loadings.data(),
                                      model.loadings.data() + model.loadings.size());
  j["eigenvalues_raw"] = std::vector<double>(
      model.eigenvalues_raw.data(),
      model.eigenvalues_raw.data() + model.eigenvalues_raw.size());
  j["eigenvalues_corrected"] = std::vector<double>(
      model.eigenvalues_corrected.data(),
      model.eigenvalues_corrected.data() + model.eigenvalues_corrected.size());
  return j;
}

inline PcaModel model_from_json(const nlohmann::json& j) {
  PcaModel model;
  model.kind = parse_radial_kind(j.at("kind").get<std::string>());
  model.k = j.at("k").get<int>();
  const int p = j.at("p").get<int>();
  if (model.k < 1 || p < 1 || model.k > p)
    throw std::invalid_argument("model document: invalid k or p");
  const auto center = j.at("center").get<std::vector<double>>();
  const auto loadings = j.at("loadings").get<std::vector<double>>();
  const auto raw = j.at("eigenvalues_raw").get<std::vector<double>>();
  const auto corrected = j.at("eigenvalues_corrected").get<std::vector<double>>();
  if (int(center.size()) != p || int(loadings.size()) != p * model.k ||
      int(raw.size()) != model.k || int(corrected.size()) != model.k)
    throw std::invalid_argument("model document: field lengths inconsistent with k and p");
  model.center = Eigen::Map<const Eigen::VectorXd>(center.data(), p);
  model.loadings = Eigen::Map<const Eigen::MatrixXd>(loadings.data(), p, model.k);
  model.eigenvalues_raw = Eigen::Map<const Eigen::VectorXd>(raw.data(), model.k);
  model.eigenvalues_corrected =
      Eigen::Map<const Eigen::VectorXd>(corrected.data(), model.k);
  return model;
}

inline void save_model(const PcaModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << model_to_json(model).dump(2) << '\n';
}

inline PcaModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  return model_from_json(j);
}

// Scenario config: one `key = value` pair per line, `#` starts a comment.
// Recognized keys:
//   family   = gaussian | student_t
//   nu       = 1 | 2 | 3 | 5            (student_t only)
//   n, p, k, reps                        integers
//   sigma    = lowdim | highdim | comma-separated positive reals (p entries)
//   epsilon  = real or comma list        cells are the cross product
//   f1       = real or comma list        of the epsilon and f1 lists
//   f2       = real
//   shift_axis = integer (default k+1)
//   seed     = unsigned integer
//   methods  = comma list of cpca | identity | sscm | winsor | quad | ball | shell | lr
struct ScenarioConfig {
  ScenarioSpec base;
  std::vector<double> epsilon_list{0.0};
  std::vector<double> f1_list{0.0};
  std::vector<std::string> methods;
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

inline double config_number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: cannot parse number for '" + key +
                                "': '" + value + "'");
  }
}

}  // namespace detail

inline ScenarioConfig parse_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  ScenarioConfig cfg;
  bool sigma_seen = false, p_seen = false;
  std::string sigma_value;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty())
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty value for '" + key + "'");
    if (key == "family") {
      if (value == "gaussian") cfg.base.family = Family::Gaussian;
      else if (value == "student_t") cfg.base.family = Family::StudentT;
      else throw std::invalid_argument("config: unknown family '" + value + "'");
    } else if (key == "nu") {
      cfg.base.nu = detail::config_number(key, value);
    } else if (key == "n") {
      cfg.base.n = int(detail::config_number(key, value));
    } else if (key == "p") {
      cfg.base.p = int(detail::config_number(key, value));
      p_seen = true;
    } else if (key == "k") {
      cfg.base.k = int(detail::config_number(key, value));
    } else if (key == "reps") {
      cfg.base.reps = int(detail::config_number(key, value));
    } else if (key == "seed") {
      cfg.base.seed = std::uint64_t(detail::config_number(key, value));
    } else if (key == "f2") {
      cfg.base.f2 = detail::config_number(key, value);
    } else if (key == "shift_axis") {
      cfg.base.shift_axis = int(detail::config_number(key, value));
    } else if (key == "sigma") {
      sigma_seen = true;
      sigma_value = value;
    } else if (key == "epsilon") {
      cfg.epsilon_list.clear();
      for (const auto& item : detail::split_list(value))
        cfg.epsilon_list.push_back(detail::config_number(key, item));
    } else if (key == "f1") {
      cfg.f1_list.clear();
      for (const auto& item : detail::split_list(value))
        cfg.f1_list.push_back(detail::config_number(key, item));
    } else if (key == "methods") {
      cfg.methods = detail::split_list(value);
    } else {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
    }
  }
  if (!sigma_seen) throw std::invalid_argument("config: missing 'sigma'");
  if (cfg.methods.empty()) throw std::invalid_argument("config: missing 'methods'");
  if (sigma_value == "lowdim") {
    cfg.base.sigma_diag = lowdim_sigma();
  } else if (sigma_value == "highdim") {
    cfg.base.sigma_diag = highdim_sigma();
  } else {
    const auto items = detail::split_list(sigma_value);
    cfg.base.sigma_diag.resize(Eigen::Index(items.size()));
    for (std::size_t i = 0; i < items.size(); ++i)
      cfg.base.sigma_diag(Eigen::Index(i)) = detail::config_number("sigma", items[i]);
  }
  if (!p_seen) cfg.base.p = int(cfg.base.sigma_diag.size());
  if (cfg.base.sigma_diag.size() != cfg.base.p)
    throw std::invalid_argument("config: sigma length does not match p");
  // Cell validity (epsilon/f1 substituted per cell) is checked at run time by
  // validate_scenario; validate the fixed fields once here with benign values.
  ScenarioSpec probe = cfg.base;
  probe.epsilon = cfg.epsilon_list.front();
  probe.f1 = cfg.f1_list.front();
  validate_scenario(probe);
  return cfg;
}

}  // namespace gspca
