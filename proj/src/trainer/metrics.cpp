#include "zoac/trainer/metrics.hpp"

#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace zoac {

namespace {

nlohmann::json opt(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> get_opt(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::string csv_cell(const nlohmann::json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (const auto& x : v) {
      if (!out.empty()) out += ";";
      out += csv_cell(x);
    }
    return out;
  }
  if (v.is_number_float()) {
    std::ostringstream s;
    s << std::setprecision(17) << v.get<double>();
    return s.str();
  }
  return v.dump();
}

}  // namespace

nlohmann::ordered_json MetricsRecord::to_json() const {
  nlohmann::ordered_json j;
  j["iteration"] = iteration;
  j["algo"] = algo;
  j["env_steps"] = env_steps;
  j["grad_norm"] = grad_norm;
  j["adv_mean"] = adv_mean;
  j["adv_std"] = adv_std;
  j["adv_min"] = adv_min;
  j["adv_max"] = adv_max;
  j["critic_loss"] = opt(critic_loss);
  j["phi"] = opt(phi);
  j["mask_usage"] = opt(mask_usage);
  j["beta"] = opt(beta);
  j["eval_mean_return"] = opt(eval_mean_return);
  j["eval_returns"] = eval_mean_return ? nlohmann::json(eval_returns) : nlohmann::json(nullptr);
  j["eval_discounted_returns"] =
      eval_mean_return ? nlohmann::json(eval_discounted_returns) : nlohmann::json(nullptr);
  j["value_gap"] = opt(value_gap);
  j["wall_time"] = opt(wall_time);
  return j;
}

MetricsRecord MetricsRecord::from_json(const nlohmann::json& j) {
  MetricsRecord r;
  r.iteration = j.at("iteration").get<std::uint64_t>();
  r.algo = j.at("algo").get<std::string>();
  r.env_steps = j.at("env_steps").get<std::uint64_t>();
  r.grad_norm = j.at("grad_norm").get<double>();
  r.adv_mean = j.at("adv_mean").get<double>();
  r.adv_std = j.at("adv_std").get<double>();
  r.adv_min = j.at("adv_min").get<double>();
  r.adv_max = j.at("adv_max").get<double>();
  r.critic_loss = get_opt(j, "critic_loss");
  r.phi = get_opt(j, "phi");
  r.mask_usage = get_opt(j, "mask_usage");
  r.beta = get_opt(j, "beta");
  r.eval_mean_return = get_opt(j, "eval_mean_return");
  if (j.contains("eval_returns") && !j.at("eval_returns").is_null()) {
    r.eval_returns = j.at("eval_returns").get<std::vector<double>>();
  }
  if (j.contains("eval_discounted_returns") && !j.at("eval_discounted_returns").is_null()) {
    r.eval_discounted_returns = j.at("eval_discounted_returns").get<std::vector<double>>();
  }
  r.value_gap = get_opt(j, "value_gap");
  r.wall_time = get_opt(j, "wall_time");
  return r;
}

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> cols{
      "iteration",   "algo",    "env_steps",  "grad_norm",        "adv_mean",
      "adv_std",     "adv_min", "adv_max",    "critic_loss",      "phi",
      "mask_usage",  "beta",    "eval_mean_return", "eval_returns",
      "eval_discounted_returns", "value_gap", "wall_time"};
  return cols;
}

MetricsWriter::MetricsWriter(const std::string& path,
                             std::optional<std::uint64_t> truncate_from) {
  std::vector<std::string> kept;
  if (truncate_from) {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      if (j.at("iteration").get<std::uint64_t>() < *truncate_from) kept.push_back(line);
    }
    out_.open(path, std::ios::trunc);
    for (const auto& l : kept) out_ << l << '\n';
  } else {
    out_.open(path, std::ios::trunc);
  }
  if (!out_) throw std::runtime_error("cannot open metrics file " + path);
}

void MetricsWriter::write(const MetricsRecord& record) {
  out_ << record.to_json().dump() << '\n';
  out_.flush();
}

std::vector<MetricsRecord> read_metrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics file " + path);
  std::vector<MetricsRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(MetricsRecord::from_json(nlohmann::json::parse(line)));
  }
  return out;
}

void export_metrics_csv(const std::string& jsonl_path, const std::string& csv_path) {
  std::ifstream in(jsonl_path);
  if (!in) throw std::runtime_error("cannot open metrics file " + jsonl_path);
  std::ofstream out(csv_path);
  if (!out) throw std::runtime_error("cannot write " + csv_path);
  const auto& cols = metrics_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out << (i ? "," : "") << (j.contains(cols[i]) ? csv_cell(j.at(cols[i])) : "");
    }
    out << '\n';
  }
}

}  // namespace zoac
