#ifndef ZOAC_TRAINER_METRICS_HPP_
#define ZOAC_TRAINER_METRICS_HPP_

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace zoac {

// One line of metrics.jsonl. Every key is always written; fields that do not
// apply to an iteration are null.
//
//   iteration                 iterations completed (1-based)
//   algo                      "zoac" | "es"
//   env_steps                 cumulative environment steps
//   grad_norm                 L2 norm of the ascent direction
//   adv_mean/std/min/max      raw per-direction advantages (ES: returns)
//   critic_loss               mean 0.5 (V - G)^2 of the last critic epoch
//   phi                       max |V| over the batch states
//   mask_usage, beta          masked policies only
//   eval_mean_return          mean undiscounted evaluation return
//   eval_returns              per-episode undiscounted returns
//   eval_discounted_returns   per-episode discounted returns
//   value_gap                 mean V_w(s) - reward-to-go on evaluation states
//   wall_time                 seconds since the run (or resume) started
struct MetricsRecord {
  std::uint64_t iteration = 0;
  std::string algo;
  std::uint64_t env_steps = 0;
  double grad_norm = 0.0;
  double adv_mean = 0.0;
  double adv_std = 0.0;
  double adv_min = 0.0;
  double adv_max = 0.0;
  std::optional<double> critic_loss;
  std::optional<double> phi;
  std::optional<double> mask_usage;
  std::optional<double> beta;
  std::optional<double> eval_mean_return;
  std::vector<double> eval_returns;
  std::vector<double> eval_discounted_returns;
  std::optional<double> value_gap;
  std::optional<double> wall_time;

  nlohmann::ordered_json to_json() const;
  static MetricsRecord from_json(const nlohmann::json& j);
};

// Column order of the CSV export.
const std::vector<std::string>& metrics_columns();

class MetricsWriter {
 public:
  // Appends to `path`; with truncate_from = k, lines with iteration >= k are
  // dropped first (resume from the checkpoint taken after k - 1 iterations).
  MetricsWriter(const std::string& path, std::optional<std::uint64_t> truncate_from);
  void write(const MetricsRecord& record);

 private:
  std::ofstream out_;
};

std::vector<MetricsRecord> read_metrics(const std::string& path);
// Scalar columns only; list columns are written as ';'-joined values.
void export_metrics_csv(const std::string& jsonl_path, const std::string& csv_path);

}  // namespace zoac

#endif  // ZOAC_TRAINER_METRICS_HPP_
