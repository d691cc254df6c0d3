#include "zoac/trainer/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace zoac {

Algo parse_algo(const std::string& s) {
  if (s == "zoac") return Algo::zoac;
  if (s == "es") return Algo::es;
  throw std::invalid_argument("unknown algo: " + s);
}

std::string to_string(Algo a) { return a == Algo::zoac ? "zoac" : "es"; }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s) {
  const std::string t = trim(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != t.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

long long parse_int(const std::string& s) {
  const std::string t = trim(s);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw std::invalid_argument("not an integer: '" + s + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  const std::string t = trim(s);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw std::invalid_argument("not an unsigned integer: '" + s + "'");
  }
  return v;
}

bool parse_bool(const std::string& s) {
  const std::string t = trim(s);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw std::invalid_argument("not a boolean: '" + s + "'");
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::string token;
  std::istringstream in(s);
  while (std::getline(in, token, ',')) {
    std::istringstream words(token);
    std::string w;
    while (words >> w) out.push_back(parse_double(w));
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_list(s)) {
    if (v != std::floor(v)) throw std::invalid_argument("not an integer list: '" + s + "'");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// Rows separated by ';', entries by spaces or commas.
Mat parse_matrix(const std::string& s) {
  std::vector<std::vector<double>> rows;
  std::string row;
  std::istringstream in(s);
  while (std::getline(in, row, ';')) {
    if (trim(row).empty()) continue;
    rows.push_back(parse_list(row));
  }
  if (rows.empty()) throw std::invalid_argument("empty matrix");
  Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) throw std::invalid_argument("ragged matrix: " + s);
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

std::string fmt_double(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

template <typename T>
std::string fmt_list(const T& values) {
  std::string out;
  for (auto v : values) {
    if (!out.empty()) out += ", ";
    if constexpr (std::is_integral_v<std::decay_t<decltype(v)>>) {
      out += std::to_string(v);
    } else {
      out += fmt_double(v);
    }
  }
  return out;
}

std::string fmt_matrix(const Mat& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r > 0) out += "; ";
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out += " ";
      out += fmt_double(m(r, c));
    }
  }
  return out;
}

int to_int(const std::string& s) { return static_cast<int>(parse_int(s)); }

std::vector<ConfigField> build_fields() {
  using C = TrainerConfig;
  std::vector<ConfigField> f;
  auto add = [&f](std::string section, std::string key, std::string help, auto set, auto get) {
    f.push_back({std::move(section), std::move(key), std::move(help), set, get});
  };

  add("run", "algo", "zoac | es", [](C& c, const std::string& v) { c.algo = parse_algo(trim(v)); },
      [](const C& c) { return to_string(c.algo); });
  add("run", "seed", "master seed", [](C& c, const std::string& v) { c.seed = parse_u64(v); },
      [](const C& c) { return std::to_string(c.seed); });
  add("run", "iterations", "number of iterations",
      [](C& c, const std::string& v) { c.iterations = to_int(v); },
      [](const C& c) { return std::to_string(c.iterations); });
  add("run", "eval_interval", "evaluate every k iterations (0: final only)",
      [](C& c, const std::string& v) { c.eval_interval = to_int(v); },
      [](const C& c) { return std::to_string(c.eval_interval); });
  add("run", "eval_episodes", "noise-free evaluation episodes",
      [](C& c, const std::string& v) { c.eval_episodes = to_int(v); },
      [](const C& c) { return std::to_string(c.eval_episodes); });
  add("run", "checkpoint_interval", "checkpoint every k iterations (0: first and last)",
      [](C& c, const std::string& v) { c.checkpoint_interval = to_int(v); },
      [](const C& c) { return std::to_string(c.checkpoint_interval); });
  add("run", "threads", "rollout worker threads",
      [](C& c, const std::string& v) { c.threads = to_int(v); },
      [](const C& c) { return std::to_string(c.threads); });
  add("run", "out_dir", "output directory", [](C& c, const std::string& v) { c.out_dir = trim(v); },
      [](const C& c) { return c.out_dir; });
  add("run", "record_wall_time", "write wall_time into metrics",
      [](C& c, const std::string& v) { c.record_wall_time = parse_bool(v); },
      [](const C& c) { return fmt_bool(c.record_wall_time); });

  add("env", "env", "mountain_car | lqr | quadratic_bandit",
      [](C& c, const std::string& v) { c.env.kind = parse_env_kind(trim(v)); },
      [](const C& c) { return to_string(c.env.kind); });
  add("env", "max_steps", "mountain car episode cap",
      [](C& c, const std::string& v) { c.env.max_steps = to_int(v); },
      [](const C& c) { return std::to_string(c.env.max_steps); });
  add("env", "action_penalty", "mountain car per-step penalty coefficient on a^2",
      [](C& c, const std::string& v) { c.env.action_penalty = parse_double(v); },
      [](const C& c) { return fmt_double(c.env.action_penalty); });
  add("env", "lqr_a", "LQR A matrix (rows separated by ';')",
      [](C& c, const std::string& v) { c.env.lqr.A = parse_matrix(v); },
      [](const C& c) { return fmt_matrix(c.env.lqr.A); });
  add("env", "lqr_b", "LQR B matrix", [](C& c, const std::string& v) { c.env.lqr.B = parse_matrix(v); },
      [](const C& c) { return fmt_matrix(c.env.lqr.B); });
  add("env", "lqr_q", "LQR state cost", [](C& c, const std::string& v) { c.env.lqr.Q = parse_matrix(v); },
      [](const C& c) { return fmt_matrix(c.env.lqr.Q); });
  add("env", "lqr_r", "LQR action cost", [](C& c, const std::string& v) { c.env.lqr.R = parse_matrix(v); },
      [](const C& c) { return fmt_matrix(c.env.lqr.R); });
  add("env", "lqr_horizon", "LQR episode length",
      [](C& c, const std::string& v) { c.env.lqr.horizon = to_int(v); },
      [](const C& c) { return std::to_string(c.env.lqr.horizon); });
  add("env", "lqr_init_mean", "LQR reset mean",
      [](C& c, const std::string& v) {
        const auto xs = parse_list(v);
        c.env.lqr.init_mean = Eigen::Map<const Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
      },
      [](const C& c) { return fmt_list(c.env.lqr.init_mean); });
  add("env", "lqr_init_std", "LQR reset standard deviation",
      [](C& c, const std::string& v) { c.env.lqr.init_std = parse_double(v); },
      [](const C& c) { return fmt_double(c.env.lqr.init_std); });
  add("env", "lqr_state_clip", "LQR state box half-width",
      [](C& c, const std::string& v) { c.env.lqr.state_clip = parse_double(v); },
      [](const C& c) { return fmt_double(c.env.lqr.state_clip); });
  add("env", "lqr_action_clip", "LQR action box half-width",
      [](C& c, const std::string& v) { c.env.lqr.action_clip = parse_double(v); },
      [](const C& c) { return fmt_double(c.env.lqr.action_clip); });
  add("env", "bandit_horizon", "quadratic bandit episode length",
      [](C& c, const std::string& v) { c.env.bandit_horizon = to_int(v); },
      [](const C& c) { return std::to_string(c.env.bandit_horizon); });
  add("env", "bandit_action_bound", "quadratic bandit action clip",
      [](C& c, const std::string& v) { c.env.bandit_action_bound = parse_double(v); },
      [](const C& c) { return fmt_double(c.env.bandit_action_bound); });

  add("policy", "policy", "linear | mlp | toeplitz | masked",
      [](C& c, const std::string& v) { c.policy.kind = parse_policy_kind(trim(v)); },
      [](const C& c) { return to_string(c.policy.kind); });
  add("policy", "hidden", "hidden widths, e.g. 64, 64",
      [](C& c, const std::string& v) { c.policy.hidden = parse_int_list(v); },
      [](const C& c) { return fmt_list(c.policy.hidden); });
  add("policy", "layer_norm", "layer norm on hidden layers",
      [](C& c, const std::string& v) { c.policy.layer_norm = parse_bool(v); },
      [](const C& c) { return fmt_bool(c.policy.layer_norm); });
  add("policy", "output", "tanh | identity",
      [](C& c, const std::string& v) { c.policy.output = parse_output_squash(trim(v)); },
      [](const C& c) { return to_string(c.policy.output); });
  add("policy", "action_bound", "scale of the tanh output",
      [](C& c, const std::string& v) { c.policy.action_bound = parse_double(v); },
      [](const C& c) { return fmt_double(c.policy.action_bound); });
  add("policy", "mask_temperature", "masked-network softmax temperature",
      [](C& c, const std::string& v) { c.policy.mask_temperature = parse_double(v); },
      [](const C& c) { return fmt_double(c.policy.mask_temperature); });

  add("sampler", "workers", "parallel rollout workers n",
      [](C& c, const std::string& v) { c.workers = to_int(v); },
      [](const C& c) { return std::to_string(c.workers); });
  add("sampler", "rollout_length", "steps per perturbation N",
      [](C& c, const std::string& v) { c.rollout_length = to_int(v); },
      [](const C& c) { return std::to_string(c.rollout_length); });
  add("sampler", "train_frequency", "segments per worker per iteration H",
      [](C& c, const std::string& v) { c.train_frequency = to_int(v); },
      [](const C& c) { return std::to_string(c.train_frequency); });
  add("sampler", "sigma", "parameter noise standard deviation",
      [](C& c, const std::string& v) { c.sigma = parse_double(v); },
      [](const C& c) { return fmt_double(c.sigma); });
  add("sampler", "table_size", "shared noise table entries",
      [](C& c, const std::string& v) { c.table_size = static_cast<std::size_t>(parse_u64(v)); },
      [](const C& c) { return std::to_string(c.table_size); });
  add("sampler", "noise_seed", "seed of the shared noise table",
      [](C& c, const std::string& v) { c.noise_seed = parse_u64(v); },
      [](const C& c) { return std::to_string(c.noise_seed); });

  add("critic", "critic", "mlp | none (none: V = 0, no policy evaluation)",
      [](C& c, const std::string& v) {
        const std::string t = trim(v);
        if (t == "mlp") {
          c.critic = CriticKind::mlp;
        } else if (t == "none") {
          c.critic = CriticKind::none;
        } else {
          throw std::invalid_argument("unknown critic kind: " + t);
        }
      },
      [](const C& c) { return std::string(c.critic == CriticKind::mlp ? "mlp" : "none"); });
  add("critic", "critic_hidden", "critic hidden widths",
      [](C& c, const std::string& v) { c.critic_hidden = parse_int_list(v); },
      [](const C& c) { return fmt_list(c.critic_hidden); });
  add("critic", "critic_lr", "critic Adam learning rate",
      [](C& c, const std::string& v) { c.critic_lr = parse_double(v); },
      [](const C& c) { return fmt_double(c.critic_lr); });
  add("critic", "batch_size", "critic minibatch size L",
      [](C& c, const std::string& v) { c.batch_size = to_int(v); },
      [](const C& c) { return std::to_string(c.batch_size); });
  add("critic", "epochs", "critic epochs per iteration M",
      [](C& c, const std::string& v) { c.epochs = to_int(v); },
      [](const C& c) { return std::to_string(c.epochs); });
  add("critic", "gamma", "discount factor", [](C& c, const std::string& v) { c.gamma = parse_double(v); },
      [](const C& c) { return fmt_double(c.gamma); });
  add("critic", "lambda", "GAE coefficient", [](C& c, const std::string& v) { c.lambda = parse_double(v); },
      [](const C& c) { return fmt_double(c.lambda); });

  add("actor", "actor_lr", "actor Adam learning rate",
      [](C& c, const std::string& v) { c.actor_lr = parse_double(v); },
      [](const C& c) { return fmt_double(c.actor_lr); });
  add("actor", "sift", "keep the b best directions (0: all)",
      [](C& c, const std::string& v) { c.sift = to_int(v); },
      [](const C& c) { return std::to_string(c.sift); });
  add("actor", "beta_start", "masked-network advantage weight at iteration 0",
      [](C& c, const std::string& v) { c.beta_start = parse_double(v); },
      [](const C& c) { return fmt_double(c.beta_start); });
  add("actor", "beta_end", "masked-network advantage weight at the last iteration",
      [](C& c, const std::string& v) { c.beta_end = parse_double(v); },
      [](const C& c) { return fmt_double(c.beta_end); });
  add("actor", "normalize_advantages", "standardize advantages per iteration",
      [](C& c, const std::string& v) { c.normalize_advantages = parse_bool(v); },
      [](const C& c) { return fmt_bool(c.normalize_advantages); });
  add("actor", "obs_norm", "running observation normalization",
      [](C& c, const std::string& v) { c.obs_norm = parse_bool(v); },
      [](const C& c) { return fmt_bool(c.obs_norm); });

  add("es", "es_shaped", "centered-rank fitness shaping for ES",
      [](C& c, const std::string& v) { c.es_shaped = parse_bool(v); },
      [](const C& c) { return fmt_bool(c.es_shaped); });
  return f;
}

const ConfigField* find_field(const std::string& key) {
  for (const auto& f : config_fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

TrainerConfig from_ptree(const boost::property_tree::ptree& tree) {
  TrainerConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw std::invalid_argument("config: key '" + section + "' outside a section");
    }
    for (const auto& [key, value] : body) {
      const ConfigField* f = find_field(key);
      if (f == nullptr || f->section != section) {
        throw std::invalid_argument("config: unknown key [" + section + "] " + key);
      }
      apply_config_value(cfg, key, value.data());
    }
  }
  return cfg;
}

}  // namespace

const std::vector<ConfigField>& config_fields() {
  static const std::vector<ConfigField> fields = build_fields();
  return fields;
}

void apply_config_value(TrainerConfig& cfg, const std::string& key, const std::string& value) {
  const ConfigField* f = find_field(key);
  if (f == nullptr) throw std::invalid_argument("config: unknown key " + key);
  try {
    f->set(cfg, value);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("config: " + key + ": " + e.what());
  }
}

TrainerConfig load_config_file(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return from_ptree(tree);
}

TrainerConfig parse_config_string(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return from_ptree(tree);
}

std::map<std::string, std::string> config_to_map(const TrainerConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const auto& f : config_fields()) out[f.key] = f.get(cfg);
  return out;
}

TrainerConfig config_from_map(const std::map<std::string, std::string>& values) {
  TrainerConfig cfg;
  for (const auto& [k, v] : values) apply_config_value(cfg, k, v);
  return cfg;
}

std::string config_to_ini(const TrainerConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& f : config_fields()) {
    if (f.section != section) {
      section = f.section;
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
    }
    out += f.key + " = " + f.get(cfg) + "\n";
  }
  return out;
}

void TrainerConfig::finalize() {
  auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
  if (iterations < 0) fail("iterations must be >= 0");
  if (eval_interval < 0) fail("eval_interval must be >= 0");
  if (eval_episodes < 1) fail("eval_episodes must be >= 1");
  if (checkpoint_interval < 0) fail("checkpoint_interval must be >= 0");
  if (threads < 1) fail("threads must be >= 1");
  if (workers < 1) fail("workers must be >= 1");
  if (rollout_length < 1) fail("rollout_length must be >= 1");
  if (train_frequency < 1) fail("train_frequency must be >= 1");
  if (!(sigma > 0.0)) fail("sigma must be > 0");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (epochs < 0) fail("epochs must be >= 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) fail("gamma must lie in (0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail("lambda must lie in [0, 1]");
  if (!(actor_lr > 0.0)) fail("actor_lr must be > 0");
  if (!(critic_lr > 0.0)) fail("critic_lr must be > 0");
  if (sift < 0 || sift > workers * train_frequency) fail("sift must lie in [0, n*H]");
  if (beta_start < 0.0 || beta_start > 1.0 || beta_end < 0.0 || beta_end > 1.0) {
    fail("beta_start/beta_end must lie in [0, 1]");
  }
  for (int h : critic_hidden) {
    if (h < 1) fail("critic_hidden widths must be >= 1");
  }
  env.lqr.gamma = gamma;
  const auto probe = make_env(env);
  policy.obs_dim = probe->obs_dim();
  policy.act_dim = probe->act_dim();
  policy.validate();
  if (table_size < policy.param_count()) fail("table_size is smaller than the parameter count");
}

}  // namespace zoac
