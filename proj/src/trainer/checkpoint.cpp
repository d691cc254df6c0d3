#include "zoac/trainer/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "json.hpp"

namespace zoac {

namespace {

constexpr char kMagic[8] = {'Z', 'O', 'A', 'C', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void array(const Vec& v) {
    u64(static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) u64(std::bit_cast<std::uint64_t>(v[i]));
  }
  std::vector<std::uint8_t>& data() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  void need(std::uint64_t n) const {
    if (n > size_ - pos_) throw CheckpointError("corrupt checkpoint: truncated payload");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  std::string str(std::uint64_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
    pos_ += n;
    return s;
  }
  Vec array() {
    const std::uint64_t n = u64();
    if (n > (size_ - pos_) / 8) throw CheckpointError("corrupt checkpoint: bad array length");
    Vec v(static_cast<Eigen::Index>(n));
    for (std::uint64_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = std::bit_cast<double>(u64());
    return v;
  }
  std::size_t pos() const { return pos_; }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::uint8_t> encode_checkpoint(const TrainerState& s) {
  nlohmann::json header;
  header["schema_version"] = kCheckpointSchemaVersion;
  // Where and how fast a run executes is not part of its state.
  auto config = config_to_map(s.config);
  config.erase("out_dir");
  config.erase("threads");
  header["config"] = config;
  header["policy"] = {{"kind", to_string(s.config.policy.kind)},
                      {"obs_dim", s.config.policy.obs_dim},
                      {"act_dim", s.config.policy.act_dim},
                      {"param_count", s.theta.size()}};
  header["iteration"] = s.iteration;
  header["env_steps"] = s.env_steps;
  header["actor_adam_t"] = s.actor_adam.t;
  header["critic_adam_t"] = s.critic_adam.t;
  header["normalizer_count"] = s.obs_stat.count();
  nlohmann::json workers = nlohmann::json::array();
  for (const auto& w : s.workers) {
    workers.push_back({{"stream_counter", w.stream_counter}, {"needs_reset", w.needs_reset}});
  }
  header["workers"] = workers;
  const std::string text = header.dump();

  Writer out;
  out.bytes(kMagic, sizeof(kMagic));
  out.u32(kCheckpointSchemaVersion);
  out.u64(text.size());
  out.bytes(text.data(), text.size());
  out.u64(8 + 2 * s.workers.size());
  out.array(s.theta);
  out.array(s.actor_adam.m);
  out.array(s.actor_adam.v);
  out.array(s.critic_params);
  out.array(s.critic_adam.m);
  out.array(s.critic_adam.v);
  out.array(s.obs_stat.mean());
  out.array(s.obs_stat.m2());
  for (const auto& w : s.workers) {
    out.array(w.env_state);
    out.array(w.raw_obs);
  }
  out.u64(fnv1a64(out.data().data(), out.data().size()));
  return std::move(out.data());
}

TrainerState decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < sizeof(kMagic) + 4 + 8 ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("not a checkpoint file");
  }
  Reader in(bytes.data() + sizeof(kMagic), bytes.size() - sizeof(kMagic));
  const std::uint32_t version = in.u32();
  if (version != kCheckpointSchemaVersion) {
    throw CheckpointError("checkpoint schema version " + std::to_string(version) +
                          " is not supported (expected " +
                          std::to_string(kCheckpointSchemaVersion) + ")");
  }
  if (bytes.size() < sizeof(kMagic) + 4 + 8 + 8) throw CheckpointError("corrupt checkpoint: truncated");
  const std::size_t body = bytes.size() - 8;
  std::uint64_t stored = 0;
  for (int i = 0; i < 8; ++i) stored |= static_cast<std::uint64_t>(bytes[body + i]) << (8 * i);
  // Length fields are validated before the checksum so a damaged length is
  // reported as such.
  Reader frame(bytes.data() + sizeof(kMagic), body - sizeof(kMagic));
  frame.u32();
  const std::uint64_t header_len = frame.u64();
  const std::string text = frame.str(header_len);
  const std::uint64_t count = frame.u64();
  std::vector<Vec> arrays;
  for (std::uint64_t i = 0; i < count; ++i) arrays.push_back(frame.array());
  if (sizeof(kMagic) + frame.pos() != body) {
    throw CheckpointError("corrupt checkpoint: payload length mismatch");
  }
  if (fnv1a64(bytes.data(), body) != stored) throw CheckpointError("corrupt checkpoint: checksum mismatch");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint header: ") + e.what());
  }

  TrainerState s;
  try {
    const std::string kind = header.at("policy").at("kind").get<std::string>();
    try {
      parse_policy_kind(kind);
    } catch (const std::invalid_argument&) {
      throw CheckpointError("checkpoint has unknown policy kind: " + kind);
    }
    s.config = config_from_map(header.at("config").get<std::map<std::string, std::string>>());
    s.config.finalize();
    s.iteration = header.at("iteration").get<std::uint64_t>();
    s.env_steps = header.at("env_steps").get<std::uint64_t>();
    const auto& workers = header.at("workers");
    if (count != 8 + 2 * workers.size()) throw CheckpointError("corrupt checkpoint: array count");
    s.theta = arrays[0];
    if (static_cast<std::size_t>(s.theta.size()) != s.config.policy.param_count() ||
        header.at("policy").at("param_count").get<std::size_t>() != s.config.policy.param_count()) {
      throw CheckpointError("checkpoint parameter count does not match its policy spec");
    }
    s.actor_adam = AdamState::zeros(0, s.config.actor_lr);
    s.actor_adam.m = arrays[1];
    s.actor_adam.v = arrays[2];
    s.actor_adam.t = header.at("actor_adam_t").get<std::int64_t>();
    s.critic_params = arrays[3];
    s.critic_adam = AdamState::zeros(0, s.config.critic_lr);
    s.critic_adam.m = arrays[4];
    s.critic_adam.v = arrays[5];
    s.critic_adam.t = header.at("critic_adam_t").get<std::int64_t>();
    s.obs_stat = RunningStat(header.at("normalizer_count").get<std::int64_t>(), arrays[6], arrays[7]);
    for (std::size_t i = 0; i < workers.size(); ++i) {
      Sampler::WorkerState w;
      w.stream_counter = workers[i].at("stream_counter").get<std::uint64_t>();
      w.needs_reset = workers[i].at("needs_reset").get<bool>();
      w.env_state = arrays[8 + 2 * i];
      w.raw_obs = arrays[9 + 2 * i];
      s.workers.push_back(std::move(w));
    }
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint header: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("invalid checkpoint config: ") + e.what());
  }
  return s;
}

void save_checkpoint(const TrainerState& state, const std::string& path) {
  const auto bytes = encode_checkpoint(state);
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  // Write-then-rename so an interrupted save never leaves a torn file.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError("cannot write checkpoint " + path);
  }
  std::filesystem::rename(tmp, path);
}

TrainerState load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

std::string checkpoint_path(const std::string& out_dir, std::uint64_t iteration) {
  char name[32];
  std::snprintf(name, sizeof(name), "ckpt_%06llu.bin", static_cast<unsigned long long>(iteration));
  return (std::filesystem::path(out_dir) / "checkpoints" / name).string();
}

}  // namespace zoac
