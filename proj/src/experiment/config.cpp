#include "plkg/experiment/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "plkg/error.hpp"

namespace plkg::experiment {

using nlohmann::json;

void ExperimentConfig::resolve() {
  if (!sigma_zeta2) sigma_zeta2 = 1.0 - env.channel.rho * env.channel.rho;
  env.channel.sigma_zeta2 = *sigma_zeta2;
  if (!tau) tau = calibrate_tau(env.channel.n);
  env.channel.tau = *tau;
  predictor.input_scale = std::sqrt(env.pa);
}

std::vector<std::uint64_t> ExperimentConfig::replicate_seeds() const {
  return seeds.empty() ? std::vector<std::uint64_t>{seed} : seeds;
}

namespace {

class Reader {
 public:
  explicit Reader(const json& doc) : doc_(doc) {}

  template <class T>
  void field(const char* key, T& out, std::function<bool(const T&)> ok = {},
             const char* range = "") {
    seen_.push_back(key);
    auto it = doc_.find(key);
    if (it == doc_.end()) return;
    T value{};
    if (!read(*it, value)) {
      errors_.push_back(std::string(key) + ": expected " + type_name<T>());
      return;
    }
    if (ok && !ok(value)) {
      errors_.push_back(std::string(key) + ": out of range, " + range);
      return;
    }
    out = value;
  }

  template <class T>
  void nullable(const char* key, std::optional<T>& out, std::function<bool(const T&)> ok = {},
                const char* range = "") {
    auto it = doc_.find(key);
    if (it != doc_.end() && it->is_null()) {
      seen_.push_back(key);
      out.reset();
      return;
    }
    T value = out.value_or(T{});
    const std::size_t before = errors_.size();
    field<T>(key, value, ok, range);
    if (it != doc_.end() && errors_.size() == before) out = value;
  }

  void reject_unknown() {
    for (auto it = doc_.begin(); it != doc_.end(); ++it) {
      if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end()) {
        errors_.push_back(it.key() + ": unknown key");
      }
    }
  }

  void add_error(std::string msg) { errors_.push_back(std::move(msg)); }
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static bool read(const json& j, double& v) {
    if (!j.is_number()) return false;
    v = j.get<double>();
    return std::isfinite(v);
  }
  static bool read(const json& j, std::size_t& v) {
    if (!j.is_number_unsigned()) return false;
    v = j.get<std::size_t>();
    return true;
  }
  static bool read(const json& j, int& v) {
    if (!j.is_number_integer()) return false;
    v = j.get<int>();
    return true;
  }
  static bool read(const json& j, std::string& v) {
    if (!j.is_string()) return false;
    v = j.get<std::string>();
    return true;
  }
  static bool read(const json& j, std::vector<std::uint64_t>& v) {
    if (!j.is_array()) return false;
    v.clear();
    for (const auto& e : j) {
      if (!e.is_number_unsigned()) return false;
      v.push_back(e.get<std::uint64_t>());
    }
    return true;
  }

  template <class T>
  static const char* type_name() {
    if constexpr (std::is_same_v<T, double>) return "a finite number";
    else if constexpr (std::is_same_v<T, int>) return "an integer";
    else if constexpr (std::is_same_v<T, std::string>) return "a string";
    else if constexpr (std::is_same_v<T, std::vector<std::uint64_t>>) return "an array of non-negative integers";
    else return "a non-negative integer";
  }

  const json& doc_;
  std::vector<std::string> seen_;
  std::vector<std::string> errors_;
};

template <class T>
std::function<bool(const T&)> positive() {
  return [](const T& v) { return v > T{0}; };
}

std::function<bool(const double&)> within(double lo, double hi) {
  return [lo, hi](const double& v) { return v >= lo && v <= hi; };
}

}  // namespace

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
  ExperimentConfig c;
  Reader r(doc);

  r.field("seed", c.seed);
  r.field("seeds", c.seeds);
  r.field("episodes", c.episodes, positive<std::size_t>(), "must be >= 1");
  std::string out = c.output_dir.string();
  r.field("output_dir", out);
  c.output_dir = out;
  r.field("eval_window", c.eval_window, positive<std::size_t>(), "must be >= 1");
  {
    std::optional<std::string> baseline;
    r.nullable("baseline", baseline);
    if (baseline) {
      try {
        c.baseline = parse_baseline_kind(*baseline);
      } catch (const Error&) {
        r.add_error("baseline: expected \"random\" or \"oracle-svd\" or null");
      }
    }
  }

  auto& ch = c.env.channel;
  r.field("N", ch.n, positive<std::size_t>(), "must be >= 1");
  r.field("rho", ch.rho, within(0.0, 1.0), "must lie in [0, 1]");
  r.nullable("sigma_zeta2", c.sigma_zeta2, positive<double>(), "must be > 0");
  r.field("sigma_z2", ch.sigma_z2, positive<double>(), "must be > 0");
  r.nullable("tau", c.tau, within(0.0, 1e300), "must be >= 0");
  r.field("kappa", ch.kappa, within(0.0, 1.0), "must lie in [0, 1]");
  r.field("delta", ch.delta, std::function<bool(const int&)>([](const int& v) { return v >= 0; }),
          "must be >= 0");

  double p = c.env.pa;
  r.field("P", p, positive<double>(), "must be > 0");
  c.env.pa = c.env.pb = p;
  r.field("Pmax", c.env.pmax, positive<double>(), "must be > 0");
  if (c.env.pa > c.env.pmax) r.add_error("P: must not exceed Pmax");
  r.field("lambda_k", c.env.lambda_k, within(0.0, 1.0), "must lie in [0, 1]");
  r.field("B", c.env.bandwidth, positive<double>(), "must be > 0");
  r.field("episode_len", c.env.episode_len, positive<std::size_t>(), "must be >= 1");
  {
    std::string mode = to_string(c.env.mode);
    r.field("observation_mode", mode);
    try {
      c.env.mode = parse_observation_mode(mode);
    } catch (const Error&) {
      r.add_error("observation_mode: expected full, partial-naive or partial-predicted");
    }
  }

  auto& s = c.sac;
  r.field("gamma", s.gamma, std::function<bool(const double&)>([](const double& v) {
            return v > 0.0 && v < 1.0;
          }),
          "must lie in (0, 1)");
  r.field("tau_target", s.tau_target, std::function<bool(const double&)>([](const double& v) {
            return v > 0.0 && v <= 1.0;
          }),
          "must lie in (0, 1]");
  r.field("lr_actor", s.lr_actor, positive<double>(), "must be > 0");
  r.field("lr_critic", s.lr_critic, positive<double>(), "must be > 0");
  r.field("lr_alpha", s.lr_alpha, positive<double>(), "must be > 0");
  r.field("alpha_init", s.alpha_init, positive<double>(), "must be > 0");
  r.nullable("target_entropy", s.target_entropy);
  r.field("batch_size", s.batch_size, positive<std::size_t>(), "must be >= 1");
  r.field("buffer_capacity", s.buffer_capacity, positive<std::size_t>(), "must be >= 1");
  r.field("warmup_steps", s.warmup_steps);
  r.field("updates_per_step", s.updates_per_step, positive<std::size_t>(), "must be >= 1");
  r.field("hidden", s.hidden, positive<std::size_t>(), "must be >= 2");

  auto& pr = c.predictor;
  r.field("seq_len", pr.seq_len, positive<std::size_t>(), "must be >= 1");
  r.field("lstm_hidden", pr.hidden, positive<std::size_t>(), "must be >= 1");
  r.field("predictor_lr", pr.lr, positive<double>(), "must be > 0");
  r.field("w_mse", pr.w_mse, within(0.0, 1e300), "must be >= 0");
  r.field("w_bce", pr.w_bce, within(0.0, 1e300), "must be >= 0");
  r.field("pretrain_steps", pr.pretrain_steps);
  r.field("predictor_batch", pr.batch_size, positive<std::size_t>(), "must be >= 1");
  r.field("predictor_rollout_slots", pr.rollout_slots, positive<std::size_t>(), "must be >= 1");

  r.reject_unknown();
  if (s.hidden < 2) r.add_error("hidden: must be >= 2");
  if (pr.rollout_slots < 2 * pr.seq_len) {
    r.add_error("predictor_rollout_slots: must be at least 2 * seq_len");
  }
  if (!r.errors().empty()) {
    std::ostringstream os;
    os << "invalid config:";
    for (const auto& e : r.errors()) os << "\n  " << e;
    throw ConfigError(os.str());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": malformed JSON: " + e.what());
  }
  return config_from_json(doc);
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["seeds"] = c.seeds;
  j["episodes"] = c.episodes;
  j["output_dir"] = c.output_dir.string();
  j["eval_window"] = c.eval_window;
  j["baseline"] = c.baseline ? json(to_string(*c.baseline)) : json(nullptr);
  const auto& ch = c.env.channel;
  j["N"] = ch.n;
  j["rho"] = ch.rho;
  j["sigma_zeta2"] = c.sigma_zeta2 ? json(*c.sigma_zeta2) : json(nullptr);
  j["sigma_z2"] = ch.sigma_z2;
  j["tau"] = c.tau ? json(*c.tau) : json(nullptr);
  j["kappa"] = ch.kappa;
  j["delta"] = ch.delta;
  j["P"] = c.env.pa;
  j["Pmax"] = c.env.pmax;
  j["lambda_k"] = c.env.lambda_k;
  j["B"] = c.env.bandwidth;
  j["episode_len"] = c.env.episode_len;
  j["observation_mode"] = to_string(c.env.mode);
  const auto& s = c.sac;
  j["gamma"] = s.gamma;
  j["tau_target"] = s.tau_target;
  j["lr_actor"] = s.lr_actor;
  j["lr_critic"] = s.lr_critic;
  j["lr_alpha"] = s.lr_alpha;
  j["alpha_init"] = s.alpha_init;
  j["target_entropy"] = s.target_entropy ? json(*s.target_entropy) : json(nullptr);
  j["batch_size"] = s.batch_size;
  j["buffer_capacity"] = s.buffer_capacity;
  j["warmup_steps"] = s.warmup_steps;
  j["updates_per_step"] = s.updates_per_step;
  j["hidden"] = s.hidden;
  const auto& pr = c.predictor;
  j["seq_len"] = pr.seq_len;
  j["lstm_hidden"] = pr.hidden;
  j["predictor_lr"] = pr.lr;
  j["w_mse"] = pr.w_mse;
  j["w_bce"] = pr.w_bce;
  j["pretrain_steps"] = pr.pretrain_steps;
  j["predictor_batch"] = pr.batch_size;
  j["predictor_rollout_slots"] = pr.rollout_slots;
  return j;
}

ExperimentConfig full_scale_profile() {
  ExperimentConfig c;
  c.env.channel.n = 8;
  c.env.pa = c.env.pb = c.env.pmax = 100.0;
  c.sac.gamma = 0.99;
  c.sac.tau_target = 0.005;
  c.sac.alpha_init = 0.02;
  c.sac.lr_actor = c.sac.lr_critic = c.sac.lr_alpha = 1e-4;
  c.sac.hidden = 512;
  c.predictor.hidden = 64;
  return c;
}

void apply_env_overrides(ExperimentConfig& config) {
  if (const char* s = std::getenv("PLKG_SEED"); s && *s) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (*end != '\0') throw ConfigError(std::string("PLKG_SEED: not an integer: ") + s);
    config.seed = v;
  }
  if (const char* o = std::getenv("PLKG_OUT"); o && *o) config.output_dir = o;
}

}  // namespace plkg::experiment
