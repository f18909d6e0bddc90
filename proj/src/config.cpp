#include "madrl/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace madrl {

using json = nlohmann::json;

namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  ExperimentConfig cfg;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config parse error: ") + e.what());
  }
  try {
    read(j, "seed", cfg.seed);
    if (j.contains("topology")) read(j["topology"], "nodes", cfg.topology.nodes);
    if (j.contains("traffic")) {
      const auto& t = j["traffic"];
      if (t.contains("peak_load")) cfg.traffic.profile = TrafficProfile::diurnal(t["peak_load"].get<double>());
      read(t, "hourly_load", cfg.traffic.profile.hourly_load);
      read(t, "noise", cfg.traffic.profile.noise);
      read(t, "profile_seed", cfg.traffic.profile.seed);
      read(t, "snapshots", cfg.traffic.snapshots);
      read(t, "per_window", cfg.traffic.per_window);
    }
    if (j.contains("reward")) {
      const auto& r = j["reward"];
      read(r, "beta", cfg.reward.beta);
      read(r, "r_hell", cfg.reward.r_hell);
      read(r, "r_loop", cfg.reward.r_loop);
    }
    if (j.contains("hyper")) {
      const auto& h = j["hyper"];
      read(h, "actor_lr", cfg.hyper.actor_lr);
      read(h, "critic_lr", cfg.hyper.critic_lr);
      read(h, "gamma", cfg.hyper.gamma);
      read(h, "batch_size", cfg.hyper.batch_size);
      read(h, "update_time", cfg.hyper.update_time);
      read(h, "episodes", cfg.hyper.episodes);
      read(h, "hidden", cfg.hyper.hidden);
      read(h, "clip_norm", cfg.hyper.clip_norm);
      read(h, "step_cap_multiplier", cfg.hyper.step_cap_multiplier);
      read(h, "n_agents", cfg.n_agents);
      read(h, "pretrain_episodes", cfg.pretrain_episodes);
      read(h, "parallel", cfg.parallel);
    }
    if (j.contains("request")) {
      read(j["request"], "src", cfg.request.src);
      read(j["request"], "dst", cfg.request.dsts);
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config error: ") + e.what());
  }
  cfg.hyper.seed = cfg.seed;
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["topology"] = {{"nodes", cfg.topology.nodes}};
  j["traffic"] = {{"hourly_load", cfg.traffic.profile.hourly_load},
                  {"noise", cfg.traffic.profile.noise},
                  {"profile_seed", cfg.traffic.profile.seed},
                  {"snapshots", cfg.traffic.snapshots},
                  {"per_window", cfg.traffic.per_window}};
  j["reward"] = {{"beta", cfg.reward.beta}, {"r_hell", cfg.reward.r_hell}, {"r_loop", cfg.reward.r_loop}};
  j["hyper"] = {{"actor_lr", cfg.hyper.actor_lr},
                {"critic_lr", cfg.hyper.critic_lr},
                {"gamma", cfg.hyper.gamma},
                {"batch_size", cfg.hyper.batch_size},
                {"update_time", cfg.hyper.update_time},
                {"episodes", cfg.hyper.episodes},
                {"hidden", cfg.hyper.hidden},
                {"clip_norm", cfg.hyper.clip_norm},
                {"step_cap_multiplier", cfg.hyper.step_cap_multiplier},
                {"n_agents", cfg.n_agents},
                {"pretrain_episodes", cfg.pretrain_episodes},
                {"parallel", cfg.parallel}};
  j["request"] = {{"src", cfg.request.src}, {"dst", cfg.request.dsts}};
  return j.dump(2);
}

}  // namespace madrl
