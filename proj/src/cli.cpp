#include "madrl/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "madrl/checkpoint.hpp"
#include "madrl/config.hpp"
#include "madrl/evaluation.hpp"
#include "madrl/trainer.hpp"

namespace madrl {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Inputs {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out;
  int nodes = 0;
  std::string topo;
  std::string traffic;
  std::string run;
  std::string warm;
  int snapshots = 0;
  int episodes = -1;
  int agents = 0;
};

ExperimentConfig effective_config(const Inputs& in) {
  ExperimentConfig cfg = in.config.empty() ? ExperimentConfig{} : load_config(in.config);
  if (in.seed_given) cfg.seed = cfg.hyper.seed = in.seed;
  if (in.nodes > 0) cfg.topology.nodes = in.nodes;
  if (in.snapshots > 0) cfg.traffic.snapshots = in.snapshots;
  if (in.agents > 0) cfg.n_agents = in.agents;
  cfg.hyper.seed = cfg.seed;
  return cfg;
}

const std::string& need(const std::string& value, const char* flag, const char* what) {
  if (value.empty()) throw std::runtime_error(std::string("missing input: ") + what + " (" + flag + ")");
  return value;
}

std::string out_or(const Inputs& in, const char* fallback) { return in.out.empty() ? fallback : in.out; }

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-agent A2C multicast routing laboratory", "madrl_cli"};
  app.require_subcommand(1);
  app.fallthrough();
  Inputs in;
  app.add_option("--config", in.config, "Experiment config (JSON)");
  app.add_option("--seed", in.seed, "Seed for all randomness")->each([&](const std::string&) { in.seed_given = true; });
  app.add_option("--out", in.out, "Output file or directory");

  auto* gen_topo = app.add_subcommand("gen-topo", "Generate a random wireless topology");
  gen_topo->add_option("--nodes", in.nodes, "Number of nodes");

  auto* gen_traffic = app.add_subcommand("gen-traffic", "Synthesize link-state snapshots for one day");
  gen_traffic->add_option("--topo", in.topo, "Topology file");
  gen_traffic->add_option("--snapshots", in.snapshots, "Snapshots per day");

  auto* pretrain = app.add_subcommand("pretrain", "Pretrain a unicast agent for warm starts");
  pretrain->add_option("--topo", in.topo, "Topology file");
  pretrain->add_option("--traffic", in.traffic, "Snapshot directory");
  pretrain->add_option("--episodes", in.episodes, "Pretraining episodes");

  auto* train = app.add_subcommand("train", "Train the multi-agent router");
  train->add_option("--topo", in.topo, "Topology file");
  train->add_option("--traffic", in.traffic, "Snapshot directory");
  train->add_option("--warm", in.warm, "Pretrained checkpoint");
  train->add_option("--episodes", in.episodes, "Training episodes per agent");
  train->add_option("--agents", in.agents, "Number of agents");

  auto* eval = app.add_subcommand("eval", "Compare a trained run against the KMB baselines");
  eval->add_option("--topo", in.topo, "Topology file");
  eval->add_option("--traffic", in.traffic, "Snapshot directory");
  eval->add_option("--run", in.run, "Run directory written by train");

  auto* baseline = app.add_subcommand("baseline", "Report the KMB baselines only");
  baseline->add_option("--topo", in.topo, "Topology file");
  baseline->add_option("--traffic", in.traffic, "Snapshot directory");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    const ExperimentConfig cfg = effective_config(in);
    if (*gen_topo) {
      const Topology topo = gen_topology(cfg.topology.nodes, cfg.seed);
      const fs::path path = out_or(in, "topo.json");
      save_topology(topo, path);
      out << "wrote " << path.string() << " (" << topo.size() << " nodes, " << topo.links().size() << " links)\n";
      return 0;
    }

    const Topology topo = load_topology(need(in.topo, "--topo", "topology"));
    if (*gen_traffic) {
      const auto snaps = gen_snapshots(topo, cfg.traffic.profile, cfg.traffic.snapshots, cfg.seed);
      const fs::path dir = out_or(in, "traffic");
      save_snapshots(topo, snaps, dir);
      out << "wrote " << snaps.size() << " snapshots to " << dir.string() << '\n';
      return 0;
    }

    const auto snaps = load_snapshots(topo, need(in.traffic, "--traffic", "traffic snapshots"));
    const int step_cap = cfg.hyper.step_cap_multiplier * topo.size();

    if (*pretrain) {
      const int episodes = in.episodes >= 0 ? in.episodes : cfg.pretrain_episodes;
      const auto weights = pretrain_unicast(topo, snaps, cfg.hyper, cfg.reward, episodes);
      const fs::path path = out_or(in, "pretrained.ckpt");
      save_checkpoint(weights.to_checkpoint(), path);
      out << "wrote " << path.string() << " after " << episodes << " episodes\n";
      return 0;
    }

    if (*train) {
      Hyperparams hyper = cfg.hyper;
      if (in.episodes >= 0) hyper.episodes = in.episodes;
      std::optional<PretrainedWeights> warm;
      if (!in.warm.empty()) warm = PretrainedWeights::from_checkpoint(load_checkpoint(in.warm));
      const TrainingRun run =
          train_madrl(topo, snaps, cfg.request, hyper, cfg.reward, {cfg.n_agents, cfg.parallel}, warm);
      ExperimentConfig snapshot_cfg = cfg;
      snapshot_cfg.hyper = hyper;
      const fs::path dir = out_or(in, "run");
      write_run_directory(dir, run, config_to_json_text(snapshot_cfg), cfg.seed, cfg.reward, step_cap);
      out << "trained " << run.agents.size() << " agents in " << run.seconds << " s; tree "
          << tree_to_json_text(run.tree) << '\n';
      return 0;
    }

    std::vector<RoutingAlgorithm> algorithms;
    std::optional<MadrlPolicy> policy;
    if (*eval) {
      policy = load_run_policy(need(in.run, "--run", "run directory"));
      algorithms.push_back(madrl_algorithm(topo, *policy));
    }
    for (auto& a : kmb_algorithms(topo, cfg.request)) algorithms.push_back(std::move(a));
    const EvalReport report = evaluate(topo, snaps, cfg.request, algorithms, cfg.traffic.profile, cfg.traffic.per_window);
    const fs::path path = out_or(in, "report.csv");
    write_report_csv(report, path);
    out << "wrote " << report.rows.size() << " rows to " << path.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace madrl
