#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "madrl/mlp.hpp"

namespace madrl {

using Network = Mlp<double>;
using Gradients = std::vector<DenseLayer<double>>;
using Rng = std::mt19937_64;

struct Hyperparams {
  double actor_lr = 1e-3;
  double critic_lr = 3e-3;
  double gamma = 0.9;
  int batch_size = 32;
  int update_time = 10;
  int episodes = 1000;
  std::uint64_t seed = 0;
  std::vector<int> hidden{256, 128};
  double clip_norm = 5.0;
  int step_cap_multiplier = 4;
};

/// Actor (policy) and critic (value) networks of one learner.
struct AgentParams {
  Network actor;
  Network critic;

  friend bool operator==(const AgentParams&, const AgentParams&) = default;
};

/// Fresh networks for an observation of `obs_size` and `n_actions` outputs.
AgentParams init_params(int obs_size, int n_actions, const std::vector<int>& hidden, Rng& rng);

struct Experience {
  Eigen::VectorXd state;
  int action = 0;
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool done = false;
};

using Batch = std::vector<Experience>;

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Eigen::VectorXd policy_forward(const Network& actor, const Eigen::VectorXd& state);
double value_forward(const Network& critic, const Eigen::VectorXd& state);

/// Categorical draw from `probs`.
int sample_action(const Eigen::VectorXd& probs, Rng& rng);

struct TdEstimate {
  Eigen::VectorXd target;     // r + gamma * V(s') * (1 - done)
  Eigen::VectorXd advantage;  // target - V(s)
};

TdEstimate td_advantage(const Batch& batch, const Network& critic, double gamma);

/// Squared TD error summed over the batch, targets held fixed.
double critic_loss(const Network& critic, const Batch& batch, const Eigen::VectorXd& targets);
Gradients critic_loss_gradient(const Network& critic, const Batch& batch, const Eigen::VectorXd& targets);

/// Advantage-weighted log-likelihood of the taken actions, summed over the batch.
double actor_objective(const Network& actor, const Batch& batch, const Eigen::VectorXd& advantages);
Gradients actor_objective_gradient(const Network& actor, const Batch& batch, const Eigen::VectorXd& advantages);

/// Scales `grads` to global norm `max_norm` if larger. Returns true when clipped.
bool clip_global_norm(Gradients& grads, double max_norm);

/// One descent step on the critic loss; targets come from the current critic.
Network critic_update(Network critic, const Batch& batch, double lr, double gamma, double clip_norm = 0.0);
/// One ascent step on the actor objective.
Network actor_update(Network actor, const Batch& batch, const Eigen::VectorXd& advantages, double lr,
                     double clip_norm = 0.0);

/// Largest |analytic − central difference| / (|analytic| + 1e-8) over all parameters.
double gradcheck(const Network& net, const std::function<double(const Network&)>& loss, const Gradients& analytic,
                 double step = 1e-5);

/// A2C learner with an on-policy buffer that is consumed every `batch_size` transitions.
class A2CAgent {
 public:
  A2CAgent(AgentParams params, Hyperparams hyper, std::uint64_t seed);

  const AgentParams& params() const { return params_; }
  const Hyperparams& hyper() const { return hyper_; }
  Rng& rng() { return rng_; }

  Eigen::VectorXd policy(const Eigen::VectorXd& state) const { return policy_forward(params_.actor, state); }
  double value(const Eigen::VectorXd& state) const { return value_forward(params_.critic, state); }
  int act(const Eigen::VectorXd& state) { return sample_action(policy(state), rng_); }

  /// Stores the transition; runs `update_time` passes over the buffer once it holds
  /// `batch_size` transitions, then clears it. Returns true if an update ran.
  bool observe(Experience e);
  /// Runs the update passes on the given batch immediately.
  void learn(const Batch& batch);

  std::size_t buffered() const { return buffer_.size(); }
  long updates() const { return updates_; }
  long clipped() const { return clipped_; }

 private:
  AgentParams params_;
  Hyperparams hyper_;
  Rng rng_;
  Batch buffer_;
  long updates_ = 0;
  long clipped_ = 0;

  // Reused between updates.
  Eigen::MatrixXd states_;
  Eigen::MatrixXd next_states_;
  MlpTape<double> actor_tape_;
  MlpTape<double> critic_tape_;
  MlpTape<double> probe_tape_;
  Gradients actor_grad_;
  Gradients critic_grad_;
};

}  // namespace madrl
