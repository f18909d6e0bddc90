#include "madrl/agent.hpp"

#include <cmath>
#include <sstream>

#include <spdlog/spdlog.h>

namespace madrl {

namespace {

void stack_states(const Batch& batch, bool next, Eigen::MatrixXd& out) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  out.resize(batch.front().state.size(), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) out.col(i) = next ? batch[i].next_state : batch[i].state;
}

Eigen::MatrixXd stack_states(const Batch& batch, bool next) {
  Eigen::MatrixXd out;
  stack_states(batch, next, out);
  return out;
}

// dL/dv for the summed squared TD error.
Eigen::MatrixXd critic_grad_out(const Eigen::MatrixXd& v, const Eigen::VectorXd& targets) {
  return -2.0 * (targets.transpose() - v);
}

// d/dz of the summed advantage-weighted log softmax(z)_a, i.e. (onehot(a) - p) * A.
Eigen::MatrixXd actor_grad_out(const Eigen::MatrixXd& logits, const Batch& batch, const Eigen::VectorXd& adv) {
  Eigen::MatrixXd grad = -softmax<double>(logits);
  for (std::size_t i = 0; i < batch.size(); ++i) grad(batch[i].action, i) += 1.0;
  for (std::size_t i = 0; i < batch.size(); ++i) grad.col(i) *= adv[i];
  return grad;
}

void require_finite(const Gradients& g, const char* which, double loss) {
  if (all_finite(g)) return;
  std::ostringstream msg;
  msg << which << " gradient is not finite (loss " << loss << ", squared norm " << squared_norm(g) << ")";
  throw TrainingError(msg.str());
}

}  // namespace

AgentParams init_params(int obs_size, int n_actions, const std::vector<int>& hidden, Rng& rng) {
  std::vector<int> actor{obs_size}, critic{obs_size};
  actor.insert(actor.end(), hidden.begin(), hidden.end());
  critic.insert(critic.end(), hidden.begin(), hidden.end());
  actor.push_back(n_actions);
  critic.push_back(1);
  AgentParams p;
  p.actor = Network(actor, rng);
  p.critic = Network(critic, rng);
  return p;
}

Eigen::VectorXd policy_forward(const Network& actor, const Eigen::VectorXd& state) {
  return softmax<double>(actor.forward(state)).col(0);
}

double value_forward(const Network& critic, const Eigen::VectorXd& state) { return critic.forward(state)(0, 0); }

int sample_action(const Eigen::VectorXd& probs, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x = u(rng) * probs.sum();
  double acc = 0.0;
  int last = 0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    acc += probs[i];
    last = static_cast<int>(i);
    if (x < acc) return last;
  }
  return last;
}

TdEstimate td_advantage(const Batch& batch, const Network& critic, double gamma) {
  const Eigen::VectorXd v = critic.forward(stack_states(batch, false)).row(0).transpose();
  const Eigen::VectorXd v_next = critic.forward(stack_states(batch, true)).row(0).transpose();
  TdEstimate td;
  td.target.resize(static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i)
    td.target[i] = batch[i].reward + (batch[i].done ? 0.0 : gamma * v_next[i]);
  td.advantage = td.target - v;
  return td;
}

double critic_loss(const Network& critic, const Batch& batch, const Eigen::VectorXd& targets) {
  const Eigen::VectorXd v = critic.forward(stack_states(batch, false)).row(0).transpose();
  return (targets - v).squaredNorm();
}

Gradients critic_loss_gradient(const Network& critic, const Batch& batch, const Eigen::VectorXd& targets) {
  MlpTape<double> tape;
  const Eigen::MatrixXd& v = critic.forward(stack_states(batch, false), tape);
  return critic.backward(tape, critic_grad_out(v, targets));
}

double actor_objective(const Network& actor, const Batch& batch, const Eigen::VectorXd& advantages) {
  const Eigen::MatrixXd probs = softmax<double>(actor.forward(stack_states(batch, false)));
  double j = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) j += advantages[i] * std::log(probs(batch[i].action, i));
  return j;
}

Gradients actor_objective_gradient(const Network& actor, const Batch& batch, const Eigen::VectorXd& advantages) {
  MlpTape<double> tape;
  const Eigen::MatrixXd& logits = actor.forward(stack_states(batch, false), tape);
  return actor.backward(tape, actor_grad_out(logits, batch, advantages));
}

bool clip_global_norm(Gradients& grads, double max_norm) {
  if (max_norm <= 0.0) return false;
  const double norm = std::sqrt(squared_norm(grads));
  if (norm <= max_norm) return false;
  const double scale = max_norm / norm;
  for (auto& g : grads) {
    g.weight *= scale;
    g.bias *= scale;
  }
  spdlog::debug("gradient norm {:.4g} clipped to {:.4g}", norm, max_norm);
  return true;
}

Network critic_update(Network critic, const Batch& batch, double lr, double gamma, double clip_norm) {
  const TdEstimate td = td_advantage(batch, critic, gamma);
  Gradients g = critic_loss_gradient(critic, batch, td.target);
  require_finite(g, "critic", td.advantage.squaredNorm() / batch.size());
  clip_global_norm(g, clip_norm);
  critic.apply(g, -lr);
  return critic;
}

Network actor_update(Network actor, const Batch& batch, const Eigen::VectorXd& advantages, double lr,
                     double clip_norm) {
  Gradients g = actor_objective_gradient(actor, batch, advantages);
  require_finite(g, "actor", advantages.mean());
  clip_global_norm(g, clip_norm);
  actor.apply(g, lr);
  return actor;
}

double gradcheck(const Network& net, const std::function<double(const Network&)>& loss, const Gradients& analytic,
                 double step) {
  const Eigen::VectorXd theta = net.flat();
  const Eigen::VectorXd grad = Network::flatten(analytic);
  Network probe = net;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Eigen::VectorXd t = theta;
    t[i] = theta[i] + step;
    probe.set_flat(t);
    const double up = loss(probe);
    t[i] = theta[i] - step;
    probe.set_flat(t);
    const double down = loss(probe);
    const double numeric = (up - down) / (2.0 * step);
    worst = std::max(worst, std::abs(grad[i] - numeric) / (std::abs(grad[i]) + 1e-8));
  }
  return worst;
}

A2CAgent::A2CAgent(AgentParams params, Hyperparams hyper, std::uint64_t seed)
    : params_(std::move(params)), hyper_(std::move(hyper)), rng_(seed) {
  buffer_.reserve(static_cast<std::size_t>(hyper_.batch_size));
}

bool A2CAgent::observe(Experience e) {
  buffer_.push_back(std::move(e));
  if (static_cast<int>(buffer_.size()) < hyper_.batch_size) return false;
  learn(buffer_);
  buffer_.clear();
  return true;
}

void A2CAgent::learn(const Batch& batch) {
  stack_states(batch, false, states_);
  stack_states(batch, true, next_states_);
  const Eigen::Index b = states_.cols();
  Eigen::VectorXd target(b), adv(b);
  for (int pass = 0; pass < hyper_.update_time; ++pass) {
    const Eigen::VectorXd v_next = params_.critic.forward(next_states_, probe_tape_).row(0).transpose();
    const Eigen::MatrixXd& v = params_.critic.forward(states_, critic_tape_);
    for (Eigen::Index i = 0; i < b; ++i) {
      const auto& e = batch[static_cast<std::size_t>(i)];
      target[i] = e.reward + (e.done ? 0.0 : hyper_.gamma * v_next[i]);
    }
    adv = target - v.row(0).transpose();

    params_.critic.backward(critic_tape_, critic_grad_out(v, target), critic_grad_);
    require_finite(critic_grad_, "critic", adv.squaredNorm() / b);
    clipped_ += clip_global_norm(critic_grad_, hyper_.clip_norm);

    const Eigen::MatrixXd& logits = params_.actor.forward(states_, actor_tape_);
    params_.actor.backward(actor_tape_, actor_grad_out(logits, batch, adv), actor_grad_);
    require_finite(actor_grad_, "actor", adv.mean());
    clipped_ += clip_global_norm(actor_grad_, hyper_.clip_norm);

    params_.critic.apply(critic_grad_, -hyper_.critic_lr);
    params_.actor.apply(actor_grad_, hyper_.actor_lr);
  }
  ++updates_;
}

}  // namespace madrl
