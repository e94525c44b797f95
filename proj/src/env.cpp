#include "mavenrl/env.hpp"

#include <stdexcept>

namespace mavenrl {

MatrixGameEnv::MatrixGameEnv(PayoffTensor payoff, double gamma)
    : payoff_(std::move(payoff)) {
  payoff_.validate();
  spec_ = EnvSpec{payoff_.n_agents, payoff_.n_actions, /*n_states=*/1, gamma,
                  /*horizon=*/1};
}

Transition MatrixGameEnv::step(int state, std::span<const int> joint_action) {
  if (state != 0) throw std::logic_error("MatrixGameEnv: invalid state");
  if (static_cast<int>(joint_action.size()) != spec_.n_agents)
    throw std::invalid_argument("MatrixGameEnv: wrong joint action arity");
  Transition t;
  t.state = 0;
  t.joint_action.assign(joint_action.begin(), joint_action.end());
  t.reward = payoff_.at(joint_action);
  t.next_state = 0;
  t.terminal = true;
  return t;
}

MStepGameEnv::MStepGameEnv(int m, double gamma) : m_(m) {
  if (m < 2) throw std::invalid_argument("MStepGameEnv: m must be >= 2");
  spec_ = EnvSpec{/*n_agents=*/2, /*n_actions=*/2, /*n_states=*/m, gamma,
                  /*horizon=*/m};
}

Transition MStepGameEnv::step(int state, std::span<const int> joint_action) {
  if (state < 0 || state >= m_) throw std::logic_error("MStepGameEnv: invalid state");
  if (joint_action.size() != 2)
    throw std::invalid_argument("MStepGameEnv: wrong joint action arity");
  const int a0 = joint_action[0];
  const int a1 = joint_action[1];
  if (a0 < 0 || a0 > 1 || a1 < 0 || a1 > 1)
    throw std::invalid_argument("MStepGameEnv: action out of range");

  Transition t;
  t.state = state;
  t.joint_action = {a0, a1};

  const bool both_a = (a0 == 0 && a1 == 0);
  const bool both_b = (a0 == 1 && a1 == 1);

  if (state == 0 && both_b) {
    t.reward = static_cast<double>(m_);
    t.next_state = state;
    t.terminal = true;
  } else if (state == m_ - 1 && both_b) {
    t.reward = 4.0;
    t.next_state = state;
    t.terminal = true;
  } else if (state < m_ - 1 && both_a) {
    t.reward = 1.0;
    t.next_state = state + 1;
    t.terminal = false;
  } else {
    // Zero rewards terminate.
    t.reward = 0.0;
    t.next_state = state;
    t.terminal = true;
  }
  return t;
}

}  // namespace mavenrl
