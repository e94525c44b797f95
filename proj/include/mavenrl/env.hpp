#pragma once

#include <memory>
#include <span>

#include "mavenrl/payoff.hpp"
#include "mavenrl/rng.hpp"

namespace mavenrl {

struct EnvSpec {
  int n_agents = 0;
  int n_actions = 0;
  int n_states = 0;
  double gamma = 0.99;
  int horizon = 1;
};

struct Transition {
  int state = 0;
  std::vector<int> joint_action;
  double reward = 0.0;
  int next_state = 0;
  bool terminal = false;
};

// Episodic, fully observable, deterministic-transition environments. Each
// agent's observation is the state identity, so no separate observation
// type is exposed. Instances are pure state machines: step() is a function
// of (state, joint_action) only.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const EnvSpec& spec() const = 0;

  // Returns the initial state id.
  virtual int reset(Rng& rng) = 0;

  // Stepping a terminal state is a contract violation and throws.
  virtual Transition step(int state, std::span<const int> joint_action) = 0;
};

// Single-state stage game: one step, reward = payoff[joint_action], then
// terminal.
class MatrixGameEnv final : public Environment {
 public:
  explicit MatrixGameEnv(PayoffTensor payoff, double gamma = 0.99);

  const EnvSpec& spec() const override { return spec_; }
  int reset(Rng&) override { return 0; }
  Transition step(int state, std::span<const int> joint_action) override;

  const PayoffTensor& payoff() const { return payoff_; }

 private:
  PayoffTensor payoff_;
  EnvSpec spec_;
};

// Two-agent, two-action chain of m states {s0,...,s_{m-1}}. At s0 the
// matched action (B,B) terminates immediately with reward m, while (A,A)
// pays +1 and advances right; any unmatched joint action pays 0 and
// terminates. Intermediate states s1..s_{m-2} advance only on (A,A) for +1.
// At the right end s_{m-1}, (B,B) pays +4 and terminates. The best
// deterministic policy therefore earns (m-1) + 4 = m+3.
class MStepGameEnv final : public Environment {
 public:
  explicit MStepGameEnv(int m, double gamma = 0.99);

  const EnvSpec& spec() const override { return spec_; }
  int reset(Rng&) override { return 0; }
  Transition step(int state, std::span<const int> joint_action) override;

  int m() const { return m_; }

 private:
  int m_;
  EnvSpec spec_;
};

}  // namespace mavenrl
