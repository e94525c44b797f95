#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mavenrl {

// A joint action for n agents, each entry in [0, n_actions).
struct JointAction {
  std::vector<int> actions;

  int size() const { return static_cast<int>(actions.size()); }
  int operator[](int i) const { return actions[static_cast<std::size_t>(i)]; }
};

// Flat row-major index of a joint action: agent 0 is the slowest-varying
// coordinate.
std::size_t joint_index(std::span<const int> actions, int n_actions);

// Inverse of joint_index.
std::vector<int> joint_action_at(std::size_t index, int n_agents, int n_actions);

// Joint action-value table for an n-agent, k-action stage game. values has
// length k^n in row-major joint-action order; all entries finite.
struct PayoffTensor {
  int n_agents = 0;
  int n_actions = 0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }

  double at(std::span<const int> actions) const {
    return values[joint_index(actions, n_actions)];
  }
  double& at(std::span<const int> actions) {
    return values[joint_index(actions, n_actions)];
  }

  // Throws std::invalid_argument when the length or finiteness invariants
  // are violated.
  void validate() const;

  static PayoffTensor constant(int n_agents, int n_actions, double value);
};

// The n-agent, k-action family with a single peak R+delta at (0,...,0),
// zeros at every joint action whose coordinate sum s satisfies
// 1 <= s <= k-2, and R everywhere else. Requires k >= 3, R > 0, delta >= 0.
PayoffTensor template_payoff(int n_agents, int n_actions, double reward,
                             double delta);

// Per-agent independent argmax, composed into a joint action. Ties break
// toward the lowest action index. O(n * k).
std::vector<int> greedy_joint_action(
    const std::vector<std::vector<double>>& per_agent_utilities);

// JSON persistence: {"n": int, "k": int, "values": [row-major reals]}.
std::string payoff_to_json(const PayoffTensor& t);
PayoffTensor payoff_from_json(const std::string& text);
PayoffTensor load_payoff(const std::string& path);
void save_payoff(const PayoffTensor& t, const std::string& path);

}  // namespace mavenrl
