#include "mavenrl/payoff.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mavenrl {

std::size_t joint_index(std::span<const int> actions, int n_actions) {
  std::size_t idx = 0;
  for (int a : actions) {
    if (a < 0 || a >= n_actions)
      throw std::out_of_range("joint_index: action out of range");
    idx = idx * static_cast<std::size_t>(n_actions) + static_cast<std::size_t>(a);
  }
  return idx;
}

std::vector<int> joint_action_at(std::size_t index, int n_agents, int n_actions) {
  std::vector<int> actions(static_cast<std::size_t>(n_agents), 0);
  for (int i = n_agents - 1; i >= 0; --i) {
    actions[static_cast<std::size_t>(i)] =
        static_cast<int>(index % static_cast<std::size_t>(n_actions));
    index /= static_cast<std::size_t>(n_actions);
  }
  return actions;
}

namespace {
std::size_t pow_size(int k, int n) {
  std::size_t r = 1;
  for (int i = 0; i < n; ++i) {
    if (r > (static_cast<std::size_t>(-1) / static_cast<std::size_t>(k)))
      throw std::overflow_error("payoff tensor size overflows size_t");
    r *= static_cast<std::size_t>(k);
  }
  return r;
}
}  // namespace

void PayoffTensor::validate() const {
  if (n_agents < 1 || n_actions < 1)
    throw std::invalid_argument("PayoffTensor: n_agents and n_actions must be >= 1");
  if (values.size() != pow_size(n_actions, n_agents))
    throw std::invalid_argument("PayoffTensor: values.length != k^n");
  for (double v : values)
    if (!std::isfinite(v))
      throw std::invalid_argument("PayoffTensor: non-finite entry");
}

PayoffTensor PayoffTensor::constant(int n_agents, int n_actions, double value) {
  PayoffTensor t;
  t.n_agents = n_agents;
  t.n_actions = n_actions;
  t.values.assign(pow_size(n_actions, n_agents), value);
  return t;
}

PayoffTensor template_payoff(int n_agents, int n_actions, double reward,
                             double delta) {
  if (n_agents < 1) throw std::invalid_argument("template_payoff: n must be >= 1");
  if (n_actions < 3) throw std::invalid_argument("template_payoff: k must be >= 3");
  if (reward <= 0.0) throw std::invalid_argument("template_payoff: R must be > 0");
  if (delta < 0.0) throw std::invalid_argument("template_payoff: delta must be >= 0");

  PayoffTensor t = PayoffTensor::constant(n_agents, n_actions, reward);
  for (std::size_t idx = 0; idx < t.values.size(); ++idx) {
    auto actions = joint_action_at(idx, n_agents, n_actions);
    long sum = 0;
    for (int a : actions) sum += a;
    if (sum == 0) {
      t.values[idx] = reward + delta;
    } else if (sum <= n_actions - 2) {
      t.values[idx] = 0.0;
    }
  }
  return t;
}

std::vector<int> greedy_joint_action(
    const std::vector<std::vector<double>>& per_agent_utilities) {
  std::vector<int> joint;
  joint.reserve(per_agent_utilities.size());
  for (const auto& utils : per_agent_utilities) {
    if (utils.empty())
      throw std::invalid_argument("greedy_joint_action: empty utility vector");
    int best = 0;
    for (int a = 1; a < static_cast<int>(utils.size()); ++a)
      if (utils[static_cast<std::size_t>(a)] > utils[static_cast<std::size_t>(best)])
        best = a;
    joint.push_back(best);
  }
  return joint;
}

std::string payoff_to_json(const PayoffTensor& t) {
  nlohmann::json j;
  j["n"] = t.n_agents;
  j["k"] = t.n_actions;
  j["values"] = t.values;
  return j.dump(2);
}

PayoffTensor payoff_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  PayoffTensor t;
  t.n_agents = j.at("n").get<int>();
  t.n_actions = j.at("k").get<int>();
  t.values = j.at("values").get<std::vector<double>>();
  t.validate();
  return t;
}

PayoffTensor load_payoff(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open payoff file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return payoff_from_json(ss.str());
}

void save_payoff(const PayoffTensor& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write payoff file: " + path);
  out << payoff_to_json(t) << "\n";
}

}  // namespace mavenrl
