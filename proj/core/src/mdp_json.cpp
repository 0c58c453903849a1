#include "pulab/mdp_json.hpp"

#include <json.hpp>

#include "pulab/errors.hpp"

namespace pulab {

using nlohmann::json;

std::string mdp_to_json(const FiniteMdp& mdp) {
  json doc;
  doc["n_states"] = mdp.n_states();
  doc["n_actions"] = mdp.n_actions();
  doc["discount"] = mdp.discount();
  doc["initial"] = std::vector<double>(mdp.initial_distribution().begin(), mdp.initial_distribution().end());
  json terminal = json::array();
  json rewards = json::array();
  json transitions = json::array();
  for (StateIndex s = 0; s < mdp.n_states(); ++s) {
    terminal.push_back(mdp.is_terminal(s));
    json reward_row = json::array();
    json state_rows = json::array();
    for (ActionIndex a = 0; a < mdp.n_actions(); ++a) {
      reward_row.push_back(mdp.reward(s, a));
      json succ = json::array();
      for (const auto& x : mdp.successors(s, a)) succ.push_back(json::array({x.state, x.probability}));
      state_rows.push_back(std::move(succ));
    }
    rewards.push_back(std::move(reward_row));
    transitions.push_back(std::move(state_rows));
  }
  doc["terminal"] = std::move(terminal);
  doc["rewards"] = std::move(rewards);
  doc["transitions"] = std::move(transitions);
  return doc.dump(2) + "\n";
}

FiniteMdp mdp_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    const auto n_states = doc.at("n_states").get<std::size_t>();
    const auto n_actions = doc.at("n_actions").get<std::size_t>();
    FiniteMdp mdp(n_states, n_actions, doc.at("discount").get<double>());
    mdp.set_initial_distribution(doc.at("initial").get<std::vector<double>>());

    const auto& terminal = doc.at("terminal");
    const auto& rewards = doc.at("rewards");
    const auto& transitions = doc.at("transitions");
    if (terminal.size() != n_states || rewards.size() != n_states || transitions.size() != n_states)
      throw InvalidMdp("MDP JSON: per-state arrays have the wrong length");
    for (StateIndex s = 0; s < n_states; ++s) {
      mdp.set_terminal(s, terminal[s].get<bool>());
      if (rewards[s].size() != n_actions || transitions[s].size() != n_actions)
        throw InvalidMdp("MDP JSON: per-action arrays have the wrong length");
      for (ActionIndex a = 0; a < n_actions; ++a) {
        mdp.set_reward(s, a, rewards[s][a].get<double>());
        std::vector<Successor> succ;
        for (const auto& pair : transitions[s][a])
          succ.push_back({pair.at(0).get<StateIndex>(), pair.at(1).get<double>()});
        mdp.set_transition(s, a, std::move(succ));
      }
    }
    mdp.validate();
    return mdp;
  } catch (const json::exception& e) {
    throw InvalidMdp(std::string("MDP JSON: ") + e.what());
  }
}

}  // namespace pulab
