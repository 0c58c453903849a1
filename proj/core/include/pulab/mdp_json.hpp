#pragma once

#include <string>

#include "pulab/mdp.hpp"

namespace pulab {

// JSON layout:
// {
//   "n_states": S, "n_actions": A, "discount": g,
//   "initial": [p0...], "terminal": [bool...],
//   "rewards": [[r(s,a)...]...],
//   "transitions": [[[[next, prob]...] per action] per state]
// }

/// Serializes with shortest round-trip number formatting (pretty-printed).
std::string mdp_to_json(const FiniteMdp& mdp);

/// Parses and validates; throws InvalidMdp on malformed input.
FiniteMdp mdp_from_json(const std::string& text);

}  // namespace pulab
