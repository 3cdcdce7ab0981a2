// io.hpp -- JSON schemas for distributions and named example sources.
#pragma once

#include <string>

#include "smren/dist.hpp"

namespace smren {

// {"probs": [..]} -> Dist; {"probs": [[..],[..]]} -> JointDist (rows = x).
Dist dist_from_json(const std::string& text);
JointDist joint_from_json(const std::string& text);
bool json_is_joint(const std::string& text);

std::string dist_to_json(const Dist& d);
std::string joint_to_json(const JointDist& j);

// Correlated pair with P{X != Y} = delta on binary alphabets.
JointDist bss(double delta);
// X erased to y = ? with probability delta, otherwise revealed.
JointDist bes(double delta);
// Crossover delta_c and erasure delta_e combined.
JointDist bses(double delta_c, double delta_e);

Dist bernoulli(double p);

}  // namespace smren
