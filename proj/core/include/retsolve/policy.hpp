// Feedback policies in the dual variable and the wealth map.
//
// wealth = -(dual value)' and portfolio = (theta/sigma) z (dual value)''
// turn each dual point z into the agent's wealth, consumption and risky
// position. Working-agent maps use the pre-retirement value (dual value
// plus premium) and are defined on z >= z_bar; retired-agent maps use the
// post-retirement dual value on all z > 0.
#pragma once

#include <vector>

#include "retsolve/free_boundary.hpp"

namespace retsolve {

enum class Phase { PreRetirement, PostRetirement };

const char* to_string(Phase phase);

// Optimal consumption: z^(-1/gamma) while working, (z^(-1/gamma) - L)+
// out of pocket when retired (the floor L is consumed on top).
double consumption(const ModelParams& p, Phase phase, double z);

// Wealth carried at dual point z. Throws OutOfRegion for pre-retirement
// z below z_bar (the working agent never holds such states).
double wealth_of_dual(const SolvedModel& m, Phase phase, double z);

// Risky-asset position at dual point z; nonnegative for valid parameters.
double portfolio(const SolvedModel& m, Phase phase, double z);

// Inverse of wealth_of_dual, by bracketed root find on the monotone map.
// Throws WealthOutOfRange outside the reachable wealth interval.
double dual_of_wealth(const SolvedModel& m, Phase phase, double w);

struct PolicyPoint {
  double z = 0;
  double wealth = 0;
  double consumption = 0;
  double portfolio = 0;
  Phase phase = Phase::PreRetirement;
  bool is_threshold = false;
};

struct GridSpec {
  double z_min = 1e-3;
  double z_max = 10.0;
  int n = 200;
};

// Log-spaced policy rows: the threshold row (exactly at z_bar) followed by
// pre-retirement rows above z_bar, then post-retirement rows on the full
// grid. Regimes without a threshold emit pre-retirement rows only.
std::vector<PolicyPoint> policy_table(const SolvedModel& m,
                                      const GridSpec& grid);

}  // namespace retsolve
