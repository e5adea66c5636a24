#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pin/semantics.hpp"

namespace pin {

struct plts_options {
  std::optional<name_set> inst_override;
  int rep_budget = 2;     // replication unfoldings allowed along a path
  int max_states = 10000; // exploration cap; exceeding it truncates
};

struct plts_branch {
  action act;
  rational prob;
  int target = -1;
};

struct plts_group {
  std::vector<plts_branch> branches;
  rule_tag tag = rule_tag::out;
};

struct plts_state {
  proc term; // rigid normal form; state identity is normal-form equality
  std::vector<plts_group> groups;
  bool truncated = false; // some groups were omitted (budget or state cap)
  int unfold_depth = 0;   // replication unfoldings used to reach this state
};

// Finite reachable probabilistic LTS of one or more root processes, closed
// under transition groups.
struct plts {
  std::vector<plts_state> states;
  std::vector<int> initials;
  name_set inst;
  noise_model noise;
  bool any_truncated = false;

  int state_count() const { return static_cast<int>(states.size()); }
};

plts build_plts(const std::vector<proc>& roots, const noise_model& nm,
                const plts_options& options = {});

struct plts_stats_record {
  int states = 0;
  int groups = 0;
  int branches = 0;
  int truncated_states = 0;
};
plts_stats_record plts_stats(const plts& l);

std::string render_plts(const plts& l);

} // namespace pin
