#include "pin/lts.hpp"

#include <deque>
#include <sstream>
#include <unordered_map>

namespace pin {

plts build_plts(const std::vector<proc>& roots, const noise_model& nm,
                const plts_options& options) {
  plts l;
  l.noise = nm;
  l.inst = options.inst_override ? *options.inst_override : default_instantiation(roots, nm);

  std::unordered_map<std::string, int> index_of;
  auto intern = [&](const proc& raw, int unfold_depth) -> int {
    proc canonical = rigid_normal_form(raw, nm);
    std::string key = render_process(canonical);
    auto it = index_of.find(key);
    if (it != index_of.end()) return it->second;
    int idx = l.state_count();
    index_of.emplace(std::move(key), idx);
    plts_state st;
    st.term = std::move(canonical);
    st.unfold_depth = unfold_depth;
    l.states.push_back(std::move(st));
    return idx;
  };

  for (const auto& r : roots) l.initials.push_back(intern(r, 0));

  std::deque<int> work;
  std::vector<bool> expanded(l.states.size(), false);
  for (int i = 0; i < l.state_count(); ++i) work.push_back(i);

  while (!work.empty()) {
    int idx = work.front();
    work.pop_front();
    if (static_cast<size_t>(idx) < expanded.size() && expanded[idx]) continue;
    if (static_cast<size_t>(idx) >= expanded.size()) expanded.resize(l.states.size(), false);
    expanded[idx] = true;

    const int depth = l.states[idx].unfold_depth;
    auto groups = transition_groups(l.states[idx].term, nm, l.inst);
    std::vector<plts_group> stored;
    bool truncated = false;
    for (const auto& g : groups) {
      if (g.used_replication && depth >= options.rep_budget) {
        truncated = true; // deeper unfolding omitted
        continue;
      }
      int target_depth = depth + (g.used_replication ? 1 : 0);
      plts_group pg;
      pg.tag = g.tag;
      bool dropped = false;
      for (const auto& br : g.branches) {
        proc canonical = rigid_normal_form(br.target, nm);
        std::string key = render_process(canonical);
        auto it = index_of.find(key);
        if (it == index_of.end() && l.state_count() >= options.max_states) {
          dropped = true; // state budget exhausted
          break;
        }
        int t;
        if (it == index_of.end()) {
          t = intern(br.target, target_depth);
          expanded.resize(l.states.size(), false);
          work.push_back(t);
        } else {
          t = it->second;
          // A shorter replication path re-opens a state truncated on budget.
          if (target_depth < l.states[t].unfold_depth) {
            l.states[t].unfold_depth = target_depth;
            if (expanded[t]) {
              expanded[t] = false;
              l.states[t].groups.clear();
              l.states[t].truncated = false;
              work.push_back(t);
            }
          }
        }
        pg.branches.push_back({br.act, br.prob, t});
      }
      if (dropped) {
        truncated = true;
        continue;
      }
      stored.push_back(std::move(pg));
    }
    l.states[idx].groups = std::move(stored);
    l.states[idx].truncated = truncated;
    if (truncated) l.any_truncated = true;
  }

  l.any_truncated = false;
  for (const auto& st : l.states)
    if (st.truncated) l.any_truncated = true;
  return l;
}

plts_stats_record plts_stats(const plts& l) {
  plts_stats_record r;
  r.states = l.state_count();
  for (const auto& st : l.states) {
    r.groups += static_cast<int>(st.groups.size());
    for (const auto& g : st.groups) r.branches += static_cast<int>(g.branches.size());
    if (st.truncated) ++r.truncated_states;
  }
  return r;
}

std::string render_plts(const plts& l) {
  plts_stats_record s = plts_stats(l);
  std::ostringstream out;
  out << "plts states=" << s.states << " groups=" << s.groups << " inst=" << render_names(l.inst)
      << "\n";
  for (int i = 0; i < l.state_count(); ++i) {
    const auto& st = l.states[i];
    out << "state " << i << ": " << render_process(st.term);
    if (st.truncated) out << " [truncated]";
    out << "\n";
    for (const auto& g : st.groups) {
      barb b = barb_of(g.branches.front().act);
      out << "  group " << render_barb(b) << " { ";
      bool first = true;
      for (const auto& br : g.branches) {
        if (!first) out << " ; ";
        out << render_action(br.act) << " : " << to_string(br.prob) << " -> " << br.target;
        first = false;
      }
      out << " } [rule=" << render_rule(g.tag) << "]\n";
    }
  }
  return out.str();
}

} // namespace pin
