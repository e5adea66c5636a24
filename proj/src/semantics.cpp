#include "pin/semantics.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace pin {

// ---------------------------------------------------------------------------
// Actions and barbs.
// ---------------------------------------------------------------------------

action action::make_tau() { return {action_kind::tau, name(""), name("")}; }
action action::make_input(name subject, name object) {
  return {action_kind::input, std::move(subject), std::move(object)};
}
action action::make_free_output(name subject, name object) {
  return {action_kind::free_output, std::move(subject), std::move(object)};
}
action action::make_bound_output(name subject, name object) {
  return {action_kind::bound_output, std::move(subject), std::move(object)};
}

std::string render_action(const action& a) {
  switch (a.kind) {
    case action_kind::tau: return "tau";
    case action_kind::input: return a.subject.id + "?" + a.object.id;
    case action_kind::free_output: return a.subject.id + "!" + a.object.id;
    case action_kind::bound_output: return a.subject.id + "!(" + a.object.id + ")";
  }
  return "?";
}

name_set action_names(const action& a) {
  if (a.kind == action_kind::tau) return {};
  return {a.subject, a.object};
}

action apply_substitution(const action& a, const substitution& s) {
  if (a.kind == action_kind::tau) return a;
  action out = a;
  out.subject = s(a.subject);
  out.object = s(a.object);
  return out;
}

barb barb_of(const action& a) {
  switch (a.kind) {
    case action_kind::tau: return {barb_kind::tau, name("")};
    case action_kind::input: return {barb_kind::input, a.subject};
    default: return {barb_kind::output, a.subject};
  }
}

std::string render_barb(const barb& b) {
  switch (b.kind) {
    case barb_kind::tau: return "tau";
    case barb_kind::input: return b.subject.id + "?";
    case barb_kind::output: return b.subject.id + "!";
  }
  return "?";
}

std::string render_rule(rule_tag t) {
  switch (t) {
    case rule_tag::out: return "Out";
    case rule_tag::inp: return "Inp";
    case rule_tag::tau_act: return "Tau";
    case rule_tag::mat: return "Mat";
    case rule_tag::sum_l: return "Sum-L";
    case rule_tag::sum_r: return "Sum-R";
    case rule_tag::par_l: return "Par-L";
    case rule_tag::par_r: return "Par-R";
    case rule_tag::comm_l: return "Comm-L";
    case rule_tag::comm_r: return "Comm-R";
    case rule_tag::res_out: return "Res-Out";
    case rule_tag::res_inp: return "Res-Inp";
    case rule_tag::res_tau: return "Res-Tau";
    case rule_tag::open_inp: return "Open-Inp";
    case rule_tag::rep_act: return "Rep-Act";
    case rule_tag::rep_comm: return "Rep-Comm";
  }
  return "?";
}

int compare(const transition& a, const transition& b) {
  if (a.act != b.act) return a.act < b.act ? -1 : 1;
  if (a.prob != b.prob) return a.prob < b.prob ? -1 : 1;
  return compare(a.target, b.target);
}

// ---------------------------------------------------------------------------
// Group plumbing.
// ---------------------------------------------------------------------------

namespace {

int compare_branch(const group_branch& a, const group_branch& b) {
  if (a.act != b.act) return a.act < b.act ? -1 : 1;
  int c = compare(a.target, b.target);
  if (c) return c;
  if (a.prob != b.prob) return a.prob < b.prob ? -1 : 1;
  return 0;
}

// Sorts and merges duplicate (action, target) branches.
std::vector<group_branch> merge_branches(std::vector<group_branch> branches) {
  std::sort(branches.begin(), branches.end(),
            [](const group_branch& a, const group_branch& b) { return compare_branch(a, b) < 0; });
  std::vector<group_branch> out;
  for (auto& br : branches) {
    if (!out.empty() && out.back().act == br.act && equal(out.back().target, br.target))
      out.back().prob += br.prob;
    else
      out.push_back(std::move(br));
  }
  return out;
}

void check_group(const transition_group& g) {
  if (g.branches.empty()) throw std::logic_error("empty transition group");
  rational sum(0);
  barb common = barb_of(g.branches.front().act);
  for (const auto& br : g.branches) {
    sum += br.prob;
    if (barb_of(br.act) != common)
      throw std::logic_error("mixed barbs in transition group from " + render_process(g.source));
  }
  if (sum != rational(1))
    throw std::logic_error("group probabilities sum to " + to_string(sum) + " from " +
                           render_process(g.source));
}

std::string branches_key(const std::vector<group_branch>& branches) {
  std::ostringstream out;
  for (const auto& br : branches)
    out << render_action(br.act) << "#" << to_string(br.prob) << "#" << render_process(br.target)
        << ";";
  return out.str();
}

void add_derivation(transition_group& g, const transition_group& premise) {
  for (const auto& q : premise.derivation_processes) g.derivation_processes.push_back(q);
  for (const auto& n : premise.derivation_output_subjects)
    g.derivation_output_subjects.push_back(n);
  g.used_replication = g.used_replication || premise.used_replication;
}

void finish_derivation(transition_group& g) {
  g.derivation_processes.push_back(g.source);
  std::sort(g.derivation_processes.begin(), g.derivation_processes.end(),
            [](const proc& a, const proc& b) { return compare(a, b) < 0; });
  g.derivation_processes.erase(
      std::unique(g.derivation_processes.begin(), g.derivation_processes.end(),
                  [](const proc& a, const proc& b) { return equal(a, b); }),
      g.derivation_processes.end());
  if (!g.branches.empty() && g.branches.front().act.is_output())
    g.derivation_output_subjects.push_back(g.branches.front().act.subject);
  std::sort(g.derivation_output_subjects.begin(), g.derivation_output_subjects.end());
  g.derivation_output_subjects.erase(
      std::unique(g.derivation_output_subjects.begin(), g.derivation_output_subjects.end()),
      g.derivation_output_subjects.end());
}

struct group_builder {
  const noise_model& nm;

  transition_group make(proc source, std::vector<group_branch> branches, rule_tag tag,
                        std::vector<const transition_group*> premises) {
    transition_group g;
    g.source = std::move(source);
    g.branches = merge_branches(std::move(branches));
    g.tag = tag;
    for (const auto* pr : premises) add_derivation(g, *pr);
    if (tag == rule_tag::rep_act || tag == rule_tag::rep_comm) g.used_replication = true;
    finish_derivation(g);
    check_group(g);
    return g;
  }

  // All groups of p whose visible input objects range over `visible`.
  std::vector<transition_group> groups(const proc& p, const name_set& visible);

  // Input groups of q on channel `ch` receiving exactly `obj`.
  std::vector<transition_group> input_groups_on(const proc& q, const name& ch, const name& obj) {
    std::vector<transition_group> out;
    for (auto& g : groups(q, name_set{obj})) {
      const action& a = g.branches.front().act;
      if (a.kind == action_kind::input && a.subject == ch && a.object == obj)
        out.push_back(std::move(g));
    }
    return out;
  }

  // Enumerates one input-group choice per emitted object and calls fn with
  // the choice map. Communication needs an input derivation for every object
  // of the output group; input capability on a channel provides all of them.
  template <typename Fn>
  void for_each_input_choice(const proc& receiver, const name& ch,
                             const std::vector<name>& objects, Fn&& fn) {
    std::vector<std::vector<transition_group>> options;
    for (const auto& obj : objects) {
      options.push_back(input_groups_on(receiver, ch, obj));
      if (options.back().empty()) return; // receiver cannot input on ch
    }
    std::vector<size_t> pick(objects.size(), 0);
    for (;;) {
      std::vector<const transition_group*> choice;
      for (size_t i = 0; i < objects.size(); ++i) choice.push_back(&options[i][pick[i]]);
      fn(choice);
      size_t i = 0;
      while (i < pick.size()) {
        if (++pick[i] < options[i].size()) break;
        pick[i] = 0;
        ++i;
      }
      if (i == pick.size()) break;
    }
  }
};

std::vector<transition_group> group_builder::groups(const proc& p, const name_set& visible) {
  std::vector<transition_group> out;
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, nil_node>) {
        } else if constexpr (std::is_same_v<T, prefix_node>) {
          bool guarded_through = true;
          for (const auto& g : node.pfx.guards)
            if (g.left != g.right) guarded_through = false;
          if (!guarded_through) return;
          rule_tag tag = node.pfx.guards.empty() ? rule_tag::out : rule_tag::mat;
          if (const auto* o = std::get_if<output_core>(&node.pfx.core)) {
            std::vector<group_branch> branches;
            for (const auto& [received, prob] : nm.row(o->channel, o->datum).support)
              branches.push_back({action::make_free_output(o->channel, received), prob, node.body});
            out.push_back(make(p, std::move(branches), tag, {}));
          } else if (const auto* i = std::get_if<input_core>(&node.pfx.core)) {
            rule_tag itag = node.pfx.guards.empty() ? rule_tag::inp : rule_tag::mat;
            for (const auto& y : visible) {
              proc target = apply_substitution(node.body, substitution::single(i->binder, y));
              out.push_back(make(
                  p, {{action::make_input(i->channel, y), rational(1), std::move(target)}}, itag,
                  {}));
            }
          } else {
            rule_tag ttag = node.pfx.guards.empty() ? rule_tag::tau_act : rule_tag::mat;
            out.push_back(make(p, {{action::make_tau(), rational(1), node.body}}, ttag, {}));
          }
        } else if constexpr (std::is_same_v<T, sum_node>) {
          for (auto& g : groups(node.left, visible))
            out.push_back(make(p, g.branches, rule_tag::sum_l, {&g}));
          for (auto& g : groups(node.right, visible))
            out.push_back(make(p, g.branches, rule_tag::sum_r, {&g}));
        } else if constexpr (std::is_same_v<T, par_node>) {
          // Parallel composition is treated as n-ary so that the groups do
          // not depend on association. In particular, the restriction closed
          // over a bound-output communication wraps exactly the two
          // communicating components; bystanders stay outside it.
          std::vector<proc> comps = par_components(p);
          auto reassemble = [](const std::vector<proc>& parts) {
            proc acc = parts.front();
            for (size_t i = 1; i < parts.size(); ++i) acc = make_par(acc, parts[i]);
            return acc;
          };
          std::vector<std::vector<transition_group>> comp_groups;
          for (const auto& c : comps) comp_groups.push_back(groups(c, visible));
          for (size_t i = 0; i < comps.size(); ++i) {
            for (const auto& g : comp_groups[i]) {
              std::vector<group_branch> branches;
              for (const auto& br : g.branches) {
                std::vector<proc> parts = comps;
                parts[i] = br.target;
                branches.push_back({br.act, br.prob, reassemble(parts)});
              }
              out.push_back(make(p, std::move(branches),
                                 i == 0 ? rule_tag::par_l : rule_tag::par_r, {&g}));
            }
          }
          for (size_t i = 0; i < comps.size(); ++i) {
            for (size_t j = 0; j < comps.size(); ++j) {
              if (i == j) continue;
              for (const auto& g : comp_groups[i]) {
                if (!g.branches.front().act.is_output()) continue;
                const name ch = g.branches.front().act.subject;
                std::vector<name> objects;
                for (const auto& br : g.branches) objects.push_back(br.act.object);
                for_each_input_choice(comps[j], ch, objects, [&](const auto& choice) {
                  std::vector<group_branch> branches;
                  std::vector<const transition_group*> premises{&g};
                  for (size_t k = 0; k < g.branches.size(); ++k) {
                    const auto& br = g.branches[k];
                    const proc& received = choice[k]->branches.front().target;
                    premises.push_back(choice[k]);
                    proc pair = i < j ? make_par(br.target, received)
                                      : make_par(received, br.target);
                    if (br.act.kind == action_kind::bound_output)
                      pair = make_nu(br.act.object, std::move(pair));
                    std::vector<proc> parts;
                    for (size_t m = 0; m < comps.size(); ++m) {
                      if (m == j) continue;
                      parts.push_back(m == i ? pair : comps[m]);
                    }
                    branches.push_back({action::make_tau(), br.prob, reassemble(parts)});
                  }
                  out.push_back(make(p, std::move(branches),
                                     i < j ? rule_tag::comm_l : rule_tag::comm_r, premises));
                });
              }
            }
          }
        } else if constexpr (std::is_same_v<T, nu_node>) {
          const name& z = node.binder;
          name_set inner_visible = visible;
          inner_visible.insert(z); // Open-Inp can always input the restricted name
          for (const auto& g : groups(node.body, inner_visible)) {
            const action& head = g.branches.front().act;
            switch (head.kind) {
              case action_kind::tau: {
                std::vector<group_branch> branches;
                for (const auto& br : g.branches)
                  branches.push_back({br.act, br.prob, make_nu(z, br.target)});
                out.push_back(make(p, std::move(branches), rule_tag::res_tau, {&g}));
                break;
              }
              case action_kind::input: {
                if (head.subject == z) break; // channel blocked
                if (head.object == z) {
                  if (!visible.count(z)) break; // not an instantiation we expose
                  // Open-Inp: the restriction is discharged.
                  out.push_back(make(p, g.branches, rule_tag::open_inp, {&g}));
                } else {
                  std::vector<group_branch> branches;
                  for (const auto& br : g.branches)
                    branches.push_back({br.act, br.prob, make_nu(z, br.target)});
                  out.push_back(make(p, std::move(branches), rule_tag::res_inp, {&g}));
                }
                break;
              }
              default: {
                if (head.subject == z) break; // channel blocked
                std::vector<group_branch> branches;
                for (const auto& br : g.branches) {
                  if (br.act.object == z)
                    // The branch emitting the restricted name turns into a
                    // bound output; its continuation escapes the restriction.
                    branches.push_back(
                        {action::make_bound_output(br.act.subject, z), br.prob, br.target});
                  else
                    branches.push_back({br.act, br.prob, make_nu(z, br.target)});
                }
                out.push_back(make(p, std::move(branches), rule_tag::res_out, {&g}));
                break;
              }
            }
          }
        } else { // bang
          auto inner = groups(node.body, visible);
          for (const auto& g : inner) {
            std::vector<group_branch> branches;
            for (const auto& br : g.branches)
              branches.push_back({br.act, br.prob, make_par(br.target, p)});
            out.push_back(make(p, std::move(branches), rule_tag::rep_act, {&g}));
          }
          for (const auto& g : inner) {
            if (!g.branches.front().act.is_output()) continue;
            const name ch = g.branches.front().act.subject;
            std::vector<name> objects;
            for (const auto& br : g.branches) objects.push_back(br.act.object);
            for_each_input_choice(node.body, ch, objects, [&](const auto& choice) {
              std::vector<group_branch> branches;
              std::vector<const transition_group*> premises{&g};
              for (size_t i = 0; i < g.branches.size(); ++i) {
                const auto& br = g.branches[i];
                const proc& received = choice[i]->branches.front().target;
                premises.push_back(choice[i]);
                proc pair = make_par(br.target, received);
                proc target = br.act.kind == action_kind::bound_output
                                  ? make_par(make_nu(br.act.object, std::move(pair)), p)
                                  : make_par(std::move(pair), p);
                branches.push_back({action::make_tau(), br.prob, std::move(target)});
              }
              out.push_back(make(p, std::move(branches), rule_tag::rep_comm, premises));
            });
          }
        }
      },
      p->node);
  return out;
}

std::vector<transition_group> dedup_and_sort(std::vector<transition_group> groups) {
  std::sort(groups.begin(), groups.end(), [](const transition_group& a, const transition_group& b) {
    barb ba = barb_of(a.branches.front().act), bb = barb_of(b.branches.front().act);
    if (ba != bb) return ba < bb;
    std::string ka = branches_key(a.branches), kb = branches_key(b.branches);
    if (ka != kb) return ka < kb;
    return a.tag < b.tag;
  });
  std::vector<transition_group> out;
  for (auto& g : groups) {
    if (!out.empty() && branches_key(out.back().branches) == branches_key(g.branches)) continue;
    out.push_back(std::move(g));
  }
  return out;
}

} // namespace

std::vector<transition_group> transition_groups(const proc& p, const noise_model& nm,
                                                const name_set& inst) {
  group_builder b{nm};
  return dedup_and_sort(b.groups(p, inst));
}

std::vector<group_branch> group_union(const std::vector<group_branch>& g1,
                                      const std::vector<group_branch>& g2) {
  if (!g1.empty() && !g2.empty() &&
      barb_of(g1.front().act) != barb_of(g2.front().act))
    throw std::logic_error("group_union: operands carry different barbs");
  std::vector<group_branch> all = g1;
  all.insert(all.end(), g2.begin(), g2.end());
  return merge_branches(std::move(all));
}

barb barb_of_group(const transition_group& g) {
  if (g.branches.empty()) throw std::logic_error("barb of empty group");
  barb common = barb_of(g.branches.front().act);
  for (const auto& br : g.branches)
    if (barb_of(br.act) != common) throw std::logic_error("mixed barbs in group");
  return common;
}

std::set<barb> observables(const proc& p, const noise_model& nm, const name_set& inst) {
  std::set<barb> out;
  for (const auto& g : transition_groups(p, nm, inst)) {
    barb b = barb_of_group(g);
    if (b.kind != barb_kind::tau) out.insert(b);
  }
  return out;
}

transition_group substituted_group(const transition_group& g, const substitution& s,
                                   const noise_model& nm) {
  for (const auto& q : g.derivation_processes) {
    if (!is_consistent(s, q, nm))
      throw std::invalid_argument(
          "substitution " + s.render() +
          " is not consistent with the weakly bound names of " + render_process(q));
  }
  for (const auto& x : g.derivation_output_subjects) {
    if (!is_compatible(s, x, nm))
      throw std::invalid_argument("substitution " + s.render() +
                                  " is not compatible with channel " + x.id);
  }
  transition_group out;
  out.source = apply_substitution(g.source, s);
  std::vector<group_branch> branches;
  for (const auto& br : g.branches)
    branches.push_back(
        {apply_substitution(br.act, s), br.prob, apply_substitution(br.target, s)});
  out.branches = merge_branches(std::move(branches));
  out.tag = g.tag;
  out.used_replication = g.used_replication;
  for (const auto& q : g.derivation_processes)
    out.derivation_processes.push_back(apply_substitution(q, s));
  for (const auto& x : g.derivation_output_subjects)
    out.derivation_output_subjects.push_back(s(x));
  check_group(out);
  return out;
}

std::string render_group(const transition_group& g) {
  std::ostringstream out;
  out << "group " << render_barb(barb_of_group(g)) << " { ";
  bool first = true;
  for (const auto& br : g.branches) {
    if (!first) out << " ; ";
    out << render_action(br.act) << " : " << to_string(br.prob) << " -> "
        << render_process(br.target);
    first = false;
  }
  out << " } [rule=" << render_rule(g.tag) << "]";
  return out.str();
}

name_set default_instantiation(const std::vector<proc>& roots, const noise_model& nm) {
  name_set inst;
  name_set avoid = nm.mentioned_names();
  for (const auto& r : roots) {
    auto fs = noisy_free_names(r, nm);
    inst.insert(fs.begin(), fs.end());
    auto fn = free_names(r);
    inst.insert(fn.begin(), fn.end());
    // Open-Inp objects: inputs of weakly bound names are not represented by
    // a fresh name the way free-name inputs are, so expose them explicitly.
    auto wbn = weakly_bound_names(r);
    inst.insert(wbn.begin(), wbn.end());
    auto names = all_names(r);
    avoid.insert(names.begin(), names.end());
  }
  avoid.insert(inst.begin(), inst.end());
  inst.insert(fresh_name(avoid));
  return inst;
}

// ---------------------------------------------------------------------------
// Single early transitions. Derived independently of the group
// rules; the two presentations are cross-checked by tests.
// ---------------------------------------------------------------------------

namespace {

struct early_builder {
  const noise_model& nm;

  std::vector<transition> step(const proc& p, const name_set& visible) {
    std::vector<transition> out;
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, nil_node>) {
          } else if constexpr (std::is_same_v<T, prefix_node>) {
            for (const auto& g : node.pfx.guards)
              if (g.left != g.right) return;
            if (const auto* o = std::get_if<output_core>(&node.pfx.core)) {
              for (const auto& [received, prob] : nm.row(o->channel, o->datum).support)
                out.push_back({action::make_free_output(o->channel, received), prob, node.body});
            } else if (const auto* i = std::get_if<input_core>(&node.pfx.core)) {
              for (const auto& y : visible)
                out.push_back({action::make_input(i->channel, y), rational(1),
                               apply_substitution(node.body, substitution::single(i->binder, y))});
            } else {
              out.push_back({action::make_tau(), rational(1), node.body});
            }
          } else if constexpr (std::is_same_v<T, sum_node>) {
            for (auto& t : step(node.left, visible)) out.push_back(std::move(t));
            for (auto& t : step(node.right, visible)) out.push_back(std::move(t));
          } else if constexpr (std::is_same_v<T, par_node>) {
            // n-ary, association-independent; the closing restriction wraps
            // only the communicating pair (matches the grouped presentation).
            std::vector<proc> comps = par_components(p);
            auto reassemble = [](const std::vector<proc>& parts) {
              proc acc = parts.front();
              for (size_t i = 1; i < parts.size(); ++i) acc = make_par(acc, parts[i]);
              return acc;
            };
            std::vector<std::vector<transition>> comp_steps;
            for (const auto& c : comps) comp_steps.push_back(step(c, visible));
            for (size_t i = 0; i < comps.size(); ++i) {
              for (const auto& t : comp_steps[i]) {
                std::vector<proc> parts = comps;
                parts[i] = t.target;
                out.push_back({t.act, t.prob, reassemble(parts)});
              }
            }
            for (size_t i = 0; i < comps.size(); ++i) {
              for (size_t j = 0; j < comps.size(); ++j) {
                if (i == j) continue;
                for (const auto& e : comp_steps[i]) {
                  if (e.act.kind != action_kind::free_output &&
                      e.act.kind != action_kind::bound_output)
                    continue;
                  for (const auto& r : step(comps[j], name_set{e.act.object})) {
                    if (r.act.kind != action_kind::input || r.act.subject != e.act.subject ||
                        r.act.object != e.act.object)
                      continue;
                    proc pair = i < j ? make_par(e.target, r.target)
                                      : make_par(r.target, e.target);
                    if (e.act.kind == action_kind::bound_output)
                      pair = make_nu(e.act.object, std::move(pair));
                    std::vector<proc> parts;
                    for (size_t m = 0; m < comps.size(); ++m) {
                      if (m == j) continue;
                      parts.push_back(m == i ? pair : comps[m]);
                    }
                    out.push_back({action::make_tau(), e.prob, reassemble(parts)});
                  }
                }
              }
            }
          } else if constexpr (std::is_same_v<T, nu_node>) {
            const name& z = node.binder;
            name_set inner_visible = visible;
            inner_visible.insert(z);
            for (const auto& t : step(node.body, inner_visible)) {
              switch (t.act.kind) {
                case action_kind::tau:
                  out.push_back({t.act, t.prob, make_nu(z, t.target)});
                  break;
                case action_kind::input:
                  if (t.act.subject == z) break;
                  if (t.act.object == z) {
                    if (visible.count(z)) out.push_back({t.act, t.prob, t.target}); // Open-Inp
                  } else {
                    out.push_back({t.act, t.prob, make_nu(z, t.target)});
                  }
                  break;
                case action_kind::free_output:
                  if (t.act.subject == z) break;
                  if (t.act.object == z)
                    out.push_back(
                        {action::make_bound_output(t.act.subject, z), t.prob, t.target}); // Open
                  else
                    out.push_back({t.act, t.prob, make_nu(z, t.target)});
                  break;
                case action_kind::bound_output:
                  if (t.act.subject == z) break;
                  if (t.act.object == z)
                    // Mirrors the grouped Res-Out: a duplicate restriction on
                    // an already-bound object is discharged.
                    out.push_back({t.act, t.prob, t.target});
                  else
                    out.push_back({t.act, t.prob, make_nu(z, t.target)});
                  break;
              }
            }
          } else { // bang
            auto inner = step(node.body, visible);
            for (const auto& t : inner)
              out.push_back({t.act, t.prob, make_par(t.target, p)});
            for (const auto& e : inner) {
              if (e.act.kind != action_kind::free_output &&
                  e.act.kind != action_kind::bound_output)
                continue;
              for (const auto& r : step(node.body, name_set{e.act.object})) {
                if (r.act.kind != action_kind::input || r.act.subject != e.act.subject ||
                    r.act.object != e.act.object)
                  continue;
                if (e.act.kind == action_kind::free_output)
                  out.push_back({action::make_tau(), e.prob,
                                 make_par(make_par(e.target, r.target), p)}); // Rep-Comm
                else
                  out.push_back({action::make_tau(), e.prob,
                                 make_par(make_nu(e.act.object, make_par(e.target, r.target)),
                                          p)}); // Rep-Close
              }
            }
          }
        },
        p->node);
    return out;
  }
};

} // namespace

std::vector<transition> early_transitions(const proc& p, const noise_model& nm,
                                          const name_set& inst) {
  early_builder b{nm};
  auto out = b.step(p, inst);
  std::sort(out.begin(), out.end(),
            [](const transition& a, const transition& b) { return compare(a, b) < 0; });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const transition& a, const transition& b) { return compare(a, b) == 0; }),
            out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Late semantics (kept strict: Par keeps its side condition and
// Close requires the input binder to coincide with the opened name).
// ---------------------------------------------------------------------------

std::string render_late_action(const late_action& a) {
  switch (a.kind) {
    case late_action_kind::tau: return "tau";
    case late_action_kind::input: return a.subject.id + "(" + a.object.id + ")";
    case late_action_kind::free_output: return a.subject.id + "!" + a.object.id;
    case late_action_kind::bound_output: return a.subject.id + "!(" + a.object.id + ")";
  }
  return "?";
}

int compare(const late_transition& a, const late_transition& b) {
  if (a.act != b.act) return a.act < b.act ? -1 : 1;
  if (a.prob != b.prob) return a.prob < b.prob ? -1 : 1;
  return compare(a.target, b.target);
}

namespace {

name_set late_bound_names(const late_action& a) {
  if (a.kind == late_action_kind::input || a.kind == late_action_kind::bound_output)
    return {a.object};
  return {};
}

name_set late_names(const late_action& a) {
  if (a.kind == late_action_kind::tau) return {};
  return {a.subject, a.object};
}

struct late_builder {
  const noise_model& nm;

  std::vector<late_transition> step(const proc& p) {
    std::vector<late_transition> out;
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, nil_node>) {
          } else if constexpr (std::is_same_v<T, prefix_node>) {
            for (const auto& g : node.pfx.guards)
              if (g.left != g.right) return;
            if (const auto* o = std::get_if<output_core>(&node.pfx.core)) {
              for (const auto& [received, prob] : nm.row(o->channel, o->datum).support)
                out.push_back({{late_action_kind::free_output, o->channel, received}, prob,
                               node.body});
            } else if (const auto* i = std::get_if<input_core>(&node.pfx.core)) {
              out.push_back(
                  {{late_action_kind::input, i->channel, i->binder}, rational(1), node.body});
            } else {
              out.push_back({{late_action_kind::tau, name(""), name("")}, rational(1), node.body});
            }
          } else if constexpr (std::is_same_v<T, sum_node>) {
            for (auto& t : step(node.left)) out.push_back(std::move(t));
            for (auto& t : step(node.right)) out.push_back(std::move(t));
          } else if constexpr (std::is_same_v<T, par_node>) {
            auto left = step(node.left);
            auto right = step(node.right);
            auto side_ok = [](const late_transition& t, const proc& other) {
              auto bn = late_bound_names(t.act);
              if (bn.empty()) return true;
              auto fn = free_names(other);
              for (const auto& n : bn)
                if (fn.count(n)) return false;
              return true;
            };
            for (const auto& t : left)
              if (side_ok(t, node.right))
                out.push_back({t.act, t.prob, make_par(t.target, node.right)});
            for (const auto& t : right)
              if (side_ok(t, node.left))
                out.push_back({t.act, t.prob, make_par(node.left, t.target)});
            auto comm = [&](const std::vector<late_transition>& emitters,
                            const std::vector<late_transition>& receivers, bool left_emits) {
              for (const auto& e : emitters) {
                for (const auto& r : receivers) {
                  if (r.act.kind != late_action_kind::input || r.act.subject != e.act.subject)
                    continue;
                  if (e.act.kind == late_action_kind::free_output) {
                    proc received = apply_substitution(
                        r.target, substitution::single(r.act.object, e.act.object));
                    proc target = left_emits ? make_par(e.target, received)
                                             : make_par(received, e.target);
                    out.push_back(
                        {{late_action_kind::tau, name(""), name("")}, e.prob, std::move(target)});
                  } else if (e.act.kind == late_action_kind::bound_output &&
                             e.act.object == r.act.object) {
                    proc target = left_emits ? make_par(e.target, r.target)
                                             : make_par(r.target, e.target);
                    out.push_back({{late_action_kind::tau, name(""), name("")}, e.prob,
                                   make_nu(e.act.object, std::move(target))});
                  }
                }
              }
            };
            comm(left, right, true);
            comm(right, left, false);
          } else if constexpr (std::is_same_v<T, nu_node>) {
            const name& z = node.binder;
            for (const auto& t : step(node.body)) {
              if (t.act.kind == late_action_kind::free_output && t.act.object == z &&
                  t.act.subject != z) {
                out.push_back(
                    {{late_action_kind::bound_output, t.act.subject, z}, t.prob, t.target});
                continue;
              }
              if (!late_names(t.act).count(z))
                out.push_back({t.act, t.prob, make_nu(z, t.target)});
            }
          } else { // bang
            auto inner = step(node.body);
            for (const auto& t : inner)
              out.push_back({t.act, t.prob, make_par(t.target, p)});
            for (const auto& e : inner) {
              for (const auto& r : inner) {
                if (r.act.kind != late_action_kind::input || r.act.subject != e.act.subject)
                  continue;
                if (e.act.kind == late_action_kind::free_output) {
                  proc received = apply_substitution(
                      r.target, substitution::single(r.act.object, e.act.object));
                  out.push_back({{late_action_kind::tau, name(""), name("")}, e.prob,
                                 make_par(make_par(e.target, received), p)});
                } else if (e.act.kind == late_action_kind::bound_output &&
                           e.act.object == r.act.object) {
                  out.push_back({{late_action_kind::tau, name(""), name("")}, e.prob,
                                 make_par(make_nu(e.act.object, make_par(e.target, r.target)), p)});
                }
              }
            }
          }
        },
        p->node);
    return out;
  }
};

} // namespace

std::vector<late_transition> late_transitions(const proc& p, const noise_model& nm) {
  late_builder b{nm};
  auto out = b.step(p);
  std::sort(out.begin(), out.end(), [](const late_transition& a, const late_transition& b) {
    return compare(a, b) < 0;
  });
  out.erase(
      std::unique(out.begin(), out.end(),
                  [](const late_transition& a, const late_transition& b) {
                    return compare(a, b) == 0;
                  }),
      out.end());
  return out;
}

} // namespace pin
