#include "pin/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pin/parse.hpp"
#include "pin/demos.hpp"

namespace pin::cli {

namespace {

constexpr int exit_ok = 0;
constexpr int exit_not_equivalent = 1;
constexpr int exit_usage = 2;
constexpr int exit_inconclusive = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Process arguments are literals, or @file references.
proc load_process(const std::string& arg) {
  if (!arg.empty() && arg[0] == '@') return parse_process(read_file(arg.substr(1)));
  return parse_process(arg);
}

name_set parse_name_list(const std::string& csv) {
  name_set out;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.insert(name(item));
  }
  return out;
}

struct common_options {
  std::string noise_file;
  std::string inst_csv;
  int rep_budget = 2;
  int max_states = 10000;
  bool json = false;

  noise_model noise(std::ostream& err) const {
    if (noise_file.empty()) return noise_model{};
    noise_model nm = load_noise_model(read_file(noise_file));
    // With p_x(y|y) = 0 the sent name never arrives, and fn* loses a free
    // name; legal, but worth a diagnostic.
    for (const auto& [channel, input] : nm.rows_dropping_input())
      err << "note: channel " << channel.id << " drops its input " << input.id
          << " (p(" << input.id << "|" << input.id << ") = 0)\n";
    return nm;
  }
  std::optional<name_set> inst() const {
    if (inst_csv.empty()) return std::nullopt;
    return parse_name_list(inst_csv);
  }
};

void add_common(CLI::App* cmd, common_options& opts, bool with_inst = true) {
  cmd->add_option("-n,--noise", opts.noise_file, "noise model file (default: noiseless)");
  if (with_inst)
    cmd->add_option("--inst", opts.inst_csv, "comma-separated input instantiation names");
  cmd->add_option("--rep-budget", opts.rep_budget, "replication unfolding budget");
  cmd->add_option("--max-states", opts.max_states, "state exploration cap");
  cmd->add_flag("--json", opts.json, "machine-readable output");
}

nlohmann::json verdict_json(const std::string& relation, const verdict& v) {
  nlohmann::json j;
  j["relation"] = relation;
  switch (v.status) {
    case verdict_status::equivalent: j["status"] = "equivalent"; break;
    case verdict_status::not_equivalent: j["status"] = "not-equivalent"; break;
    case verdict_status::equivalent_up_to_family: j["status"] = "equivalent-up-to-family"; break;
  }
  j["truncated"] = v.truncated;
  if (v.level) j["level"] = *v.level;
  if (v.witness_action) j["witness_action"] = render_action(*v.witness_action);
  if (v.witness_tester) j["witness_tester"] = render_process(*v.witness_tester);
  if (v.witness_context) j["witness_context"] = render_context(*v.witness_context);
  if (v.witness_substitution) j["witness_substitution"] = v.witness_substitution->render();
  return j;
}

int verdict_exit(const verdict& v) {
  if (v.status == verdict_status::not_equivalent) return exit_not_equivalent;
  return v.truncated ? exit_inconclusive : exit_ok;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"pin - a workbench for the pi-calculus with noisy channels"};
  app.require_subcommand(1);

  // parse
  auto* cmd_parse = app.add_subcommand("parse", "parse a process and echo its canonical form");
  std::string parse_text;
  cmd_parse->add_option("process", parse_text, "process literal or @file")->required();

  // step
  auto* cmd_step = app.add_subcommand("step", "print the transition groups of a process");
  common_options step_opts;
  std::string step_text;
  bool step_late = false;
  cmd_step->add_option("process", step_text, "process literal or @file")->required();
  cmd_step->add_flag("--late", step_late, "single late transitions instead of groups");
  add_common(cmd_step, step_opts);

  // lts
  auto* cmd_lts = app.add_subcommand("lts", "build and dump the reachable system");
  common_options lts_opts;
  std::vector<std::string> lts_texts;
  cmd_lts->add_option("process", lts_texts, "root processes")->required();
  add_common(cmd_lts, lts_opts);

  // check
  auto* cmd_check = app.add_subcommand("check", "decide an equivalence for two processes");
  common_options check_opts;
  std::string relation;
  int depth = 2;
  std::vector<std::string> check_texts;
  cmd_check->add_option("--relation", relation, "reduction|barbed|barbed-equiv|barbed-cong|bisim|full-bisim")
      ->required();
  cmd_check->add_option("--depth", depth, "context/tester family depth");
  cmd_check->add_option("process", check_texts, "two processes")->expected(2);
  add_common(cmd_check, check_opts);

  // hierarchy
  auto* cmd_hier = app.add_subcommand("hierarchy", "run all six checks and print the hierarchy");
  common_options hier_opts;
  int hier_depth = 2;
  std::vector<std::string> hier_texts;
  cmd_hier->add_option("--depth", hier_depth, "context family depth");
  cmd_hier->add_option("process", hier_texts, "two processes")->expected(2);
  add_common(cmd_hier, hier_opts);

  // demo
  auto* cmd_demo = app.add_subcommand("demo", "run the bundled counter-example suite");
  bool demo_list_only = false;
  cmd_demo->add_flag("--list", demo_list_only, "list demo ids without executing");

  try {
    std::vector<std::string> argv = args;
    std::reverse(argv.begin(), argv.end());
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return exit_ok;
    }
    err << "usage error: " << e.what() << "\n";
    return exit_usage;
  }

  try {
    if (cmd_parse->parsed()) {
      out << render_process(load_process(parse_text)) << "\n";
      return exit_ok;
    }

    if (cmd_step->parsed()) {
      noise_model nm = step_opts.noise(err);
      proc p = load_process(step_text);
      if (step_late) {
        for (const auto& t : late_transitions(p, nm))
          out << render_late_action(t.act) << " : " << to_string(t.prob) << " -> "
              << render_process(t.target) << "\n";
        return exit_ok;
      }
      name_set inst = step_opts.inst() ? *step_opts.inst() : default_instantiation({p}, nm);
      auto groups = transition_groups(p, nm, inst);
      if (step_opts.json) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& g : groups) {
          nlohmann::json jg;
          jg["barb"] = render_barb(barb_of_group(g));
          jg["rule"] = render_rule(g.tag);
          jg["branches"] = nlohmann::json::array();
          for (const auto& br : g.branches)
            jg["branches"].push_back({{"action", render_action(br.act)},
                                      {"probability", to_string(br.prob)},
                                      {"target", render_process(br.target)}});
          j.push_back(jg);
        }
        out << j.dump(2) << "\n";
      } else {
        for (const auto& g : groups) out << render_group(g) << "\n";
      }
      return exit_ok;
    }

    if (cmd_lts->parsed()) {
      noise_model nm = lts_opts.noise(err);
      std::vector<proc> roots;
      for (const auto& t : lts_texts) roots.push_back(load_process(t));
      plts_options po;
      po.inst_override = lts_opts.inst();
      po.rep_budget = lts_opts.rep_budget;
      po.max_states = lts_opts.max_states;
      plts l = build_plts(roots, nm, po);
      out << render_plts(l);
      return l.any_truncated ? exit_inconclusive : exit_ok;
    }

    if (cmd_check->parsed()) {
      noise_model nm = check_opts.noise(err);
      proc p = load_process(check_texts[0]);
      proc q = load_process(check_texts[1]);
      bound_options limits{check_opts.rep_budget, check_opts.max_states};
      plts_options po;
      po.inst_override = check_opts.inst();
      po.rep_budget = check_opts.rep_budget;
      po.max_states = check_opts.max_states;

      verdict v;
      if (relation == "reduction" || relation == "barbed" || relation == "bisim") {
        plts l = build_plts({p, q}, nm, po);
        if (relation == "reduction")
          v = reduction_bisimilar(l, l.initials[0], l.initials[1]);
        else if (relation == "barbed")
          v = barbed_bisimilar(l, l.initials[0], l.initials[1]);
        else
          v = bisimilar(l, l.initials[0], l.initials[1]);
      } else if (relation == "barbed-equiv") {
        auto testers = default_testers(default_equivalence_ingredients(p, q, nm));
        v = barbed_equivalent_bounded(p, q, nm, testers, limits);
      } else if (relation == "barbed-cong") {
        auto contexts = generate_contexts(default_equivalence_ingredients(p, q, nm), depth);
        v = barbed_congruent_bounded(p, q, nm, contexts, limits);
      } else if (relation == "full-bisim") {
        v = full_bisimilar_bounded(p, q, nm, default_substitution_universe(p, q), limits);
      } else {
        err << "unknown relation: " << relation << "\n";
        return exit_usage;
      }
      if (check_opts.json)
        out << verdict_json(relation, v).dump(2) << "\n";
      else
        out << render_verdict(relation, v) << "\n";
      return verdict_exit(v);
    }

    if (cmd_hier->parsed()) {
      noise_model nm = hier_opts.noise(err);
      proc p = load_process(hier_texts[0]);
      proc q = load_process(hier_texts[1]);
      hierarchy_bounds bounds;
      bounds.context_depth = hier_depth;
      bounds.limits = bound_options{hier_opts.rep_budget, hier_opts.max_states};
      hierarchy_result r = hierarchy_report(p, q, nm, bounds);
      if (hier_opts.json) {
        nlohmann::json j;
        j["rows"] = nlohmann::json::array();
        for (const auto& row : r.rows) j["rows"].push_back(verdict_json(row.relation, row.v));
        j["arrows_consistent"] = r.arrows_consistent;
        out << j.dump(2) << "\n";
      } else {
        out << render_hierarchy(r);
      }
      return r.arrows_consistent ? exit_ok : exit_not_equivalent;
    }

    if (cmd_demo->parsed()) {
      if (demo_list_only) {
        for (const auto& [id, description] : demo_list()) out << id << ": " << description << "\n";
        return exit_ok;
      }
      demo_result r = run_demo();
      out << render_demo(r);
      return r.all_pass ? exit_ok : exit_not_equivalent;
    }
  } catch (const parse_error& e) {
    err << e.what() << "\n";
    return exit_usage;
  } catch (const noise_error& e) {
    err << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }
  return exit_usage;
}

} // namespace pin::cli
