#include "pin/process.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <sstream>

namespace pin {

proc make_nil() {
  static const proc nil = std::make_shared<const process>(process::node_t(nil_node{}));
  return nil;
}

proc make_prefixed(prefix pfx, proc body) {
  return std::make_shared<const process>(process::node_t(prefix_node{std::move(pfx), std::move(body)}));
}

proc make_sum(proc left, proc right) {
  assert(is_summation(left) && is_summation(right) && "sum operands must be summation-shaped");
  return std::make_shared<const process>(process::node_t(sum_node{std::move(left), std::move(right)}));
}

proc make_par(proc left, proc right) {
  return std::make_shared<const process>(process::node_t(par_node{std::move(left), std::move(right)}));
}

proc make_nu(name binder, proc body) {
  return std::make_shared<const process>(process::node_t(nu_node{std::move(binder), std::move(body)}));
}

proc make_bang(proc body) {
  return std::make_shared<const process>(process::node_t(bang_node{std::move(body)}));
}

proc p_out(name channel, name datum, proc body) {
  return make_prefixed(prefix{{}, output_core{std::move(channel), std::move(datum)}}, std::move(body));
}

proc p_in(name channel, name binder, proc body) {
  return make_prefixed(prefix{{}, input_core{std::move(channel), std::move(binder)}}, std::move(body));
}

proc p_tau(proc body) { return make_prefixed(prefix{{}, tau_core{}}, std::move(body)); }

proc p_match(name left, name right, proc prefixed) {
  const auto* node = std::get_if<prefix_node>(&prefixed->node);
  assert(node && "p_match expects a prefixed process");
  prefix pfx = node->pfx;
  pfx.guards.insert(pfx.guards.begin(), match_guard{std::move(left), std::move(right)});
  return make_prefixed(std::move(pfx), node->body);
}

bool is_nil(const proc& p) { return std::holds_alternative<nil_node>(p->node); }

bool is_summation(const proc& p) {
  return std::holds_alternative<nil_node>(p->node) ||
         std::holds_alternative<prefix_node>(p->node) ||
         std::holds_alternative<sum_node>(p->node);
}

// ---------------------------------------------------------------------------
// Comparison. compare() is fully literal; compare_alpha() resolves
// occurrences bound by input binders to de Bruijn levels so that strongly
// alpha-convertible terms compare equal.
// ---------------------------------------------------------------------------

namespace {

int cmp_int(long a, long b) { return a < b ? -1 : (a > b ? 1 : 0); }

// Environment for alpha-insensitive comparison; in literal mode binders are
// never pushed, so every name compares by identifier.
struct alpha_env {
  std::map<name, int> levels; // input-bound name -> binder level
  int depth = 0;
  bool alpha = true;
};

struct resolved {
  bool bound;
  int level;
  name literal;
};

resolved resolve(const name& n, const alpha_env& env) {
  auto it = env.levels.find(n);
  if (it != env.levels.end()) return {true, it->second, {}};
  return {false, 0, n};
}

int cmp_name(const name& a, const alpha_env& ea, const name& b, const alpha_env& eb) {
  resolved ra = resolve(a, ea), rb = resolve(b, eb);
  if (ra.bound != rb.bound) return ra.bound ? -1 : 1;
  if (ra.bound) return cmp_int(ra.level, rb.level);
  return ra.literal.id.compare(rb.literal.id) < 0 ? -1
         : (ra.literal.id == rb.literal.id ? 0 : 1);
}

int node_rank(const process& p) { return static_cast<int>(p.node.index()); }

int core_rank(const prefix_core& c) { return static_cast<int>(c.index()); }

int cmp_proc(const proc& a, alpha_env ea, const proc& b, alpha_env eb);

int cmp_prefix_and_body(const prefix& pa, const proc& ba, alpha_env ea,
                        const prefix& pb, const proc& bb, alpha_env eb) {
  if (int c = cmp_int(static_cast<long>(pa.guards.size()), static_cast<long>(pb.guards.size())); c) return c;
  for (size_t i = 0; i < pa.guards.size(); ++i) {
    if (int c = cmp_name(pa.guards[i].left, ea, pb.guards[i].left, eb); c) return c;
    if (int c = cmp_name(pa.guards[i].right, ea, pb.guards[i].right, eb); c) return c;
  }
  if (int c = cmp_int(core_rank(pa.core), core_rank(pb.core)); c) return c;
  if (const auto* oa = std::get_if<output_core>(&pa.core)) {
    const auto& ob = std::get<output_core>(pb.core);
    if (int c = cmp_name(oa->channel, ea, ob.channel, eb); c) return c;
    if (int c = cmp_name(oa->datum, ea, ob.datum, eb); c) return c;
    return cmp_proc(ba, ea, bb, eb);
  }
  if (const auto* ia = std::get_if<input_core>(&pa.core)) {
    const auto& ib = std::get<input_core>(pb.core);
    if (int c = cmp_name(ia->channel, ea, ib.channel, eb); c) return c;
    if (ea.alpha) {
      ea.levels[ia->binder] = ea.depth;
      eb.levels[ib.binder] = eb.depth;
      ++ea.depth;
      ++eb.depth;
    } else if (int c = ia->binder.id.compare(ib.binder.id); c) {
      return c < 0 ? -1 : 1;
    }
    return cmp_proc(ba, std::move(ea), bb, std::move(eb));
  }
  return cmp_proc(ba, ea, bb, eb); // tau
}

int cmp_proc(const proc& a, alpha_env ea, const proc& b, alpha_env eb) {
  if (int c = cmp_int(node_rank(*a), node_rank(*b)); c) return c;
  switch (a->node.index()) {
    case 0: return 0; // nil
    case 1: {
      const auto& na = std::get<prefix_node>(a->node);
      const auto& nb = std::get<prefix_node>(b->node);
      return cmp_prefix_and_body(na.pfx, na.body, std::move(ea), nb.pfx, nb.body, std::move(eb));
    }
    case 2: {
      const auto& na = std::get<sum_node>(a->node);
      const auto& nb = std::get<sum_node>(b->node);
      if (int c = cmp_proc(na.left, ea, nb.left, eb); c) return c;
      return cmp_proc(na.right, std::move(ea), nb.right, std::move(eb));
    }
    case 3: {
      const auto& na = std::get<par_node>(a->node);
      const auto& nb = std::get<par_node>(b->node);
      if (int c = cmp_proc(na.left, ea, nb.left, eb); c) return c;
      return cmp_proc(na.right, std::move(ea), nb.right, std::move(eb));
    }
    case 4: {
      const auto& na = std::get<nu_node>(a->node);
      const auto& nb = std::get<nu_node>(b->node);
      // Substitution rewrites restriction binders homomorphically, so a
      // binder shadowed by an enclosing input binder is renamed along with
      // it: resolve it through the environment like any occurrence.
      if (int c = cmp_name(na.binder, ea, nb.binder, eb); c) return c;
      return cmp_proc(na.body, std::move(ea), nb.body, std::move(eb));
    }
    default: {
      const auto& na = std::get<bang_node>(a->node);
      const auto& nb = std::get<bang_node>(b->node);
      return cmp_proc(na.body, std::move(ea), nb.body, std::move(eb));
    }
  }
}

} // namespace

int compare(const proc& a, const proc& b) {
  if (a.get() == b.get()) return 0;
  alpha_env ea, eb;
  ea.alpha = eb.alpha = false;
  return cmp_proc(a, std::move(ea), b, std::move(eb));
}

bool equal(const proc& a, const proc& b) { return compare(a, b) == 0; }

int compare_alpha(const proc& a, const proc& b) {
  if (a.get() == b.get()) return 0;
  return cmp_proc(a, {}, b, {});
}

bool equal_alpha(const proc& a, const proc& b) { return compare_alpha(a, b) == 0; }

int compare_alpha_under(const proc& a, const proc& b, const std::map<name, int>& enclosing,
                        int depth) {
  if (a.get() == b.get()) return 0;
  alpha_env env;
  env.levels = enclosing;
  env.depth = depth;
  return cmp_proc(a, env, b, env);
}

// ---------------------------------------------------------------------------
// Rendering.
// ---------------------------------------------------------------------------

std::string render_prefix(const prefix& pfx) {
  std::ostringstream out;
  for (const auto& g : pfx.guards) out << "[" << g.left.id << "=" << g.right.id << "]";
  std::visit(
      [&](const auto& core) {
        using T = std::decay_t<decltype(core)>;
        if constexpr (std::is_same_v<T, tau_core>)
          out << "tau";
        else if constexpr (std::is_same_v<T, output_core>)
          out << core.channel.id << "!" << core.datum.id;
        else
          out << core.channel.id << "?(" << core.binder.id << ")";
      },
      pfx.core);
  return out.str();
}

namespace {

void render_atom(const proc& p, std::ostream& out);

void render_proc(const proc& p, std::ostream& out) {
  if (const auto* s = std::get_if<sum_node>(&p->node)) {
    render_proc(s->left, out);
    out << " + ";
    // Right operand of a left-assoc chain is never itself a sum when built
    // by the parser, but render whatever shape we are given.
    if (std::holds_alternative<sum_node>(s->right->node)) {
      render_proc(s->right, out);
    } else {
      render_atom(s->right, out);
    }
    return;
  }
  if (const auto* pr = std::get_if<par_node>(&p->node)) {
    if (std::holds_alternative<sum_node>(pr->left->node)) {
      out << "(";
      render_proc(pr->left, out);
      out << ")";
    } else if (std::holds_alternative<par_node>(pr->left->node)) {
      render_proc(pr->left, out);
    } else {
      render_atom(pr->left, out);
    }
    out << " | ";
    if (std::holds_alternative<sum_node>(pr->right->node) ||
        std::holds_alternative<par_node>(pr->right->node)) {
      out << "(";
      render_proc(pr->right, out);
      out << ")";
    } else {
      render_atom(pr->right, out);
    }
    return;
  }
  render_atom(p, out);
}

void render_atom(const proc& p, std::ostream& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, nil_node>) {
          out << "0";
        } else if constexpr (std::is_same_v<T, prefix_node>) {
          out << render_prefix(node.pfx) << ".";
          if (std::holds_alternative<sum_node>(node.body->node) ||
              std::holds_alternative<par_node>(node.body->node)) {
            out << "(";
            render_proc(node.body, out);
            out << ")";
          } else {
            render_atom(node.body, out);
          }
        } else if constexpr (std::is_same_v<T, nu_node>) {
          out << "(nu " << node.binder.id << ") ";
          if (std::holds_alternative<sum_node>(node.body->node) ||
              std::holds_alternative<par_node>(node.body->node)) {
            out << "(";
            render_proc(node.body, out);
            out << ")";
          } else {
            render_atom(node.body, out);
          }
        } else if constexpr (std::is_same_v<T, bang_node>) {
          out << "!";
          if (std::holds_alternative<sum_node>(node.body->node) ||
              std::holds_alternative<par_node>(node.body->node)) {
            out << "(";
            render_proc(node.body, out);
            out << ")";
          } else {
            render_atom(node.body, out);
          }
        } else {
          render_proc(p, out); // sum/par handled above
        }
      },
      p->node);
}

} // namespace

std::string render_process(const proc& p) {
  std::ostringstream out;
  render_proc(p, out);
  return out.str();
}

std::vector<proc> sum_components(const proc& p) {
  std::vector<proc> out;
  std::function<void(const proc&)> walk = [&](const proc& q) {
    if (const auto* s = std::get_if<sum_node>(&q->node)) {
      walk(s->left);
      walk(s->right);
    } else {
      out.push_back(q);
    }
  };
  walk(p);
  return out;
}

std::vector<proc> par_components(const proc& p) {
  std::vector<proc> out;
  std::function<void(const proc&)> walk = [&](const proc& q) {
    if (const auto* s = std::get_if<par_node>(&q->node)) {
      walk(s->left);
      walk(s->right);
    } else {
      out.push_back(q);
    }
  };
  walk(p);
  return out;
}

// ---------------------------------------------------------------------------
// Name analysis. Free occurrences use standard innermost scoping; the
// strongly/weakly bound split is name-level: a name input-bound anywhere is
// strongly bound, any other bound name is weakly bound.
// ---------------------------------------------------------------------------

namespace {

struct name_walk {
  name_set free;
  name_set input_binders;
  name_set nu_binders;

  void occurrence(const name& n, const name_set& bound) {
    if (!bound.count(n)) free.insert(n);
  }

  void walk(const proc& p, name_set bound) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, nil_node>) {
          } else if constexpr (std::is_same_v<T, prefix_node>) {
            for (const auto& g : node.pfx.guards) {
              occurrence(g.left, bound);
              occurrence(g.right, bound);
            }
            if (const auto* o = std::get_if<output_core>(&node.pfx.core)) {
              occurrence(o->channel, bound);
              occurrence(o->datum, bound);
              walk(node.body, bound);
            } else if (const auto* i = std::get_if<input_core>(&node.pfx.core)) {
              occurrence(i->channel, bound);
              input_binders.insert(i->binder);
              name_set inner = bound;
              inner.insert(i->binder);
              walk(node.body, std::move(inner));
            } else {
              walk(node.body, bound);
            }
          } else if constexpr (std::is_same_v<T, sum_node> || std::is_same_v<T, par_node>) {
            walk(node.left, bound);
            walk(node.right, bound);
          } else if constexpr (std::is_same_v<T, nu_node>) {
            nu_binders.insert(node.binder);
            name_set inner = bound;
            inner.insert(node.binder);
            walk(node.body, std::move(inner));
          } else {
            walk(node.body, bound);
          }
        },
        p->node);
  }
};

name_walk analyze(const proc& p) {
  name_walk w;
  w.walk(p, {});
  return w;
}

} // namespace

name_set free_names(const proc& p) { return analyze(p).free; }

name_set strongly_bound_names(const proc& p) { return analyze(p).input_binders; }

name_set bound_names(const proc& p) {
  auto w = analyze(p);
  name_set out = w.input_binders;
  out.insert(w.nu_binders.begin(), w.nu_binders.end());
  return out;
}

name_set weakly_bound_names(const proc& p) {
  auto w = analyze(p);
  name_set out;
  for (const auto& n : w.nu_binders)
    if (!w.input_binders.count(n)) out.insert(n);
  return out;
}

name_set all_names(const proc& p) {
  auto w = analyze(p);
  name_set out = w.free;
  out.insert(w.input_binders.begin(), w.input_binders.end());
  out.insert(w.nu_binders.begin(), w.nu_binders.end());
  return out;
}

name_set substitutable_names(const proc& p) {
  auto w = analyze(p);
  name_set out = w.free;
  out.insert(w.nu_binders.begin(), w.nu_binders.end());
  return out;
}

name_classification classify_names(const proc& p) {
  auto w = analyze(p);
  name_classification c;
  c.free = w.free;
  c.strongly_bound = w.input_binders;
  for (const auto& n : w.nu_binders)
    if (!w.input_binders.count(n)) c.weakly_bound.insert(n);
  return c;
}

} // namespace pin
