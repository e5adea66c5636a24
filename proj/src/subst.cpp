#include "pin/subst.hpp"

#include <sstream>

namespace pin {

substitution::substitution(std::initializer_list<std::pair<name, name>> pairs) {
  for (const auto& [from, to] : pairs) set(from, to);
}

substitution substitution::single(const name& from, const name& to) {
  substitution s;
  s.set(from, to);
  return s;
}

name substitution::operator()(const name& n) const {
  auto it = map_.find(n);
  return it == map_.end() ? n : it->second;
}

void substitution::set(const name& from, const name& to) {
  if (from == to)
    map_.erase(from);
  else
    map_[from] = to;
}

void substitution::erase(const name& from) { map_.erase(from); }

name_set substitution::domain() const {
  name_set out;
  for (const auto& [from, to] : map_) out.insert(from);
  return out;
}

name_set substitution::range() const {
  name_set out;
  for (const auto& [from, to] : map_) out.insert(to);
  return out;
}

std::string substitution::render() const {
  std::ostringstream out;
  out << "{";
  bool first = true;
  for (const auto& [from, to] : map_) {
    if (!first) out << ", ";
    out << from.id << "->" << to.id;
    first = false;
  }
  out << "}";
  return out.str();
}

namespace {

proc apply_rec(const proc& p, const substitution& s) {
  if (s.is_identity()) return p;
  return std::visit(
      [&](const auto& node) -> proc {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, nil_node>) {
          return p;
        } else if constexpr (std::is_same_v<T, prefix_node>) {
          prefix pfx = node.pfx;
          for (auto& g : pfx.guards) {
            g.left = s(g.left);
            g.right = s(g.right);
          }
          if (auto* o = std::get_if<output_core>(&pfx.core)) {
            o->channel = s(o->channel);
            o->datum = s(o->datum);
            return make_prefixed(std::move(pfx), apply_rec(node.body, s));
          }
          if (auto* i = std::get_if<input_core>(&pfx.core)) {
            i->channel = s(i->channel);
            name binder = i->binder;
            substitution inner = s;
            inner.erase(binder);
            proc body = node.body;
            if (!inner.is_identity()) {
              // Strong alpha-conversion when a replacement would become
              // bound by this input binder.
              bool capture = false;
              for (const auto& n : substitutable_names(body)) {
                if (n != binder && inner(n) == binder) {
                  capture = true;
                  break;
                }
              }
              if (capture) {
                // Strong alpha-conversion is itself a substitution by a fresh
                // name; it renames any restriction binder shadowing `binder`
                // the same way an instantiation of the prefix would.
                name_set avoid = all_names(body);
                name_set dom = inner.domain(), rng = inner.range();
                avoid.insert(dom.begin(), dom.end());
                avoid.insert(rng.begin(), rng.end());
                name fresh = fresh_internal(avoid);
                body = apply_rec(body, substitution::single(binder, fresh));
                binder = fresh;
              }
            }
            i->binder = binder;
            return make_prefixed(std::move(pfx), apply_rec(body, inner));
          }
          return make_prefixed(std::move(pfx), apply_rec(node.body, s)); // tau
        } else if constexpr (std::is_same_v<T, sum_node>) {
          return make_sum(apply_rec(node.left, s), apply_rec(node.right, s));
        } else if constexpr (std::is_same_v<T, par_node>) {
          return make_par(apply_rec(node.left, s), apply_rec(node.right, s));
        } else if constexpr (std::is_same_v<T, nu_node>) {
          // ((nu z)P)sigma = (nu z.sigma)P.sigma: weakly bound binders are
          // substituted, never alpha-converted.
          return make_nu(s(node.binder), apply_rec(node.body, s));
        } else {
          return make_bang(apply_rec(node.body, s));
        }
      },
      p->node);
}

} // namespace

proc apply_substitution(const proc& p, const substitution& s) { return apply_rec(p, s); }

} // namespace pin
