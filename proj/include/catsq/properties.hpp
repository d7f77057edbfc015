#pragma once

#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "catsq/constructions.hpp"

namespace catsq {

// ---------------------------------------------------------------------------
// Connected components

struct Components {
  /// Class index per object; classes are numbered by their least object.
  std::vector<std::uint32_t> class_of;
  /// Objects of each class, in declaration order.
  std::vector<std::vector<ObId>> classes;

  std::size_t count() const { return classes.size(); }
  ObId representative(std::size_t k) const { return classes[k].front(); }
};

inline Components connected_components(const FinCat& c) {
  std::vector<ObId> parent(c.object_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](ObId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (ArId f = 0; f < c.arrow_count(); ++f) {
    ObId a = find(c.dom(f)), b = find(c.cod(f));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  Components out;
  out.class_of.assign(c.object_count(), 0);
  std::vector<std::int64_t> index(c.object_count(), -1);
  for (ObId x = 0; x < c.object_count(); ++x) {
    ObId r = find(x);
    if (index[r] < 0) {
      index[r] = static_cast<std::int64_t>(out.classes.size());
      out.classes.emplace_back();
    }
    out.class_of[x] = static_cast<std::uint32_t>(index[r]);
    out.classes[index[r]].push_back(x);
  }
  return out;
}

inline std::string describe_components(const FinCat& c, const Components& comps) {
  std::string s;
  for (std::size_t k = 0; k < comps.count(); ++k) {
    if (k) s += ",";
    s += "{";
    for (std::size_t i = 0; i < comps.classes[k].size(); ++i) {
      if (i) s += ",";
      s += c.object_name(comps.classes[k][i]);
    }
    s += "}";
  }
  return s;
}

// ---------------------------------------------------------------------------
// Terminal / initial objects, invertibility

inline bool is_terminal(const FinCat& c, ObId x) {
  for (ObId y = 0; y < c.object_count(); ++y)
    if (c.hom(y, x).size() != 1) return false;
  return true;
}

inline bool is_initial(const FinCat& c, ObId x) {
  for (ObId y = 0; y < c.object_count(); ++y)
    if (c.hom(x, y).size() != 1) return false;
  return true;
}

inline std::vector<ObId> terminal_objects(const FinCat& c) {
  std::vector<ObId> out;
  for (ObId x = 0; x < c.object_count(); ++x)
    if (is_terminal(c, x)) out.push_back(x);
  return out;
}

/// Terminal objects of the opposite, i.e. initial objects.
inline std::vector<ObId> initial_objects(const FinCat& c) {
  return terminal_objects(opposite_cat(c));
}

inline std::optional<ArId> inverse_of(const FinCat& c, ArId f) {
  if (f >= c.arrow_count()) throw Error(ErrorKind::UnknownArrow, "arrow id " + std::to_string(f));
  for (ArId g : c.hom(c.cod(f), c.dom(f)))
    if (c.compose(g, f) == c.identity(c.dom(f)) && c.compose(f, g) == c.identity(c.cod(f))) return g;
  return std::nullopt;
}

inline bool is_invertible(const FinCat& c, ArId f) { return inverse_of(c, f).has_value(); }

// ---------------------------------------------------------------------------
// Localizers

/// The decidable fundamental localizers: W0 (π0-bijections) and Wgr (source
/// and target both empty or both nonempty).
enum class Localizer { W0, Wgr };

inline std::string_view to_string(Localizer l) { return l == Localizer::W0 ? "w0" : "wgr"; }

inline bool is_aspherical_cat(const FinCat& c, Localizer l) {
  if (c.empty()) return false;
  if (l == Localizer::Wgr) return true;
  return connected_components(c).count() == 1;
}

/// Reason `c` fails to be aspherical, prefixed by `what`; empty if it is.
inline std::string asphericity_failure(const FinCat& c, Localizer l, std::string_view what) {
  if (c.empty()) return std::string(what) + " empty";
  if (l == Localizer::Wgr) return {};
  auto comps = connected_components(c);
  if (comps.count() == 1) return {};
  return std::string(what) + " has " + std::to_string(comps.count()) +
         " components: " + describe_components(c, comps);
}

inline bool is_w_equivalence(const Functor& u, Localizer l) {
  const FinCat& a = u.src();
  const FinCat& b = u.dst();
  if (l == Localizer::Wgr) return a.empty() == b.empty();
  auto ca = connected_components(a);
  auto cb = connected_components(b);
  if (ca.count() != cb.count()) return false;
  std::vector<bool> hit(cb.count(), false);
  for (std::size_t k = 0; k < ca.count(); ++k) {
    auto img = cb.class_of[u.ob(ca.representative(k))];
    if (hit[img]) return false;
    hit[img] = true;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Adjoints

enum class TieBreak { Least, Greatest };

/// u ⊣ right with unit : id ⇒ right∘u and counit : u∘right ⇒ id.
struct Adjunction {
  Functor left;
  Functor right;
  NatTrans unit;
  NatTrans counit;
};

/// Checks both triangle identities: (ε⋆u)(u⋆η) = id_u and (r⋆ε)(η⋆r) = id_r.
inline bool triangle_identities_hold(const Adjunction& adj) {
  const Functor& u = adj.left;
  const Functor& r = adj.right;
  NatTrans first = vcompose(whisker(adj.counit, u), whisker(u, adj.unit));
  NatTrans second = vcompose(whisker(r, adj.counit), whisker(adj.unit, r));
  return first == identity_nat(u) && second == identity_nat(r);
}

/// Right adjoint of u : A → B, found by a terminal-object search in each
/// slice u/b. Ties between isomorphic terminal objects are broken by
/// declaration order of the candidates (a, g : u(a) → b).
inline std::optional<Adjunction> find_right_adjoint(const Functor& u, TieBreak tie = TieBreak::Least) {
  const FinCat& a = u.src();
  const FinCat& b = u.dst();
  std::vector<ObId> r_ob(b.object_count());
  std::vector<ArId> eps(b.object_count());

  // number of f : x → a0 with g0∘u(f) = g
  auto factorizations = [&](ObId x, ArId g, ObId a0, ArId g0, ArId* witness) {
    int n = 0;
    for (ArId f : a.hom(x, a0)) {
      if (b.compose(g0, u.ar(f)) == g) {
        ++n;
        if (witness) *witness = f;
      }
    }
    return n;
  };

  for (ObId y = 0; y < b.object_count(); ++y) {
    std::vector<std::pair<ObId, ArId>> candidates;
    for (ObId x = 0; x < a.object_count(); ++x)
      for (ArId g : b.hom(u.ob(x), y)) candidates.emplace_back(x, g);
    if (tie == TieBreak::Greatest) std::reverse(candidates.begin(), candidates.end());
    bool found = false;
    for (auto [a0, g0] : candidates) {
      bool terminal = true;
      for (ObId x = 0; x < a.object_count() && terminal; ++x)
        for (ArId g : b.hom(u.ob(x), y))
          if (factorizations(x, g, a0, g0, nullptr) != 1) {
            terminal = false;
            break;
          }
      if (terminal) {
        r_ob[y] = a0;
        eps[y] = g0;
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
  }

  std::vector<ArId> r_ar(b.arrow_count());
  for (ArId h = 0; h < b.arrow_count(); ++h) {
    ObId y1 = b.dom(h), y2 = b.cod(h);
    ArId f = kNoArrow;
    factorizations(r_ob[y1], b.compose(h, eps[y1]), r_ob[y2], eps[y2], &f);
    r_ar[h] = f;
  }
  std::vector<ArId> eta(a.object_count());
  for (ObId x = 0; x < a.object_count(); ++x) {
    ObId ux = u.ob(x);
    ArId f = kNoArrow;
    factorizations(x, b.identity(ux), r_ob[ux], eps[ux], &f);
    eta[x] = f;
  }
  Functor r(u.dst_ref(), u.src_ref(), std::move(r_ob), std::move(r_ar));
  NatTrans unit(identity_functor(u.src_ref()), compose(r, u), std::move(eta));
  NatTrans counit(compose(u, r), identity_functor(u.dst_ref()), std::move(eps));
  Adjunction adj{u, std::move(r), std::move(unit), std::move(counit)};
  if (!triangle_identities_hold(adj)) return std::nullopt;
  return adj;
}

/// Left adjoint l ⊣ u, via the right adjoint of u^op. The returned
/// adjunction has `left` = l and `right` = u.
inline std::optional<Adjunction> find_left_adjoint(const Functor& u, TieBreak tie = TieBreak::Least) {
  CatRef a_op = opposite(u.src_ref());
  CatRef b_op = u.src_ref() == u.dst_ref() ? a_op : opposite(u.dst_ref());
  auto adj_op = find_right_adjoint(opposite(u, a_op, b_op), tie);
  if (!adj_op) return std::nullopt;
  // op(u) ⊣ r'  gives  op(r') ⊣ u with unit op(ε') and counit op(η')
  Functor l = Functor::trusted(u.dst_ref(), u.src_ref(), adj_op->right.ob_map(), adj_op->right.ar_map());
  NatTrans unit = NatTrans::trusted(identity_functor(u.dst_ref()), compose(u, l), adj_op->counit.components());
  NatTrans counit = NatTrans::trusted(compose(l, u), identity_functor(u.src_ref()), adj_op->unit.components());
  Adjunction adj{std::move(l), u, std::move(unit), std::move(counit)};
  return adj;
}

}  // namespace catsq
