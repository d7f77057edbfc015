#pragma once

#include <algorithm>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "catsq/exactness.hpp"
#include "catsq/generate.hpp"

#ifndef CATSQ_FIXTURES
#define CATSQ_FIXTURES "fixtures"
#endif

namespace catsq::testing {

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

inline Workspace fixture(const std::string& name) {
  return parse_workspace(read_text(std::string(CATSQ_FIXTURES) + "/" + name));
}

inline CatRef two() { return make_cat(interval_category()); }
inline CatRef pq() { return make_cat(discrete_category({"p", "q"})); }
inline CatRef par() { return make_cat(parallel_category({"a", "b"})); }

/// Functor e → C at the object named `x`.
inline Functor pick(const CatRef& c, const std::string& x) { return object_functor(c, c->object(x)); }

// ---------------------------------------------------------------------------
// Brute-force oracles. They share nothing with the engines but FinCat
// accessors: no comma categories, no union-find from the library.

/// Components by depth-first search on the underlying undirected graph.
inline std::size_t pi0_count(const FinCat& c) {
  std::vector<bool> seen(c.object_count(), false);
  std::size_t n = 0;
  for (ObId s = 0; s < c.object_count(); ++s) {
    if (seen[s]) continue;
    ++n;
    std::vector<ObId> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      ObId x = stack.back();
      stack.pop_back();
      for (ArId f = 0; f < c.arrow_count(); ++f) {
        ObId y;
        if (c.dom(f) == x) y = c.cod(f);
        else if (c.cod(f) == x) y = c.dom(f);
        else continue;
        if (!seen[y]) {
          seen[y] = true;
          stack.push_back(y);
        }
      }
    }
  }
  return n;
}

/// Objects and arrows of u↓w counted from the definition.
inline std::pair<std::size_t, std::size_t> comma_counts(const Functor& u, const Functor& w) {
  const FinCat& a = u.src();
  const FinCat& bp = w.src();
  const FinCat& b = u.dst();
  struct Ob {
    ObId a, bp;
    ArId g;
  };
  std::vector<Ob> obs;
  for (ObId x = 0; x < a.object_count(); ++x)
    for (ObId y = 0; y < bp.object_count(); ++y)
      for (ArId g = 0; g < b.arrow_count(); ++g)
        if (b.dom(g) == u.ob(x) && b.cod(g) == w.ob(y)) obs.push_back({x, y, g});
  std::size_t arrows = 0;
  for (const auto& s : obs)
    for (const auto& t : obs)
      for (ArId f = 0; f < a.arrow_count(); ++f) {
        if (a.dom(f) != s.a || a.cod(f) != t.a) continue;
        for (ArId gp = 0; gp < bp.arrow_count(); ++gp) {
          if (bp.dom(gp) != s.bp || bp.cod(gp) != t.bp) continue;
          if (b.compose(w.ar(gp), s.g) == b.compose(t.g, u.ar(f))) ++arrows;
        }
      }
  return {obs.size(), arrows};
}

/// |(u_*F)(b)|: families over the pairs (a, g : u(a) → b), compatible along
/// every arrow f with g₂∘u(f) = g₁, enumerated over the full product.
/// Returns nullopt when the product exceeds `cap`.
inline std::optional<std::size_t> cone_count(const Functor& u, const Presheaf& f, ObId b, std::size_t cap = 1000000) {
  const FinCat& a = u.src();
  const FinCat& bc = u.dst();
  std::vector<std::pair<ObId, ArId>> idx;
  for (ObId x = 0; x < a.object_count(); ++x)
    for (ArId g = 0; g < bc.arrow_count(); ++g)
      if (bc.dom(g) == u.ob(x) && bc.cod(g) == b) idx.emplace_back(x, g);
  double total = 1;
  for (auto [x, g] : idx) total *= static_cast<double>(f.size(x));
  if (total > static_cast<double>(cap)) return std::nullopt;
  std::vector<Elem> pick(idx.size(), 0);
  auto ok = [&] {
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < idx.size(); ++j)
        for (ArId k = 0; k < a.arrow_count(); ++k) {
          if (a.dom(k) != idx[i].first || a.cod(k) != idx[j].first) continue;
          if (bc.compose(idx[j].second, u.ar(k)) != idx[i].second) continue;
          if (f.act(k, pick[j]) != pick[i]) return false;
        }
    return true;
  };
  if (total == 0) return 0;
  std::size_t count = 0;
  for (;;) {
    if (ok()) ++count;
    std::size_t i = 0;
    while (i < pick.size() && ++pick[i] == f.size(idx[i].first)) pick[i++] = 0;
    if (i == pick.size()) break;
  }
  return count;
}

/// |(u_!F)(b)|: the disjoint union over (a, g : b → u(a)) of F(a), divided by
/// x at (a₂,g₂) ~ F(f)(x) at (a₁,g₁) whenever u(f)∘g₁ = g₂; classes found by
/// repeated relabelling to the minimum until stable.
inline std::size_t cocone_count(const Functor& u, const Presheaf& f, ObId b) {
  const FinCat& a = u.src();
  const FinCat& bc = u.dst();
  std::vector<std::pair<ObId, ArId>> idx;
  for (ObId x = 0; x < a.object_count(); ++x)
    for (ArId g = 0; g < bc.arrow_count(); ++g)
      if (bc.dom(g) == b && bc.cod(g) == u.ob(x)) idx.emplace_back(x, g);
  std::vector<std::size_t> offset(idx.size() + 1, 0);
  for (std::size_t i = 0; i < idx.size(); ++i) offset[i + 1] = offset[i] + f.size(idx[i].first);
  std::vector<std::size_t> label(offset.back());
  std::iota(label.begin(), label.end(), 0);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j)
      for (ArId k = 0; k < a.arrow_count(); ++k) {
        if (a.dom(k) != idx[i].first || a.cod(k) != idx[j].first) continue;
        if (bc.compose(u.ar(k), idx[i].second) != idx[j].second) continue;
        for (Elem x = 0; x < f.size(idx[j].first); ++x) edges.emplace_back(offset[j] + x, offset[i] + f.act(k, x));
      }
  for (bool changed = true; changed;) {
    changed = false;
    for (auto [p, q] : edges) {
      std::size_t m = std::min(label[p], label[q]);
      if (label[p] != m || label[q] != m) {
        label[p] = label[q] = m;
        changed = true;
      }
    }
  }
  std::size_t n = 0;
  for (std::size_t i = 0; i < label.size(); ++i) n += label[i] == i;
  return n;
}

/// Naive asphericity of every link category straight from the definition:
/// objects (a′, f, g′) and arrows k, connectivity by DFS.
inline bool exact_by_definition(const TwoSquare& d, Localizer l) {
  const FinCat& ap = d.a_prime();
  const FinCat& ac = d.a();
  const FinCat& bp = d.b_prime();
  const FinCat& b = d.b();
  for (ObId x = 0; x < ac.object_count(); ++x)
    for (ObId y = 0; y < bp.object_count(); ++y)
      for (ArId g = 0; g < b.arrow_count(); ++g) {
        if (b.dom(g) != d.u.ob(x) || b.cod(g) != d.w.ob(y)) continue;
        struct Ob {
          ObId a;
          ArId f, gp;
        };
        std::vector<Ob> obs;
        for (ObId z = 0; z < ap.object_count(); ++z)
          for (ArId f = 0; f < ac.arrow_count(); ++f) {
            if (ac.dom(f) != x || ac.cod(f) != d.v.ob(z)) continue;
            for (ArId gp = 0; gp < bp.arrow_count(); ++gp) {
              if (bp.dom(gp) != d.u_prime.ob(z) || bp.cod(gp) != y) continue;
              if (b.compose(b.compose(d.w.ar(gp), d.alpha.at(z)), d.u.ar(f)) == g) obs.push_back({z, f, gp});
            }
          }
        if (obs.empty()) return false;
        if (l == Localizer::Wgr) continue;
        std::vector<std::size_t> comp(obs.size());
        std::iota(comp.begin(), comp.end(), 0);
        for (bool changed = true; changed;) {
          changed = false;
          for (std::size_t s = 0; s < obs.size(); ++s)
            for (std::size_t t = 0; t < obs.size(); ++t)
              for (ArId k = 0; k < ap.arrow_count(); ++k) {
                if (ap.dom(k) != obs[s].a || ap.cod(k) != obs[t].a) continue;
                if (ac.compose(d.v.ar(k), obs[s].f) != obs[t].f) continue;
                if (bp.compose(obs[t].gp, d.u_prime.ar(k)) != obs[s].gp) continue;
                std::size_t m = std::min(comp[s], comp[t]);
                if (comp[s] != m || comp[t] != m) {
                  comp[s] = comp[t] = m;
                  changed = true;
                }
              }
        }
        for (std::size_t s = 0; s < obs.size(); ++s)
          if (comp[s] != 0) return false;
      }
  return true;
}

/// Brute-force isomorphism test: object permutations, then arrow bijections
/// compatible with composition.
inline bool isomorphic(const FinCat& x, const FinCat& y) {
  if (x.object_count() != y.object_count() || x.arrow_count() != y.arrow_count()) return false;
  const std::size_t n = x.object_count();
  std::vector<ObId> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (ObId a = 0; a < n && ok; ++a)
      for (ObId b = 0; b < n && ok; ++b) ok = x.hom(a, b).size() == y.hom(perm[a], perm[b]).size();
    if (!ok) continue;
    // search arrow maps compatible with composition
    std::vector<ArId> ar(x.arrow_count(), kNoArrow);
    std::vector<ArId> order;
    for (ArId f = 0; f < x.arrow_count(); ++f) order.push_back(f);
    std::function<bool(std::size_t)> rec = [&](std::size_t k) -> bool {
      if (k == order.size()) {
        for (ArId f = 0; f < x.arrow_count(); ++f)
          for (ArId g : x.out_arrows(x.cod(f)))
            if (ar[x.compose(g, f)] != y.compose(ar[g], ar[f])) return false;
        return true;
      }
      ArId f = order[k];
      for (ArId h : y.hom(perm[x.dom(f)], perm[x.cod(f)])) {
        bool used = false;
        for (std::size_t i = 0; i < k; ++i) used = used || ar[order[i]] == h;
        if (used) continue;
        if (x.is_identity(f) != y.is_identity(h)) continue;
        ar[f] = h;
        if (rec(k + 1)) return true;
      }
      ar[f] = kNoArrow;
      return false;
    };
    if (rec(0)) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// ---------------------------------------------------------------------------
// Generators used by several suites

/// Random u : A → B together with its categories.
inline Functor random_functor_between(Rng& rng, const Budget& budget) {
  for (;;) {
    CatRef a = random_category(rng, budget), b = random_category(rng, budget);
    if (auto u = random_functor(rng, a, b)) return *u;
  }
}

/// Random functor that has a right adjoint, found by rejection sampling.
inline Functor random_left_adjoint(Rng& rng, const Budget& budget) {
  for (;;) {
    Functor u = random_functor_between(rng, budget);
    if (find_right_adjoint(u)) return u;
  }
}

/// Random square whose verticals u and u′ both have right adjoints. Half of
/// them are comma squares of such functors, the rest have a random 2-cell.
inline TwoSquare random_bc_square(Rng& rng, const Budget& budget) {
  for (;;) {
    if (rng.chance(1, 2)) {
      Functor u = random_left_adjoint(rng, budget);
      for (int t = 0; t < 10; ++t) {
        CatRef bp = random_category(rng, budget);
        auto w = random_functor(rng, bp, u.dst_ref());
        if (!w) continue;
        TwoSquare d = comma_category(u, *w).square();
        if (find_right_adjoint(d.u_prime)) return d;
      }
      continue;
    }
    Functor u = random_left_adjoint(rng, budget);
    Functor up = random_left_adjoint(rng, budget);
    for (int t = 0; t < 10; ++t) {
      auto v = random_functor(rng, up.src_ref(), u.src_ref());
      auto w = random_functor(rng, up.dst_ref(), u.dst_ref());
      if (!v || !w) continue;
      auto alpha = random_nat(rng, compose(u, *v), compose(*w, up));
      if (alpha) return TwoSquare(*v, u, up, *w, *alpha);
    }
  }
}

/// Random square whose u is the given functor; used to build left partners
/// for horizontal pasting.
inline std::optional<TwoSquare> square_with_u(Rng& rng, const Functor& u, const Budget& budget) {
  for (int t = 0; t < 20; ++t) {
    CatRef ap = random_category(rng, budget), bp = random_category(rng, budget);
    auto v = random_functor(rng, ap, u.src_ref());
    auto up = random_functor(rng, ap, bp);
    auto w = random_functor(rng, bp, u.dst_ref());
    if (!v || !up || !w) continue;
    if (auto alpha = random_nat(rng, compose(u, *v), compose(*w, *up))) return TwoSquare(*v, u, *up, *w, *alpha);
  }
  return std::nullopt;
}

/// Random square whose v is the given functor; bottom partner for vertical pasting.
inline std::optional<TwoSquare> square_with_v(Rng& rng, const Functor& v, const Budget& budget) {
  for (int t = 0; t < 20; ++t) {
    CatRef bp = random_category(rng, budget), b = random_category(rng, budget);
    auto u = random_functor(rng, v.dst_ref(), b);
    auto up = random_functor(rng, v.src_ref(), bp);
    auto w = random_functor(rng, bp, b);
    if (!u || !up || !w) continue;
    if (auto alpha = random_nat(rng, compose(*u, v), compose(*w, *up))) return TwoSquare(v, *u, *up, *w, *alpha);
  }
  return std::nullopt;
}

}  // namespace catsq::testing
