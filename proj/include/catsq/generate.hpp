#pragma once

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "catsq/dsl.hpp"

namespace catsq {

/// mt19937_64 with a modulo draw, so streams are identical across standard
/// libraries (the std distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(eng_() % n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool chance(std::size_t num, std::size_t den) { return below(den) < num; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

struct Budget {
  std::size_t objects = 3;
  std::size_t arrows = 6;  // identities included
};

namespace detail {

inline std::string object_label(std::size_t i) {
  static const char* names[] = {"a", "b", "c", "d", "e", "f", "g", "h"};
  return i < 8 ? names[i] : "x" + std::to_string(i);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Random categories

/// Transitive closure of a random DAG on n objects.
inline FinCat random_poset(Rng& rng, std::size_t n) {
  std::vector<std::vector<bool>> less(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) less[i][j] = rng.chance(1, 2);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (less[i][k] && less[k][j]) less[i][j] = true;
  // relabel so that the order is not always compatible with declaration order
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back(detail::object_label(i));
  return poset_category(names, [&](ObId x, ObId y) { return less[perm[x]][perm[y]]; });
}

/// Free category on a random DAG (parallel edges allowed); arrows are paths.
/// Returns nullopt when the path count exceeds the arrow budget.
inline std::optional<FinCat> random_free(Rng& rng, std::size_t n, std::size_t max_arrows) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t m = rng.below(n + 2);
  for (std::size_t k = 0; k < m && n > 1; ++k) {
    std::size_t i = rng.below(n), j = rng.below(n);
    if (i == j) continue;
    if (i > j) std::swap(i, j);
    edges.emplace_back(i, j);
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  // paths as edge sequences, enumerated by length
  std::vector<std::vector<std::size_t>> paths;
  std::vector<std::pair<std::size_t, std::size_t>> ends;
  for (std::size_t x = 0; x < n; ++x) {
    paths.push_back({});
    ends.emplace_back(x, x);
  }
  for (std::size_t start = 0; start < paths.size(); ++start) {
    if (paths.size() > max_arrows) return std::nullopt;
    auto [s, t] = ends[start];
    if (start < n) {
      for (std::size_t e = 0; e < edges.size(); ++e)
        if (edges[e].first == t) {
          paths.push_back({e});
          ends.emplace_back(s, edges[e].second);
        }
    } else {
      for (std::size_t e = 0; e < edges.size(); ++e)
        if (edges[e].first == t) {
          auto p = paths[start];
          p.push_back(e);
          paths.push_back(std::move(p));
          ends.emplace_back(s, edges[e].second);
        }
    }
  }
  if (paths.size() > max_arrows) return std::nullopt;
  CategoryBuilder b(detail::unlimited());
  for (std::size_t x = 0; x < n; ++x) b.add_object(detail::object_label(perm[x]));
  std::map<std::vector<std::size_t>, ArId> by_path;
  std::vector<std::pair<std::size_t, std::size_t>> ids;
  for (std::size_t k = 0; k < paths.size(); ++k) {
    std::string name;
    if (k < n) {
      name = "id_" + detail::object_label(perm[k]);
    } else if (paths[k].size() == 1) {
      name = "e" + std::to_string(paths[k][0]);
    } else {
      name = "p" + std::to_string(k);
    }
    ArId f = b.add_arrow(name, static_cast<ObId>(ends[k].first), static_cast<ObId>(ends[k].second));
    if (k < n) b.set_identity(static_cast<ObId>(k), f);
    by_path.emplace(k < n ? std::vector<std::size_t>{n + 1000 + k} : paths[k], f);
  }
  auto path_of = [&](ArId f) { return f < n ? std::vector<std::size_t>{} : paths[f]; };
  return std::move(b).build([&](ArId g, ArId f) -> ArId {
    if (f < n) return g;
    if (g < n) return f;
    auto p = path_of(f);
    auto q = path_of(g);
    p.insert(p.end(), q.begin(), q.end());
    return by_path.at(p);
  });
}

/// Category of maps between small finite sets generated by random functions,
/// closed under composition. May contain non-identity endomorphisms.
inline std::optional<FinCat> random_concrete(Rng& rng, std::size_t n, std::size_t max_arrows) {
  std::vector<std::size_t> sizes(n);
  for (auto& s : sizes) s = rng.between(1, 2);
  struct Map {
    std::size_t dom, cod;
    std::vector<std::size_t> table;
    bool operator<(const Map& o) const { return std::tie(dom, cod, table) < std::tie(o.dom, o.cod, o.table); }
  };
  std::vector<Map> arrows;
  std::map<Map, ArId> index;
  auto add = [&](Map m) -> bool {
    if (index.contains(m)) return false;
    index.emplace(m, static_cast<ArId>(arrows.size()));
    arrows.push_back(std::move(m));
    return true;
  };
  for (std::size_t x = 0; x < n; ++x) {
    Map id{x, x, std::vector<std::size_t>(sizes[x])};
    std::iota(id.table.begin(), id.table.end(), 0);
    add(id);
  }
  std::size_t gens = rng.below(n + 2);
  for (std::size_t k = 0; k < gens; ++k) {
    std::size_t d = rng.below(n), c = rng.below(n);
    Map m{d, c, std::vector<std::size_t>(sizes[d])};
    for (auto& e : m.table) e = rng.below(sizes[c]);
    add(m);
  }
  for (std::size_t i = 0; i < arrows.size(); ++i) {
    if (arrows.size() > max_arrows) return std::nullopt;
    for (std::size_t j = 0; j <= i; ++j) {
      for (auto [f, g] : {std::pair{i, j}, std::pair{j, i}}) {
        if (arrows[f].cod != arrows[g].dom) continue;
        Map h{arrows[f].dom, arrows[g].cod, std::vector<std::size_t>(sizes[arrows[f].dom])};
        for (std::size_t e = 0; e < h.table.size(); ++e) h.table[e] = arrows[g].table[arrows[f].table[e]];
        add(std::move(h));
      }
    }
  }
  if (arrows.size() > max_arrows) return std::nullopt;
  CategoryBuilder b(detail::unlimited());
  for (std::size_t x = 0; x < n; ++x) b.add_object(detail::object_label(x));
  for (std::size_t k = 0; k < arrows.size(); ++k) {
    std::string name = k < n ? "id_" + detail::object_label(k) : "m" + std::to_string(k - n);
    ArId f = b.add_arrow(name, static_cast<ObId>(arrows[k].dom), static_cast<ObId>(arrows[k].cod));
    if (k < n) b.set_identity(static_cast<ObId>(k), f);
  }
  return std::move(b).build([&](ArId g, ArId f) {
    Map h{arrows[f].dom, arrows[g].cod, std::vector<std::size_t>(arrows[f].table.size())};
    for (std::size_t e = 0; e < h.table.size(); ++e) h.table[e] = arrows[g].table[arrows[f].table[e]];
    return index.at(h);
  });
}

/// One of: poset, free category on a DAG, concrete category of maps. The
/// empty category comes up with probability 1/40 when `allow_empty`.
inline CatRef random_category(Rng& rng, const Budget& budget, bool allow_empty = false) {
  if (allow_empty && rng.chance(1, 40)) return make_cat(empty_category());
  for (;;) {
    std::size_t n = rng.between(1, std::max<std::size_t>(1, budget.objects));
    switch (rng.below(3)) {
      case 0: {
        FinCat c = random_poset(rng, n);
        if (c.arrow_count() <= budget.arrows) return make_cat(std::move(c));
        break;
      }
      case 1:
        if (auto c = random_free(rng, n, budget.arrows)) return make_cat(std::move(*c));
        break;
      default:
        if (auto c = random_concrete(rng, n, budget.arrows)) return make_cat(std::move(*c));
        break;
    }
  }
}

// ---------------------------------------------------------------------------
// Random functors and 2-cells

/// A functor A → C found by randomized backtracking, or nullopt.
inline std::optional<Functor> random_functor(Rng& rng, const CatRef& a, const CatRef& c,
                                             std::size_t max_steps = 20000) {
  const FinCat& A = *a;
  const FinCat& C = *c;
  if (C.empty()) {
    if (A.empty()) return Functor(a, c, {}, {});
    return std::nullopt;
  }
  const std::size_t n = A.object_count();
  std::vector<ObId> ob(n);
  std::vector<ArId> ar(A.arrow_count(), kNoArrow);
  std::vector<ArId> order;
  for (ArId f = 0; f < A.arrow_count(); ++f)
    if (!A.is_identity(f)) order.push_back(f);
  std::size_t steps = 0;
  auto consistent = [&](ArId f) {
    for (ArId g : A.out_arrows(A.cod(f))) {
      if (ar[g] == kNoArrow) continue;
      ArId gf = A.compose(g, f);
      if (ar[gf] != kNoArrow && ar[gf] != C.compose(ar[g], ar[f])) return false;
    }
    for (ArId e : A.in_arrows(A.dom(f))) {
      if (ar[e] == kNoArrow) continue;
      ArId fe = A.compose(f, e);
      if (ar[fe] != kNoArrow && ar[fe] != C.compose(ar[f], ar[e])) return false;
    }
    return true;
  };
  std::function<bool(std::size_t)> arrows = [&](std::size_t k) -> bool {
    if (++steps > max_steps) return false;
    if (k == order.size()) {
      for (ArId f = 0; f < A.arrow_count(); ++f)
        for (ArId g : A.out_arrows(A.cod(f)))
          if (ar[A.compose(g, f)] != C.compose(ar[g], ar[f])) return false;
      return true;
    }
    ArId f = order[k];
    auto hom = C.hom(ob[A.dom(f)], ob[A.cod(f)]);
    std::vector<ArId> cands(hom.begin(), hom.end());
    rng.shuffle(cands);
    for (ArId h : cands) {
      ar[f] = h;
      if (consistent(f) && arrows(k + 1)) return true;
    }
    ar[f] = kNoArrow;
    return false;
  };
  for (int attempt = 0; attempt < 30; ++attempt) {
    for (ObId x = 0; x < n; ++x) ob[x] = static_cast<ObId>(rng.below(C.object_count()));
    std::fill(ar.begin(), ar.end(), kNoArrow);
    for (ObId x = 0; x < n; ++x) ar[A.identity(x)] = C.identity(ob[x]);
    steps = 0;
    if (arrows(0)) return Functor(a, c, ob, ar);
  }
  return std::nullopt;
}

inline std::optional<NatTrans> random_nat(Rng& rng, const Functor& f, const Functor& g,
                                          std::size_t max_steps = 20000) {
  const FinCat& A = f.src();
  const FinCat& C = f.dst();
  const ObId n = static_cast<ObId>(A.object_count());
  std::vector<ArId> comp(n, kNoArrow);
  std::size_t steps = 0;
  auto natural_at = [&](ObId x) {
    for (ArId e : A.out_arrows(x))
      if (A.cod(e) <= x && C.compose(g.ar(e), comp[x]) != C.compose(comp[A.cod(e)], f.ar(e))) return false;
    for (ArId e : A.in_arrows(x))
      if (A.dom(e) < x && C.compose(g.ar(e), comp[A.dom(e)]) != C.compose(comp[x], f.ar(e))) return false;
    return true;
  };
  std::function<bool(ObId)> rec = [&](ObId x) -> bool {
    if (++steps > max_steps) return false;
    if (x == n) return true;
    auto hom = C.hom(f.ob(x), g.ob(x));
    std::vector<ArId> cands(hom.begin(), hom.end());
    rng.shuffle(cands);
    for (ArId h : cands) {
      comp[x] = h;
      if (natural_at(x) && rec(x + 1)) return true;
    }
    comp[x] = kNoArrow;
    return false;
  };
  if (!rec(0)) return std::nullopt;
  return NatTrans(f, g, comp);
}

// ---------------------------------------------------------------------------
// Random squares

/// Square with random corners, functors and 2-cell.
inline TwoSquare random_square(Rng& rng, const Budget& budget) {
  for (;;) {
    CatRef ap = random_category(rng, budget), a = random_category(rng, budget);
    CatRef bp = random_category(rng, budget), b = random_category(rng, budget);
    for (int tries = 0; tries < 8; ++tries) {
      auto v = random_functor(rng, ap, a);
      auto u = random_functor(rng, a, b);
      auto up = random_functor(rng, ap, bp);
      auto w = random_functor(rng, bp, b);
      if (!v || !u || !up || !w) continue;
      auto alpha = random_nat(rng, compose(*u, *v), compose(*w, *up));
      if (alpha) return TwoSquare(*v, *u, *up, *w, *alpha);
    }
  }
}

/// Comma square of random u : A → B and w : B′ → B.
inline TwoSquare random_comma_square(Rng& rng, const Budget& budget) {
  for (;;) {
    CatRef a = random_category(rng, budget), bp = random_category(rng, budget), b = random_category(rng, budget);
    auto u = random_functor(rng, a, b);
    auto w = random_functor(rng, bp, b);
    if (u && w) return comma_category(*u, *w).square();
  }
}

inline TwoSquare random_pullback_square(Rng& rng, const Budget& budget) {
  for (;;) {
    CatRef a = random_category(rng, budget), bp = random_category(rng, budget), b = random_category(rng, budget);
    auto u = random_functor(rng, a, b);
    auto w = random_functor(rng, bp, b);
    if (u && w) return pullback_cat(*u, *w);
  }
}

/// Mix used by the cross-validation suites: half fully random squares, the
/// rest comma, pullback and identity-shaped squares.
inline TwoSquare random_mixed_square(Rng& rng, const Budget& budget) {
  std::size_t k = rng.below(20);
  if (k < 10) return random_square(rng, budget);
  if (k < 14) return random_comma_square(rng, budget);
  if (k < 18) return random_pullback_square(rng, budget);
  for (;;) {
    CatRef a = random_category(rng, budget), b = random_category(rng, budget);
    if (auto f = random_functor(rng, a, b)) return k == 18 ? horizontal_identity(*f) : vertical_identity(*f);
  }
}

// ---------------------------------------------------------------------------
// Random presheaves

/// Presheaf with set sizes in [0, max_size] (sizes ≥ 1 unless `allow_empty`),
/// found by randomized backtracking; falls back to the terminal presheaf.
inline Presheaf random_presheaf(Rng& rng, const CatRef& a, std::size_t max_size = 2, bool allow_empty = false,
                                std::size_t max_steps = 20000) {
  const FinCat& A = *a;
  for (int attempt = 0; attempt < 20; ++attempt) {
    std::vector<std::size_t> sizes(A.object_count());
    for (auto& s : sizes) s = rng.between(allow_empty ? 0 : 1, max_size);
    std::vector<FinMap> act(A.arrow_count());
    std::vector<bool> set(A.arrow_count(), false);
    for (ObId x = 0; x < A.object_count(); ++x) {
      act[A.identity(x)].resize(sizes[x]);
      std::iota(act[A.identity(x)].begin(), act[A.identity(x)].end(), 0);
      set[A.identity(x)] = true;
    }
    std::vector<ArId> order;
    for (ArId f = 0; f < A.arrow_count(); ++f)
      if (!A.is_identity(f)) order.push_back(f);
    std::size_t steps = 0;
    auto consistent = [&] {
      for (ArId f = 0; f < A.arrow_count(); ++f) {
        if (!set[f]) continue;
        for (ArId g : A.out_arrows(A.cod(f))) {
          ArId gf = A.compose(g, f);
          if (!set[g] || !set[gf]) continue;
          for (Elem z = 0; z < act[gf].size(); ++z)
            if (act[gf][z] != act[f][act[g][z]]) return false;
        }
      }
      return true;
    };
    std::function<bool(std::size_t)> rec = [&](std::size_t k) -> bool {
      if (++steps > max_steps) return false;
      if (k == order.size()) return true;
      ArId f = order[k];
      std::size_t from = sizes[A.cod(f)], to = sizes[A.dom(f)];
      if (from > 0 && to == 0) return false;
      std::size_t total = 1;
      for (std::size_t i = 0; i < from; ++i) total *= to;
      std::vector<std::size_t> codes(total);
      std::iota(codes.begin(), codes.end(), 0);
      rng.shuffle(codes);
      for (std::size_t code : codes) {
        act[f].assign(from, 0);
        for (std::size_t i = 0, c = code; i < from; ++i, c /= to) act[f][i] = static_cast<Elem>(c % to);
        set[f] = true;
        if (consistent() && rec(k + 1)) return true;
        set[f] = false;
      }
      return false;
    };
    if (!rec(0)) continue;
    std::vector<std::vector<std::string>> els(A.object_count());
    for (ObId x = 0; x < els.size(); ++x)
      for (std::size_t i = 0; i < sizes[x]; ++i) els[x].push_back("x" + std::to_string(i));
    return Presheaf(a, std::move(els), std::move(act));
  }
  return constant_presheaf(a, 1);
}

// ---------------------------------------------------------------------------
// Random workspaces

/// Deterministic workspace: categories A, B and u : A → B; a presheaf F on
/// A; a random square S over corners SA', SA, SB', SB.
inline Workspace generate_random(std::uint64_t seed, const Budget& budget = {}) {
  Rng rng(seed);
  Workspace ws;
  CatRef a = random_category(rng, budget);
  CatRef b;
  std::optional<Functor> u;
  while (!u) {
    b = random_category(rng, budget);
    u = random_functor(rng, a, b);
  }
  add_category(ws, "A", a);
  add_category(ws, "B", b);
  add_functor(ws, "u", "A", "B", *u);
  add_presheaf(ws, "F", "A", random_presheaf(rng, a));
  TwoSquare s = random_square(rng, budget);
  add_category(ws, "SA'", s.a_prime_ref());
  add_category(ws, "SA", s.a_ref());
  add_category(ws, "SB'", s.b_prime_ref());
  add_category(ws, "SB", s.b_ref());
  add_functor(ws, "Sv", "SA'", "SA", s.v);
  add_functor(ws, "Su", "SA", "SB", s.u);
  add_functor(ws, "Su'", "SA'", "SB'", s.u_prime);
  add_functor(ws, "Sw", "SB'", "SB", s.w);
  add_nat(ws, "Salpha", "Su.Sv", "Sw.Su'", s.alpha);
  add_square(ws, "S", {"Sv", "Su", "Su'", "Sw", "Salpha"}, s);
  return ws;
}

}  // namespace catsq
