#pragma once

#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "catsq/functor.hpp"

namespace catsq {

namespace detail {

inline Limits unlimited() {
  return Limits{.max_objects = static_cast<std::size_t>(-1), .max_arrows = static_cast<std::size_t>(-1)};
}

inline std::string tuple_name(std::initializer_list<std::string_view> parts) {
  std::string s = "(";
  bool first = true;
  for (auto p : parts) {
    if (!first) s += ",";
    s += p;
    first = false;
  }
  return s + ")";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Small named categories

/// Thin category on `objects` with an arrow x → y whenever less(x, y) or
/// x = y; `less` must be a strict partial order (transitive).
template <class Less>
FinCat poset_category(const std::vector<std::string>& objects, Less&& less) {
  CategoryBuilder b(detail::unlimited());
  for (const auto& o : objects) b.add_object(o);
  std::map<std::pair<ObId, ObId>, ArId> arrow;
  for (ObId x = 0; x < objects.size(); ++x) {
    ArId f = b.add_arrow("id_" + objects[x], x, x);
    b.set_identity(x, f);
    arrow[{x, x}] = f;
  }
  for (ObId x = 0; x < objects.size(); ++x)
    for (ObId y = 0; y < objects.size(); ++y)
      if (x != y && less(x, y)) arrow[{x, y}] = b.add_arrow(objects[x] + "<" + objects[y], x, y);
  auto dom = [&](ArId f) { return b.dom(f); };
  auto cod = [&](ArId f) { return b.cod(f); };
  return std::move(b).build([&](ArId g, ArId f) { return arrow.at({dom(f), cod(g)}); });
}

/// The point category e, with object `•`.
inline CatRef point_category() {
  static const CatRef e = make_cat(poset_category({"•"}, [](ObId, ObId) { return false; }));
  return e;
}

inline FinCat discrete_category(const std::vector<std::string>& objects) {
  return poset_category(objects, [](ObId, ObId) { return false; });
}

inline FinCat empty_category() { return discrete_category({}); }

/// The interval 0 → 1 with the non-identity arrow named `t`.
inline FinCat interval_category() {
  CategoryBuilder b(detail::unlimited());
  b.add_object("0");
  b.add_object("1");
  b.set_identity(0, b.add_arrow("id_0", 0, 0));
  b.set_identity(1, b.add_arrow("id_1", 1, 1));
  ArId t = b.add_arrow("t", 0, 1);
  return std::move(b).build([&](ArId g, ArId f) { return g == t || f == t ? t : g; });
}

/// Two objects 0, 1 and the given parallel arrows 0 → 1.
inline FinCat parallel_category(const std::vector<std::string>& arrows = {"a", "b"}) {
  CategoryBuilder b(detail::unlimited());
  b.add_object("0");
  b.add_object("1");
  b.set_identity(0, b.add_arrow("id_0", 0, 0));
  b.set_identity(1, b.add_arrow("id_1", 1, 1));
  for (const auto& a : arrows) b.add_arrow(a, 0, 1);
  return std::move(b).build([&](ArId g, ArId f) { return b.partial().is_identity(g) ? f : g; });
}

/// Functor e → C picking the object x.
inline Functor object_functor(const CatRef& c, ObId x) {
  return Functor::trusted(point_category(), c, {x}, {c->identity(x)});
}

/// The unique functor C → e.
inline Functor to_point(const CatRef& c) { return constant_functor(c, point_category(), 0); }

// ---------------------------------------------------------------------------
// Products and coproducts

struct Product {
  CatRef cat;
  Functor pr1;
  Functor pr2;
};

inline Product product_cat(const CatRef& a, const CatRef& b, const Limits& limits = {}) {
  guard(a->object_count() * b->object_count() <= limits.max_objects, "product exceeds the object budget");
  guard(a->arrow_count() * b->arrow_count() <= limits.max_arrows, "product exceeds the arrow budget");
  CategoryBuilder bld(limits);
  const std::size_t nb_ob = b->object_count();
  const std::size_t nb_ar = b->arrow_count();
  for (ObId x = 0; x < a->object_count(); ++x)
    for (ObId y = 0; y < nb_ob; ++y) bld.add_object(detail::tuple_name({a->object_name(x), b->object_name(y)}));
  for (ArId f = 0; f < a->arrow_count(); ++f)
    for (ArId g = 0; g < nb_ar; ++g)
      bld.add_arrow(detail::tuple_name({a->arrow_name(f), b->arrow_name(g)}),
                    static_cast<ObId>(a->dom(f) * nb_ob + b->dom(g)), static_cast<ObId>(a->cod(f) * nb_ob + b->cod(g)));
  for (ObId x = 0; x < a->object_count(); ++x)
    for (ObId y = 0; y < nb_ob; ++y)
      bld.set_identity(static_cast<ObId>(x * nb_ob + y), static_cast<ArId>(a->identity(x) * nb_ar + b->identity(y)));
  CatRef p = make_cat(std::move(bld).build([&](ArId g, ArId f) {
    return static_cast<ArId>(a->compose(g / nb_ar, f / nb_ar) * nb_ar + b->compose(g % nb_ar, f % nb_ar));
  }));
  std::vector<ObId> o1(p->object_count()), o2(p->object_count());
  std::vector<ArId> a1(p->arrow_count()), a2(p->arrow_count());
  for (ObId x = 0; x < o1.size(); ++x) {
    o1[x] = static_cast<ObId>(x / nb_ob);
    o2[x] = static_cast<ObId>(x % nb_ob);
  }
  for (ArId f = 0; f < a1.size(); ++f) {
    a1[f] = static_cast<ArId>(f / nb_ar);
    a2[f] = static_cast<ArId>(f % nb_ar);
  }
  return {p, Functor::trusted(p, a, std::move(o1), std::move(a1)), Functor::trusted(p, b, std::move(o2), std::move(a2))};
}

struct Coproduct {
  CatRef cat;
  Functor in1;
  Functor in2;
};

/// A ⊔ B; objects of A first. Names clashing across summands get suffixed.
inline Coproduct coproduct_cat(const CatRef& a, const CatRef& b, const Limits& limits = {}) {
  guard(a->object_count() + b->object_count() <= limits.max_objects, "coproduct exceeds the object budget");
  guard(a->arrow_count() + b->arrow_count() <= limits.max_arrows, "coproduct exceeds the arrow budget");
  CategoryBuilder bld(limits);
  const ObId na = static_cast<ObId>(a->object_count());
  const ArId ma = static_cast<ArId>(a->arrow_count());
  for (ObId x = 0; x < na; ++x) bld.add_object(a->object_name(x));
  for (ObId x = 0; x < b->object_count(); ++x) bld.add_object(b->object_name(x));
  for (ArId f = 0; f < ma; ++f) bld.add_arrow(a->arrow_name(f), a->dom(f), a->cod(f));
  for (ArId f = 0; f < b->arrow_count(); ++f) bld.add_arrow(b->arrow_name(f), na + b->dom(f), na + b->cod(f));
  for (ObId x = 0; x < na; ++x) bld.set_identity(x, a->identity(x));
  for (ObId x = 0; x < b->object_count(); ++x) bld.set_identity(na + x, ma + b->identity(x));
  CatRef s = make_cat(std::move(bld).build([&](ArId g, ArId f) {
    return f < ma ? a->compose(g, f) : ma + b->compose(g - ma, f - ma);
  }));
  std::vector<ObId> o1(na), o2(b->object_count());
  std::vector<ArId> a1(ma), a2(b->arrow_count());
  for (ObId x = 0; x < na; ++x) o1[x] = x;
  for (ObId x = 0; x < o2.size(); ++x) o2[x] = na + x;
  for (ArId f = 0; f < ma; ++f) a1[f] = f;
  for (ArId f = 0; f < a2.size(); ++f) a2[f] = ma + f;
  return {s, Functor::trusted(a, s, std::move(o1), std::move(a1)), Functor::trusted(b, s, std::move(o2), std::move(a2))};
}

// ---------------------------------------------------------------------------
// Functor enumeration and functor categories

/// Calls `visit(ob_map, ar_map)` for every functor A → C, in lexicographic
/// order of (object map, arrow map) over declaration order. `visit` returns
/// false to stop early.
template <class Visit>
void for_each_functor(const FinCat& a, const FinCat& c, Visit&& visit, const Limits& limits = {}) {
  const std::size_t n = a.object_count();
  const std::size_t m = a.arrow_count();
  std::vector<ObId> ob(n, 0);
  std::vector<ArId> ar(m, kNoArrow);
  std::vector<ArId> order;  // non-identity arrows in declaration order
  for (ArId f = 0; f < m; ++f)
    if (!a.is_identity(f)) order.push_back(f);
  std::size_t steps = 0;
  bool stop = false;

  auto consistent = [&](ArId f) {
    // composites with f among already assigned arrows
    for (ArId g : a.out_arrows(a.cod(f))) {
      if (ar[g] == kNoArrow) continue;
      ArId gf = a.compose(g, f);
      if (ar[gf] != kNoArrow && ar[gf] != c.compose(ar[g], ar[f])) return false;
    }
    for (ArId e : a.in_arrows(a.dom(f))) {
      if (ar[e] == kNoArrow) continue;
      ArId fe = a.compose(f, e);
      if (ar[fe] != kNoArrow && ar[fe] != c.compose(ar[f], ar[e])) return false;
    }
    return true;
  };

  auto full_check = [&] {
    for (ArId f = 0; f < m; ++f)
      for (ArId g : a.out_arrows(a.cod(f)))
        if (ar[a.compose(g, f)] != c.compose(ar[g], ar[f])) return false;
    return true;
  };

  std::function<void(std::size_t)> assign_arrow = [&](std::size_t k) {
    if (stop) return;
    guard(++steps <= limits.max_search_steps, "functor enumeration exceeds the search budget");
    if (k == order.size()) {
      if (full_check() && !visit(ob, ar)) stop = true;
      return;
    }
    ArId f = order[k];
    for (ArId h : c.hom(ob[a.dom(f)], ob[a.cod(f)])) {
      ar[f] = h;
      if (consistent(f)) assign_arrow(k + 1);
      if (stop) break;
    }
    ar[f] = kNoArrow;
  };

  std::function<void(std::size_t)> assign_object = [&](std::size_t x) {
    if (stop) return;
    if (x == n) {
      for (ObId y = 0; y < n; ++y) ar[a.identity(y)] = c.identity(ob[y]);
      assign_arrow(0);
      for (ObId y = 0; y < n; ++y) ar[a.identity(y)] = kNoArrow;
      return;
    }
    for (ObId y = 0; y < c.object_count(); ++y) {
      ob[x] = y;
      assign_object(x + 1);
      if (stop) break;
    }
  };
  assign_object(0);
}

/// Calls `visit(components)` for every natural transformation F ⇒ G.
template <class Visit>
void for_each_nat(const Functor& f, const Functor& g, Visit&& visit, const Limits& limits = {}) {
  const FinCat& a = f.src();
  const FinCat& c = f.dst();
  const std::size_t n = a.object_count();
  std::vector<ArId> comp(n, kNoArrow);
  std::size_t steps = 0;
  bool stop = false;
  auto natural_at = [&](ObId x) {
    for (ArId e : a.out_arrows(x)) {
      ObId y = a.cod(e);
      if (y > x) continue;
      if (c.compose(g.ar(e), comp[x]) != c.compose(comp[y], f.ar(e))) return false;
    }
    for (ArId e : a.in_arrows(x)) {
      ObId y = a.dom(e);
      if (y >= x) continue;
      if (c.compose(g.ar(e), comp[y]) != c.compose(comp[x], f.ar(e))) return false;
    }
    return true;
  };
  std::function<void(ObId)> rec = [&](ObId x) {
    if (stop) return;
    guard(++steps <= limits.max_search_steps, "natural transformation enumeration exceeds the search budget");
    if (x == n) {
      if (!visit(comp)) stop = true;
      return;
    }
    for (ArId h : c.hom(f.ob(x), g.ob(x))) {
      comp[x] = h;
      if (natural_at(x)) rec(x + 1);
      if (stop) break;
    }
    comp[x] = kNoArrow;
  };
  rec(0);
}

/// Category of functors A → C and natural transformations, with lookup
/// tables from tabulated data back to ids.
struct FunctorCategory {
  CatRef source;
  CatRef target;
  CatRef cat;
  std::vector<Functor> objects;
  std::vector<std::vector<ArId>> components;  // per arrow
  std::map<std::pair<std::vector<ObId>, std::vector<ArId>>, ObId> object_index;
  std::map<std::tuple<ObId, ObId, std::vector<ArId>>, ArId> arrow_index;

  ObId find(const Functor& f) const { return object_index.at({f.ob_map(), f.ar_map()}); }
  ArId find(ObId s, ObId t, const std::vector<ArId>& comp) const { return arrow_index.at({s, t, comp}); }
};

namespace detail {

inline std::string functor_name(const FinCat& a, const FinCat& c, const std::vector<ObId>& ob,
                                const std::vector<ArId>& ar) {
  std::string s = "[";
  for (ObId x = 0; x < ob.size(); ++x) {
    if (x) s += ",";
    s += a.object_name(x) + ":" + c.object_name(ob[x]);
  }
  bool first = true;
  for (ArId f = 0; f < ar.size(); ++f) {
    if (a.is_identity(f)) continue;
    s += first ? ";" : ",";
    first = false;
    s += a.arrow_name(f) + ":" + c.arrow_name(ar[f]);
  }
  return s + "]";
}

}  // namespace detail

/// Objects are the functors A → C in lexicographic order of their tables;
/// arrows are natural transformations, composed componentwise.
inline FunctorCategory functor_category(const CatRef& a, const CatRef& c, const Limits& limits = {}) {
  FunctorCategory fc;
  fc.source = a;
  fc.target = c;
  CategoryBuilder b(limits);
  std::vector<std::pair<std::vector<ObId>, std::vector<ArId>>> tables;
  for_each_functor(
      *a, *c,
      [&](const std::vector<ObId>& ob, const std::vector<ArId>& ar) {
        guard(tables.size() < limits.max_objects, "functor category exceeds the object budget");
        tables.emplace_back(ob, ar);
        return true;
      },
      limits);
  for (ObId i = 0; i < tables.size(); ++i) {
    const auto& [ob, ar] = tables[i];
    b.add_object(detail::functor_name(*a, *c, ob, ar));
    fc.objects.push_back(Functor::trusted(a, c, ob, ar));
    fc.object_index.emplace(tables[i], i);
  }
  std::vector<ArId> identity(tables.size(), kNoArrow);
  for (ObId s = 0; s < tables.size(); ++s) {
    for (ObId t = 0; t < tables.size(); ++t) {
      for_each_nat(
          fc.objects[s], fc.objects[t],
          [&](const std::vector<ArId>& comp) {
            std::string name = b.partial().object_name(s) + "=>" + b.partial().object_name(t) + "{";
            for (ObId x = 0; x < comp.size(); ++x) name += (x ? "," : "") + c->arrow_name(comp[x]);
            ArId f = b.add_arrow(name + "}", s, t);
            fc.components.push_back(comp);
            fc.arrow_index.emplace(std::make_tuple(s, t, comp), f);
            if (s == t) {
              bool is_id = true;
              for (ObId x = 0; x < comp.size(); ++x) is_id = is_id && comp[x] == c->identity(fc.objects[s].ob(x));
              if (is_id) identity[s] = f;
            }
            return true;
          },
          limits);
    }
  }
  for (ObId s = 0; s < identity.size(); ++s) b.set_identity(s, identity[s]);
  auto dom = [&](ArId f) { return b.dom(f); };
  auto cod = [&](ArId f) { return b.cod(f); };
  std::vector<ArId> tmp;
  fc.cat = make_cat(std::move(b).build([&](ArId g, ArId f) {
    const auto& cg = fc.components[g];
    const auto& cf = fc.components[f];
    tmp.resize(cf.size());
    for (ObId x = 0; x < cf.size(); ++x) tmp[x] = c->compose(cg[x], cf[x]);
    return fc.arrow_index.at({dom(f), cod(g), tmp});
  }));
  return fc;
}

}  // namespace catsq
