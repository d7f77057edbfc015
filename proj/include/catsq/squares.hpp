#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "catsq/constructions.hpp"

namespace catsq {

/// A 2-square
///
///     A′ --v--> A
///     |         |
///     u′   α    u
///     v         v
///     B′ --w--> B
///
/// with α : u∘v ⇒ w∘u′.
class TwoSquare {
 public:
  TwoSquare(Functor v, Functor u, Functor u_prime, Functor w, NatTrans alpha)
      : v(std::move(v)), u(std::move(u)), u_prime(std::move(u_prime)), w(std::move(w)), alpha(std::move(alpha)) {
    if (auto problem = check(); !problem.empty()) throw Error(ErrorKind::BoundaryMismatch, problem);
  }

  Functor v;
  Functor u;
  Functor u_prime;
  Functor w;
  NatTrans alpha;

  const FinCat& a_prime() const { return v.src(); }
  const FinCat& a() const { return v.dst(); }
  const FinCat& b_prime() const { return u_prime.dst(); }
  const FinCat& b() const { return u.dst(); }
  const CatRef& a_prime_ref() const { return v.src_ref(); }
  const CatRef& a_ref() const { return v.dst_ref(); }
  const CatRef& b_prime_ref() const { return u_prime.dst_ref(); }
  const CatRef& b_ref() const { return u.dst_ref(); }

  std::string check() const {
    if (!same_category(v.dst(), u.src())) return "v and u do not meet at A";
    if (!same_category(v.src(), u_prime.src())) return "v and uprime do not share A'";
    if (!same_category(u_prime.dst(), w.src())) return "uprime and w do not meet at B'";
    if (!same_category(u.dst(), w.dst())) return "u and w do not share B";
    if (!(alpha.src() == compose(u, v))) return "source of alpha is not u.v";
    if (!(alpha.dst() == compose(w, u_prime))) return "target of alpha is not w.uprime";
    return {};
  }

  /// "(a,b′,g)" with names from A, B′ and B.
  std::string triple_name(ObId a_ob, ObId bp, ArId g) const {
    return detail::tuple_name({a().object_name(a_ob), b_prime().object_name(bp), b().arrow_name(g)});
  }

  friend bool operator==(const TwoSquare& x, const TwoSquare& y) {
    return x.v == y.v && x.u == y.u && x.u_prime == y.u_prime && x.w == y.w && x.alpha == y.alpha;
  }
};

// ---------------------------------------------------------------------------
// Comma categories

/// u↓w for u : A → B and w : B′ → B. Objects are the triples (a, b′, g) in
/// lexicographic order; arrows are the pairs (f, g′) with w(g′)∘g₁ = g₂∘u(f),
/// enumerated by source, target, f, g′.
struct CommaData {
  struct ObKey {
    ObId a;
    ObId b;
    ArId g;
  };
  struct ArKey {
    ArId f;
    ArId g;
  };

  CatRef cat;
  Functor u;
  Functor w;
  Functor proj_left;   // comma → A
  Functor proj_right;  // comma → B′
  NatTrans alpha;      // u∘proj_left ⇒ w∘proj_right, component g
  std::vector<ObKey> objects;
  std::vector<ArKey> arrows;
  std::map<std::tuple<ObId, ObId, ArId>, ObId> object_index;
  std::map<std::tuple<ObId, ObId, ArId, ArId>, ArId> arrow_index;  // (src, tgt, f, g′)

  std::optional<ObId> find_object(ObId a, ObId b, ArId g) const {
    auto it = object_index.find({a, b, g});
    if (it == object_index.end()) return std::nullopt;
    return it->second;
  }
  ArId find_arrow(ObId src, ObId tgt, ArId f, ArId g) const { return arrow_index.at({src, tgt, f, g}); }

  TwoSquare square() const { return TwoSquare(proj_left, u, proj_right, w, alpha); }
};

inline CommaData comma_category(const Functor& u, const Functor& w, const Limits& limits = {}) {
  if (!same_category(u.dst(), w.dst())) throw Error(ErrorKind::TargetMismatch, "comma: u and w have different targets");
  const FinCat& a = u.src();
  const FinCat& bp = w.src();
  const FinCat& b = u.dst();
  CategoryBuilder bld(limits);
  std::vector<CommaData::ObKey> obs;
  std::map<std::tuple<ObId, ObId, ArId>, ObId> ob_index;
  for (ObId x = 0; x < a.object_count(); ++x)
    for (ObId y = 0; y < bp.object_count(); ++y)
      for (ArId g : b.hom(u.ob(x), w.ob(y))) {
        ObId id = bld.add_object(detail::tuple_name({a.object_name(x), bp.object_name(y), b.arrow_name(g)}));
        obs.push_back({x, y, g});
        ob_index.emplace(std::make_tuple(x, y, g), id);
      }
  std::vector<CommaData::ArKey> ars;
  std::map<std::tuple<ObId, ObId, ArId, ArId>, ArId> ar_index;
  for (ObId s = 0; s < obs.size(); ++s)
    for (ObId t = 0; t < obs.size(); ++t)
      for (ArId f : a.hom(obs[s].a, obs[t].a))
        for (ArId gp : bp.hom(obs[s].b, obs[t].b)) {
          if (b.compose(w.ar(gp), obs[s].g) != b.compose(obs[t].g, u.ar(f))) continue;
          ArId id = bld.add_arrow(detail::tuple_name({a.arrow_name(f), bp.arrow_name(gp)}), s, t);
          ars.push_back({f, gp});
          ar_index.emplace(std::make_tuple(s, t, f, gp), id);
        }
  for (ObId s = 0; s < obs.size(); ++s)
    bld.set_identity(s, ar_index.at({s, s, a.identity(obs[s].a), bp.identity(obs[s].b)}));
  auto dom = [&](ArId f) { return bld.dom(f); };
  auto cod = [&](ArId f) { return bld.cod(f); };
  CatRef cat = make_cat(std::move(bld).build([&](ArId g, ArId f) {
    return ar_index.at({dom(f), cod(g), a.compose(ars[g].f, ars[f].f), bp.compose(ars[g].g, ars[f].g)});
  }));

  std::vector<ObId> pl_ob(obs.size()), pr_ob(obs.size());
  std::vector<ArId> pl_ar(ars.size()), pr_ar(ars.size()), comp(obs.size());
  for (ObId s = 0; s < obs.size(); ++s) {
    pl_ob[s] = obs[s].a;
    pr_ob[s] = obs[s].b;
    comp[s] = obs[s].g;
  }
  for (ArId f = 0; f < ars.size(); ++f) {
    pl_ar[f] = ars[f].f;
    pr_ar[f] = ars[f].g;
  }
  Functor pl = Functor::trusted(cat, u.src_ref(), std::move(pl_ob), std::move(pl_ar));
  Functor pr = Functor::trusted(cat, w.src_ref(), std::move(pr_ob), std::move(pr_ar));
  NatTrans alpha = NatTrans::trusted(compose(u, pl), compose(w, pr), std::move(comp));
  return CommaData{cat, u, w, pl, pr, std::move(alpha), std::move(obs), std::move(ars), std::move(ob_index),
                   std::move(ar_index)};
}

/// A/b = u↓b, objects (a, •, g : u(a) → b).
inline CommaData slice(const Functor& u, ObId b, const Limits& limits = {}) {
  if (b >= u.dst().object_count()) throw Error(ErrorKind::UnknownObject, "object id " + std::to_string(b));
  return comma_category(u, object_functor(u.dst_ref(), b), limits);
}

/// b\A = b↓u, objects (•, a, g : b → u(a)).
inline CommaData coslice(const Functor& u, ObId b, const Limits& limits = {}) {
  if (b >= u.dst().object_count()) throw Error(ErrorKind::UnknownObject, "object id " + std::to_string(b));
  return comma_category(object_functor(u.dst_ref(), b), u, limits);
}

// ---------------------------------------------------------------------------
// Fibers and pullbacks

struct FiberData {
  CatRef cat;
  std::vector<ObId> objects;  // ids in A
  std::vector<ArId> arrows;   // ids in A
  Functor inclusion;          // A_b → A
  CommaData slice;            // A/b
  CommaData coslice;          // b\A
  Functor to_slice;           // a ↦ (a, •, id_b)
  Functor to_coslice;         // a ↦ (•, a, id_b)
};

inline FiberData fiber(const Functor& u, ObId b, const Limits& limits = {}) {
  const FinCat& a = u.src();
  const FinCat& bc = u.dst();
  if (b >= bc.object_count()) throw Error(ErrorKind::UnknownObject, "object id " + std::to_string(b));
  CategoryBuilder bld(limits);
  std::vector<ObId> obs;
  std::vector<std::int64_t> ob_local(a.object_count(), -1);
  for (ObId x = 0; x < a.object_count(); ++x)
    if (u.ob(x) == b) {
      ob_local[x] = static_cast<std::int64_t>(obs.size());
      obs.push_back(x);
      bld.add_object(a.object_name(x));
    }
  std::vector<ArId> ars;
  std::vector<std::int64_t> ar_local(a.arrow_count(), -1);
  for (ArId f = 0; f < a.arrow_count(); ++f)
    if (u.ar(f) == bc.identity(b)) {
      ar_local[f] = static_cast<std::int64_t>(ars.size());
      ars.push_back(f);
      bld.add_arrow(a.arrow_name(f), static_cast<ObId>(ob_local[a.dom(f)]), static_cast<ObId>(ob_local[a.cod(f)]));
    }
  for (ObId i = 0; i < obs.size(); ++i) bld.set_identity(i, static_cast<ArId>(ar_local[a.identity(obs[i])]));
  CatRef cat = make_cat(std::move(bld).build(
      [&](ArId g, ArId f) { return static_cast<ArId>(ar_local[a.compose(ars[g], ars[f])]); }));

  Functor incl = Functor::trusted(cat, u.src_ref(), obs, ars);
  CommaData sl = slice(u, b, limits);
  CommaData co = coslice(u, b, limits);
  const ArId idb = bc.identity(b);
  std::vector<ObId> s_ob(obs.size()), c_ob(obs.size());
  std::vector<ArId> s_ar(ars.size()), c_ar(ars.size());
  for (ObId i = 0; i < obs.size(); ++i) {
    s_ob[i] = *sl.find_object(obs[i], 0, idb);
    c_ob[i] = *co.find_object(0, obs[i], idb);
  }
  const ArId pt = point_category()->identity(0);
  for (ArId i = 0; i < ars.size(); ++i) {
    ObId d = static_cast<ObId>(ob_local[a.dom(ars[i])]), c = static_cast<ObId>(ob_local[a.cod(ars[i])]);
    s_ar[i] = sl.find_arrow(s_ob[d], s_ob[c], ars[i], pt);
    c_ar[i] = co.find_arrow(c_ob[d], c_ob[c], pt, ars[i]);
  }
  Functor to_sl = Functor::trusted(cat, sl.cat, std::move(s_ob), std::move(s_ar));
  Functor to_co = Functor::trusted(cat, co.cat, std::move(c_ob), std::move(c_ar));
  return FiberData{cat, std::move(obs), std::move(ars), std::move(incl), std::move(sl), std::move(co),
                   std::move(to_sl), std::move(to_co)};
}

/// Strict pullback of u : A → B and w : B′ → B as the commutative square
/// with v = projection to A and u′ = projection to B′. Objects are the pairs
/// (a, b′) with u(a) = w(b′), ordered lexicographically.
inline TwoSquare pullback_cat(const Functor& u, const Functor& w, const Limits& limits = {}) {
  if (!same_category(u.dst(), w.dst())) throw Error(ErrorKind::TargetMismatch, "pullback: u and w have different targets");
  const FinCat& a = u.src();
  const FinCat& bp = w.src();
  CategoryBuilder bld(limits);
  std::vector<std::pair<ObId, ObId>> obs;
  std::map<std::pair<ObId, ObId>, ObId> ob_index;
  for (ObId x = 0; x < a.object_count(); ++x)
    for (ObId y = 0; y < bp.object_count(); ++y)
      if (u.ob(x) == w.ob(y)) {
        ob_index.emplace(std::make_pair(x, y), bld.add_object(detail::tuple_name({a.object_name(x), bp.object_name(y)})));
        obs.emplace_back(x, y);
      }
  std::vector<std::pair<ArId, ArId>> ars;
  std::map<std::pair<ArId, ArId>, ArId> ar_index;
  for (ArId f = 0; f < a.arrow_count(); ++f)
    for (ArId g = 0; g < bp.arrow_count(); ++g)
      if (u.ar(f) == w.ar(g)) {
        ArId id = bld.add_arrow(detail::tuple_name({a.arrow_name(f), bp.arrow_name(g)}),
                                ob_index.at({a.dom(f), bp.dom(g)}), ob_index.at({a.cod(f), bp.cod(g)}));
        ars.emplace_back(f, g);
        ar_index.emplace(std::make_pair(f, g), id);
      }
  for (ObId i = 0; i < obs.size(); ++i)
    bld.set_identity(i, ar_index.at({a.identity(obs[i].first), bp.identity(obs[i].second)}));
  CatRef cat = make_cat(std::move(bld).build([&](ArId g, ArId f) {
    return ar_index.at({a.compose(ars[g].first, ars[f].first), bp.compose(ars[g].second, ars[f].second)});
  }));
  std::vector<ObId> p1(obs.size()), p2(obs.size());
  std::vector<ArId> q1(ars.size()), q2(ars.size());
  for (ObId i = 0; i < obs.size(); ++i) std::tie(p1[i], p2[i]) = obs[i];
  for (ArId i = 0; i < ars.size(); ++i) std::tie(q1[i], q2[i]) = ars[i];
  Functor v = Functor::trusted(cat, u.src_ref(), std::move(p1), std::move(q1));
  Functor up = Functor::trusted(cat, w.src_ref(), std::move(p2), std::move(q2));
  NatTrans alpha = identity_nat(compose(u, v));
  NatTrans cell = NatTrans::trusted(compose(u, v), compose(w, up), alpha.components());
  return TwoSquare(std::move(v), u, std::move(up), w, std::move(cell));
}

// ---------------------------------------------------------------------------
// Induced functors

struct InducedFunctor {
  CommaData source;
  CommaData target;
  Functor functor;
};

/// A′/b′ → A/w(b′), (a′, g′) ↦ (v(a′), w(g′)∘α_{a′}).
inline InducedFunctor induced_slice_functor(const TwoSquare& d, ObId bp, const Limits& limits = {}) {
  if (bp >= d.b_prime().object_count()) throw Error(ErrorKind::UnknownObject, "object id " + std::to_string(bp));
  CommaData src = slice(d.u_prime, bp, limits);
  CommaData dst = slice(d.u, d.w.ob(bp), limits);
  const FinCat& b = d.b();
  const ArId pt = point_category()->identity(0);
  std::vector<ObId> ob(src.objects.size());
  std::vector<ArId> ar(src.arrows.size());
  for (ObId s = 0; s < ob.size(); ++s) {
    const auto& k = src.objects[s];
    ob[s] = *dst.find_object(d.v.ob(k.a), 0, b.compose(d.w.ar(k.g), d.alpha.at(k.a)));
  }
  for (ArId f = 0; f < ar.size(); ++f) {
    ObId s = src.cat->dom(f), t = src.cat->cod(f);
    ar[f] = dst.find_arrow(ob[s], ob[t], d.v.ar(src.arrows[f].f), pt);
  }
  Functor fn(src.cat, dst.cat, std::move(ob), std::move(ar));
  return InducedFunctor{std::move(src), std::move(dst), std::move(fn)};
}

/// a\A′ → u(a)\B′, (a′, f) ↦ (u′(a′), α_{a′}∘u(f)).
inline InducedFunctor induced_coslice_functor(const TwoSquare& d, ObId a, const Limits& limits = {}) {
  if (a >= d.a().object_count()) throw Error(ErrorKind::UnknownObject, "object id " + std::to_string(a));
  CommaData src = coslice(d.v, a, limits);
  CommaData dst = coslice(d.w, d.u.ob(a), limits);
  const FinCat& b = d.b();
  const ArId pt = point_category()->identity(0);
  std::vector<ObId> ob(src.objects.size());
  std::vector<ArId> ar(src.arrows.size());
  for (ObId s = 0; s < ob.size(); ++s) {
    const auto& k = src.objects[s];
    ob[s] = *dst.find_object(0, d.u_prime.ob(k.b), b.compose(d.alpha.at(k.b), d.u.ar(k.g)));
  }
  for (ArId f = 0; f < ar.size(); ++f) {
    ObId s = src.cat->dom(f), t = src.cat->cod(f);
    ar[f] = dst.find_arrow(ob[s], ob[t], pt, d.u_prime.ar(src.arrows[f].g));
  }
  Functor fn(src.cat, dst.cat, std::move(ob), std::move(ar));
  return InducedFunctor{std::move(src), std::move(dst), std::move(fn)};
}

// ---------------------------------------------------------------------------
// Link categories

/// A′_(a,b′,g): objects (a′, f : a → v(a′), g′ : u′(a′) → b′) with
/// w(g′)∘α_{a′}∘u(f) = g; arrows k : a′₁ → a′₂ with v(k)∘f₁ = f₂ and
/// g′₂∘u′(k) = g′₁.
struct LinkData {
  struct Key {
    ObId a_prime;
    ArId f;
    ArId g_prime;
  };
  CatRef cat;
  std::vector<Key> objects;
  std::vector<ArId> arrows;  // underlying arrow of A′
};

inline LinkData link_category(const TwoSquare& d, ObId a, ObId bp, ArId g, const Limits& limits = {}) {
  const FinCat& ap = d.a_prime();
  const FinCat& ac = d.a();
  const FinCat& bpc = d.b_prime();
  const FinCat& b = d.b();
  if (a >= ac.object_count() || bp >= bpc.object_count())
    throw Error(ErrorKind::UnknownObject, "link category: object out of range");
  if (g >= b.arrow_count() || b.dom(g) != d.u.ob(a) || b.cod(g) != d.w.ob(bp))
    throw Error(ErrorKind::ArrowMismatch, "link category: g is not an arrow u(a) -> w(b')");

  CategoryBuilder bld(limits);
  LinkData out;
  for (ObId x = 0; x < ap.object_count(); ++x) {
    const ArId ax = d.alpha.at(x);
    for (ArId f : ac.hom(a, d.v.ob(x)))
      for (ArId gp : bpc.hom(d.u_prime.ob(x), bp)) {
        if (b.compose({d.w.ar(gp), ax, d.u.ar(f)}) != g) continue;
        bld.add_object(detail::tuple_name({ap.object_name(x), ac.arrow_name(f), bpc.arrow_name(gp)}));
        out.objects.push_back({x, f, gp});
      }
  }
  const auto& obs = out.objects;
  std::map<std::tuple<ObId, ObId, ArId>, ArId> index;
  for (ObId s = 0; s < obs.size(); ++s)
    for (ObId t = 0; t < obs.size(); ++t)
      for (ArId k : ap.hom(obs[s].a_prime, obs[t].a_prime)) {
        if (ac.compose(d.v.ar(k), obs[s].f) != obs[t].f) continue;
        if (bpc.compose(obs[t].g_prime, d.u_prime.ar(k)) != obs[s].g_prime) continue;
        ArId id = bld.add_arrow(
            detail::tuple_name({ap.arrow_name(k), bld.partial().object_name(s), bld.partial().object_name(t)}), s, t);
        out.arrows.push_back(k);
        index.emplace(std::make_tuple(s, t, k), id);
      }
  for (ObId s = 0; s < obs.size(); ++s) bld.set_identity(s, index.at({s, s, ap.identity(obs[s].a_prime)}));
  auto dom = [&](ArId f) { return bld.dom(f); };
  auto cod = [&](ArId f) { return bld.cod(f); };
  const auto& ks = out.arrows;
  out.cat = make_cat(std::move(bld).build([&](ArId g2, ArId f2) {
    return index.at({dom(f2), cod(g2), ap.compose(ks[g2], ks[f2])});
  }));
  return out;
}

// ---------------------------------------------------------------------------
// Algebra of squares

/// v = id, u = u′ = f, w = id; the unit for horizontal pasting.
inline TwoSquare horizontal_identity(const Functor& f) {
  return TwoSquare(identity_functor(f.src_ref()), f, f, identity_functor(f.dst_ref()), identity_nat(f));
}

/// v = w = f, u = u′ = id; the unit for vertical pasting.
inline TwoSquare vertical_identity(const Functor& f) {
  return TwoSquare(f, identity_functor(f.dst_ref()), identity_functor(f.src_ref()), f, identity_nat(f));
}

/// All four functors id_A.
inline TwoSquare identity_square(const CatRef& a) { return horizontal_identity(identity_functor(a)); }

/// Pastes `left` (v′ : A″ → A′, u′, u″, w′ : B″ → B′, α′) onto the left of
/// `d`: v″ = v∘v′, w″ = w∘w′, α″ = (w⋆α′)∘(α⋆v′).
inline TwoSquare compose_h(const TwoSquare& d, const TwoSquare& left) {
  if (!(left.u == d.u_prime)) throw Error(ErrorKind::BoundaryMismatch, "compose_h: squares do not share an edge");
  NatTrans a2 = vcompose(whisker(d.w, left.alpha), whisker(d.alpha, left.v));
  return TwoSquare(compose(d.v, left.v), d.u, left.u_prime, compose(d.w, left.w), std::move(a2));
}

/// Pastes `bottom` below `top`, where top.w = bottom.v. The composite has
/// u = bottom.u∘top.u, u′ = bottom.u′∘top.u′ and α = (β⋆top.u′)∘(bottom.u⋆α).
inline TwoSquare compose_v(const TwoSquare& top, const TwoSquare& bottom) {
  if (!(top.w == bottom.v)) throw Error(ErrorKind::BoundaryMismatch, "compose_v: squares do not share an edge");
  NatTrans g = vcompose(whisker(bottom.alpha, top.u_prime), whisker(bottom.u, top.alpha));
  return TwoSquare(top.v, compose(bottom.u, top.u), compose(bottom.u_prime, top.u_prime), bottom.w, std::move(g));
}

/// v ↦ u′^op, u ↦ w^op, u′ ↦ v^op, w ↦ u^op, α ↦ α^op. Opposite categories are
/// shared when corners coincide.
inline TwoSquare opposite_square(const TwoSquare& d) {
  std::vector<std::pair<const FinCat*, CatRef>> cache;
  auto op = [&](const CatRef& c) {
    for (auto& [k, v] : cache)
      if (k == c.get()) return v;
    CatRef o = opposite(c);
    cache.emplace_back(c.get(), o);
    return o;
  };
  CatRef ap = op(d.a_prime_ref()), a = op(d.a_ref()), bp = op(d.b_prime_ref()), b = op(d.b_ref());
  Functor v = opposite(d.u_prime, ap, bp);
  Functor u = opposite(d.w, bp, b);
  Functor up = opposite(d.v, ap, a);
  Functor w = opposite(d.u, a, b);
  // α^op : (w u′)^op ⇒ (u v)^op, i.e. u_new∘v_new ⇒ w_new∘u′_new
  NatTrans alpha = NatTrans::trusted(compose(u, v), compose(w, up), d.alpha.components());
  return TwoSquare(std::move(v), std::move(u), std::move(up), std::move(w), std::move(alpha));
}

}  // namespace catsq
