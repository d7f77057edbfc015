#pragma once

#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "catsq/exactness.hpp"

namespace catsq {

using Elem = std::uint32_t;
/// A function between finite sets, as an index table.
using FinMap = std::vector<Elem>;

/// A presheaf of finite sets on A: a set per object and, for f : x → y, a map
/// F(y) → F(x).
class Presheaf {
 public:
  Presheaf(CatRef base, std::vector<std::vector<std::string>> elements, std::vector<FinMap> action)
      : base_(std::move(base)), elements_(std::move(elements)), action_(std::move(action)) {
    if (auto problem = check(); !problem.empty()) throw Error(ErrorKind::NotAFunctor, "presheaf: " + problem);
  }

  static Presheaf trusted(CatRef base, std::vector<std::vector<std::string>> elements, std::vector<FinMap> action) {
    return Presheaf(std::move(base), std::move(elements), std::move(action), Trusted{});
  }

  const FinCat& base() const { return *base_; }
  const CatRef& base_ref() const { return base_; }
  std::size_t size(ObId x) const { return elements_[x].size(); }
  const std::vector<std::string>& at(ObId x) const { return elements_[x]; }
  const std::vector<std::vector<std::string>>& elements() const { return elements_; }
  const FinMap& act(ArId f) const { return action_[f]; }
  Elem act(ArId f, Elem y) const { return action_[f][y]; }
  const std::vector<FinMap>& actions() const { return action_; }

  std::string check() const {
    const FinCat& a = *base_;
    if (elements_.size() != a.object_count() || action_.size() != a.arrow_count()) return "table sizes do not match";
    for (ArId f = 0; f < a.arrow_count(); ++f) {
      const auto& m = action_[f];
      if (m.size() != size(a.cod(f))) return "action of " + a.arrow_name(f) + " has the wrong domain";
      for (Elem e : m)
        if (e >= size(a.dom(f))) return "action of " + a.arrow_name(f) + " leaves its codomain";
    }
    for (ObId x = 0; x < a.object_count(); ++x) {
      const auto& m = action_[a.identity(x)];
      for (Elem e = 0; e < m.size(); ++e)
        if (m[e] != e) return "identity of " + a.object_name(x) + " acts non-trivially";
    }
    for (ArId f = 0; f < a.arrow_count(); ++f)
      for (ArId g : a.out_arrows(a.cod(f))) {
        const auto& gf = action_[a.compose(g, f)];
        for (Elem z = 0; z < gf.size(); ++z)
          if (gf[z] != action_[f][action_[g][z]])
            return "action of " + a.arrow_name(g) + "." + a.arrow_name(f) + " is not F(f).F(g)";
      }
    return {};
  }

  friend bool operator==(const Presheaf& x, const Presheaf& y) {
    return same_category(*x.base_, *y.base_) && x.elements_ == y.elements_ && x.action_ == y.action_;
  }

 private:
  struct Trusted {};
  Presheaf(CatRef base, std::vector<std::vector<std::string>> elements, std::vector<FinMap> action, Trusted)
      : base_(std::move(base)), elements_(std::move(elements)), action_(std::move(action)) {}

  CatRef base_;
  std::vector<std::vector<std::string>> elements_;
  std::vector<FinMap> action_;
};

inline bool is_bijection(const FinMap& m, std::size_t target_size) {
  if (m.size() != target_size) return false;
  std::vector<bool> hit(target_size, false);
  for (Elem e : m) {
    if (e >= target_size || hit[e]) return false;
    hit[e] = true;
  }
  return true;
}

class PresheafMorphism {
 public:
  PresheafMorphism(Presheaf src, Presheaf dst, std::vector<FinMap> components)
      : src_(std::move(src)), dst_(std::move(dst)), comp_(std::move(components)) {
    if (auto problem = check(); !problem.empty()) throw Error(ErrorKind::NotNatural, "presheaf morphism: " + problem);
  }

  const Presheaf& src() const { return src_; }
  const Presheaf& dst() const { return dst_; }
  const FinMap& at(ObId x) const { return comp_[x]; }
  const std::vector<FinMap>& components() const { return comp_; }

  std::string check() const {
    if (!same_category(src_.base(), dst_.base())) return "different bases";
    const FinCat& a = src_.base();
    if (comp_.size() != a.object_count()) return "component count does not match";
    for (ObId x = 0; x < a.object_count(); ++x) {
      if (comp_[x].size() != src_.size(x)) return "component at " + a.object_name(x) + " has the wrong domain";
      for (Elem e : comp_[x])
        if (e >= dst_.size(x)) return "component at " + a.object_name(x) + " leaves its codomain";
    }
    for (ArId f = 0; f < a.arrow_count(); ++f) {
      ObId x = a.dom(f), y = a.cod(f);
      for (Elem e = 0; e < src_.size(y); ++e)
        if (comp_[x][src_.act(f, e)] != dst_.act(f, comp_[y][e]))
          return "naturality fails at " + a.arrow_name(f);
    }
    return {};
  }

  /// Componentwise bijective.
  bool is_iso() const {
    for (ObId x = 0; x < comp_.size(); ++x)
      if (!is_bijection(comp_[x], dst_.size(x))) return false;
    return true;
  }

  std::optional<ObId> first_non_iso() const {
    for (ObId x = 0; x < comp_.size(); ++x)
      if (!is_bijection(comp_[x], dst_.size(x))) return x;
    return std::nullopt;
  }

  friend bool operator==(const PresheafMorphism& x, const PresheafMorphism& y) {
    return x.src_ == y.src_ && x.dst_ == y.dst_ && x.comp_ == y.comp_;
  }

 private:
  Presheaf src_;
  Presheaf dst_;
  std::vector<FinMap> comp_;
};

inline PresheafMorphism identity_morphism(const Presheaf& p) {
  std::vector<FinMap> comp(p.base().object_count());
  for (ObId x = 0; x < comp.size(); ++x) {
    comp[x].resize(p.size(x));
    std::iota(comp[x].begin(), comp[x].end(), 0);
  }
  return PresheafMorphism(p, p, std::move(comp));
}

/// ψ∘φ
inline PresheafMorphism compose(const PresheafMorphism& psi, const PresheafMorphism& phi) {
  if (!(phi.dst() == psi.src())) throw Error(ErrorKind::BoundaryMismatch, "presheaf morphisms are not composable");
  std::vector<FinMap> comp(phi.components().size());
  for (ObId x = 0; x < comp.size(); ++x)
    for (Elem e : phi.at(x)) comp[x].push_back(psi.at(x)[e]);
  return PresheafMorphism(phi.src(), psi.dst(), std::move(comp));
}

// ---------------------------------------------------------------------------
// Basic presheaves

/// Constant presheaf with the elements "0", …, "n-1".
inline Presheaf constant_presheaf(const CatRef& a, std::size_t n) {
  std::vector<std::string> xs;
  for (std::size_t i = 0; i < n; ++i) xs.push_back(std::to_string(i));
  FinMap id(n);
  std::iota(id.begin(), id.end(), 0);
  return Presheaf::trusted(a, std::vector(a->object_count(), xs), std::vector(a->arrow_count(), id));
}

/// Hom(−, a); elements are arrow names.
inline Presheaf representable(const CatRef& c, ObId a) {
  std::vector<std::vector<std::string>> els(c->object_count());
  std::vector<std::vector<ArId>> arrows(c->object_count());
  std::vector<std::map<ArId, Elem>> index(c->object_count());
  for (ObId x = 0; x < c->object_count(); ++x)
    for (ArId h : c->hom(x, a)) {
      index[x].emplace(h, static_cast<Elem>(arrows[x].size()));
      arrows[x].push_back(h);
      els[x].push_back(c->arrow_name(h));
    }
  std::vector<FinMap> act(c->arrow_count());
  for (ArId f = 0; f < c->arrow_count(); ++f)
    for (ArId h : arrows[c->cod(f)]) act[f].push_back(index[c->dom(f)].at(c->compose(h, f)));
  return Presheaf::trusted(c, std::move(els), std::move(act));
}

/// u^*G = G∘u.
inline Presheaf restrict(const Functor& u, const Presheaf& g) {
  if (!same_category(u.dst(), g.base())) throw Error(ErrorKind::BaseMismatch, "restrict: presheaf lives elsewhere");
  std::vector<std::vector<std::string>> els(u.src().object_count());
  std::vector<FinMap> act(u.src().arrow_count());
  for (ObId x = 0; x < els.size(); ++x) els[x] = g.at(u.ob(x));
  for (ArId f = 0; f < act.size(); ++f) act[f] = g.act(u.ar(f));
  return Presheaf::trusted(u.src_ref(), std::move(els), std::move(act));
}

inline PresheafMorphism restrict(const Functor& u, const PresheafMorphism& phi) {
  std::vector<FinMap> comp(u.src().object_count());
  for (ObId x = 0; x < comp.size(); ++x) comp[x] = phi.at(u.ob(x));
  return PresheafMorphism(restrict(u, phi.src()), restrict(u, phi.dst()), std::move(comp));
}

// ---------------------------------------------------------------------------
// Finite limits and colimits of presheaves on an index category

/// Compatible families (x_i) with P(f)(x_cod f) = x_dom f, lexicographic.
struct FinLimit {
  std::vector<std::vector<Elem>> families;
  std::map<std::vector<Elem>, Elem> index;
  std::vector<std::string> tokens;

  std::size_t size() const { return families.size(); }
};

inline FinLimit finset_limit(const Presheaf& p, const Limits& limits = {}) {
  const FinCat& c = p.base();
  const std::size_t n = c.object_count();
  FinLimit out;
  std::vector<Elem> fam(n, 0);
  std::size_t steps = 0;
  auto ok_at = [&](ObId i) {
    for (ArId f : c.out_arrows(i))
      if (c.cod(f) <= i && p.act(f, fam[c.cod(f)]) != fam[i]) return false;
    for (ArId f : c.in_arrows(i))
      if (c.dom(f) < i && p.act(f, fam[i]) != fam[c.dom(f)]) return false;
    return true;
  };
  std::function<void(ObId)> rec = [&](ObId i) {
    guard(++steps <= limits.max_search_steps, "limit enumeration exceeds the search budget");
    if (i == n) {
      guard(out.families.size() < limits.max_elements, "limit exceeds the element budget");
      out.families.push_back(fam);
      return;
    }
    for (Elem e = 0; e < p.size(i); ++e) {
      fam[i] = e;
      if (ok_at(i)) rec(i + 1);
    }
  };
  rec(0);
  for (Elem k = 0; k < out.families.size(); ++k) {
    out.index.emplace(out.families[k], k);
    std::string t = "(";
    for (ObId i = 0; i < n; ++i) t += (i ? "," : "") + p.at(i)[out.families[k][i]];
    out.tokens.push_back(t + ")");
  }
  return out;
}

/// Disjoint union of the P(i) modulo x ~ P(f)(x); classes are numbered by
/// their least representative (object order, then element order).
struct FinColimit {
  std::vector<std::size_t> offset;       // flat index of (i, 0)
  std::vector<Elem> class_of;            // per flat element
  std::vector<std::pair<ObId, Elem>> representative;
  std::vector<std::string> tokens;

  std::size_t size() const { return representative.size(); }
  Elem cls(ObId i, Elem x) const { return class_of[offset[i] + x]; }
};

inline FinColimit finset_colimit(const Presheaf& p, const Limits& limits = {}) {
  const FinCat& c = p.base();
  FinColimit out;
  std::size_t total = 0;
  for (ObId i = 0; i < c.object_count(); ++i) {
    out.offset.push_back(total);
    total += p.size(i);
  }
  guard(total <= limits.max_elements, "colimit exceeds the element budget");
  std::vector<std::size_t> parent(total);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (ArId f = 0; f < c.arrow_count(); ++f)
    for (Elem x = 0; x < p.size(c.cod(f)); ++x) {
      std::size_t s = find(out.offset[c.cod(f)] + x), t = find(out.offset[c.dom(f)] + p.act(f, x));
      if (s != t) parent[std::max(s, t)] = std::min(s, t);
    }
  out.class_of.assign(total, 0);
  std::vector<std::int64_t> idx(total, -1);
  for (ObId i = 0; i < c.object_count(); ++i)
    for (Elem x = 0; x < p.size(i); ++x) {
      std::size_t r = find(out.offset[i] + x);
      if (idx[r] < 0) {
        idx[r] = static_cast<std::int64_t>(out.representative.size());
        out.representative.emplace_back(i, x);
        out.tokens.push_back("[" + c.object_name(i) + ":" + p.at(i)[x] + "]");
      }
      out.class_of[out.offset[i] + x] = static_cast<Elem>(idx[r]);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Kan extensions

/// u_*F with its pointwise data: the value at b is the limit of F over A/b.
struct RightKan {
  Presheaf result;
  std::vector<CommaData> slices;
  std::vector<FinLimit> limits;
};

/// u_!F: the value at b is the colimit of F over b\A.
struct LeftKan {
  Presheaf result;
  std::vector<CommaData> coslices;
  std::vector<FinColimit> colimits;
};

inline RightKan ran(const Functor& u, const Presheaf& f, const Limits& limits = {}) {
  if (!same_category(u.src(), f.base())) throw Error(ErrorKind::BaseMismatch, "ran: presheaf lives elsewhere");
  const FinCat& b = u.dst();
  std::vector<CommaData> slices;
  std::vector<FinLimit> lims;
  std::vector<std::vector<std::string>> els(b.object_count());
  for (ObId y = 0; y < b.object_count(); ++y) {
    slices.push_back(slice(u, y, limits));
    lims.push_back(finset_limit(restrict(slices.back().proj_left, f), limits));
    els[y] = lims.back().tokens;
  }
  std::vector<FinMap> act(b.arrow_count());
  for (ArId h = 0; h < b.arrow_count(); ++h) {
    ObId y1 = b.dom(h), y2 = b.cod(h);
    const auto& s1 = slices[y1];
    const auto& s2 = slices[y2];
    std::vector<Elem> fam(s1.objects.size());
    for (const auto& x : lims[y2].families) {
      for (ObId k = 0; k < fam.size(); ++k) {
        const auto& key = s1.objects[k];
        fam[k] = x[*s2.find_object(key.a, 0, b.compose(h, key.g))];
      }
      act[h].push_back(lims[y1].index.at(fam));
    }
  }
  Presheaf res(u.dst_ref(), std::move(els), std::move(act));
  return RightKan{std::move(res), std::move(slices), std::move(lims)};
}

inline LeftKan lan(const Functor& u, const Presheaf& f, const Limits& limits = {}) {
  if (!same_category(u.src(), f.base())) throw Error(ErrorKind::BaseMismatch, "lan: presheaf lives elsewhere");
  const FinCat& b = u.dst();
  std::vector<CommaData> cos;
  std::vector<FinColimit> cols;
  std::vector<std::vector<std::string>> els(b.object_count());
  for (ObId y = 0; y < b.object_count(); ++y) {
    cos.push_back(coslice(u, y, limits));
    cols.push_back(finset_colimit(restrict(cos.back().proj_right, f), limits));
    els[y] = cols.back().tokens;
  }
  std::vector<FinMap> act(b.arrow_count());
  for (ArId h = 0; h < b.arrow_count(); ++h) {
    ObId y1 = b.dom(h), y2 = b.cod(h);
    const auto& c1 = cos[y1];
    const auto& c2 = cos[y2];
    for (const auto& [k, x] : cols[y2].representative) {
      const auto& key = c2.objects[k];
      ObId k1 = *c1.find_object(0, key.b, b.compose(key.g, h));
      act[h].push_back(cols[y1].cls(k1, x));
    }
  }
  Presheaf res(u.dst_ref(), std::move(els), std::move(act));
  return LeftKan{std::move(res), std::move(cos), std::move(cols)};
}

/// Unit G ⇒ u_*u^*G of u^* ⊣ u_*: y ↦ ((a, g) ↦ G(g)(y)).
inline PresheafMorphism ran_unit(const Functor& u, const Presheaf& g, const Limits& limits = {}) {
  RightKan k = ran(u, restrict(u, g), limits);
  const FinCat& b = u.dst();
  std::vector<FinMap> comp(b.object_count());
  for (ObId y = 0; y < b.object_count(); ++y) {
    const auto& sl = k.slices[y];
    std::vector<Elem> fam(sl.objects.size());
    for (Elem e = 0; e < g.size(y); ++e) {
      for (ObId i = 0; i < fam.size(); ++i) fam[i] = g.act(sl.objects[i].g, e);
      comp[y].push_back(k.limits[y].index.at(fam));
    }
  }
  return PresheafMorphism(g, k.result, std::move(comp));
}

/// Counit u^*u_*F ⇒ F: a family over A/u(a) ↦ its value at (a, id).
inline PresheafMorphism ran_counit(const Functor& u, const Presheaf& f, const Limits& limits = {}) {
  RightKan k = ran(u, f, limits);
  const FinCat& a = u.src();
  std::vector<FinMap> comp(a.object_count());
  for (ObId x = 0; x < a.object_count(); ++x) {
    ObId y = u.ob(x);
    ObId at = *k.slices[y].find_object(x, 0, u.dst().identity(y));
    for (const auto& fam : k.limits[y].families) comp[x].push_back(fam[at]);
  }
  return PresheafMorphism(restrict(u, k.result), f, std::move(comp));
}

/// Unit F ⇒ u^*u_!F of u_! ⊣ u^*: x ↦ class of x at (a, id).
inline PresheafMorphism lan_unit(const Functor& u, const Presheaf& f, const Limits& limits = {}) {
  LeftKan k = lan(u, f, limits);
  const FinCat& a = u.src();
  std::vector<FinMap> comp(a.object_count());
  for (ObId x = 0; x < a.object_count(); ++x) {
    ObId y = u.ob(x);
    ObId at = *k.coslices[y].find_object(0, x, u.dst().identity(y));
    for (Elem e = 0; e < f.size(x); ++e) comp[x].push_back(k.colimits[y].cls(at, e));
  }
  return PresheafMorphism(f, restrict(u, k.result), std::move(comp));
}

/// Counit u_!u^*G ⇒ G: class of y at (a, g : b → u(a)) ↦ G(g)(y).
inline PresheafMorphism lan_counit(const Functor& u, const Presheaf& g, const Limits& limits = {}) {
  LeftKan k = lan(u, restrict(u, g), limits);
  const FinCat& b = u.dst();
  std::vector<FinMap> comp(b.object_count());
  for (ObId y = 0; y < b.object_count(); ++y)
    for (const auto& [i, e] : k.colimits[y].representative) comp[y].push_back(g.act(k.coslices[y].objects[i].g, e));
  return PresheafMorphism(k.result, g, std::move(comp));
}

// ---------------------------------------------------------------------------
// Hom sets between presheaves

/// Every morphism P → Q, in lexicographic order of component tables.
template <class Visit>
void for_each_morphism(const Presheaf& p, const Presheaf& q, Visit&& visit, const Limits& limits = {}) {
  if (!same_category(p.base(), q.base())) throw Error(ErrorKind::BaseMismatch, "morphisms: different bases");
  const FinCat& c = p.base();
  const ObId n = static_cast<ObId>(c.object_count());
  std::vector<FinMap> comp(n);
  std::size_t steps = 0;
  bool stop = false;
  auto natural_with_earlier = [&](ObId x) {
    for (ArId f : c.out_arrows(x)) {
      ObId y = c.cod(f);
      if (y > x) continue;
      for (Elem e = 0; e < p.size(y); ++e)
        if (comp[x][p.act(f, e)] != q.act(f, comp[y][e])) return false;
    }
    for (ArId f : c.in_arrows(x)) {
      ObId w = c.dom(f);
      if (w >= x) continue;
      for (Elem e = 0; e < p.size(x); ++e)
        if (comp[w][p.act(f, e)] != q.act(f, comp[x][e])) return false;
    }
    return true;
  };
  std::function<void(ObId, Elem)> rec = [&](ObId x, Elem e) {
    if (stop) return;
    guard(++steps <= limits.max_search_steps, "morphism enumeration exceeds the search budget");
    if (x == n) {
      if (!visit(comp)) stop = true;
      return;
    }
    if (e == p.size(x)) {
      if (natural_with_earlier(x)) rec(x + 1, 0);
      return;
    }
    for (Elem t = 0; t < q.size(x) && !stop; ++t) {
      comp[x].push_back(t);
      rec(x, e + 1);
      comp[x].pop_back();
    }
  };
  rec(0, 0);
}

inline std::vector<PresheafMorphism> all_morphisms(const Presheaf& p, const Presheaf& q, const Limits& limits = {}) {
  std::vector<PresheafMorphism> out;
  for_each_morphism(
      p, q,
      [&](const std::vector<FinMap>& comp) {
        out.emplace_back(p, q, comp);
        return true;
      },
      limits);
  return out;
}

/// Transpose of φ : u^*G → F under u^* ⊣ u_*: y ↦ ((a, g) ↦ φ_a(G(g)(y))).
inline PresheafMorphism ran_transpose(const Functor& u, const RightKan& k, const Presheaf& g,
                                      const PresheafMorphism& phi) {
  const FinCat& b = u.dst();
  std::vector<FinMap> comp(b.object_count());
  for (ObId y = 0; y < b.object_count(); ++y) {
    const auto& sl = k.slices[y];
    std::vector<Elem> fam(sl.objects.size());
    for (Elem e = 0; e < g.size(y); ++e) {
      for (ObId i = 0; i < fam.size(); ++i) fam[i] = phi.at(sl.objects[i].a)[g.act(sl.objects[i].g, e)];
      comp[y].push_back(k.limits[y].index.at(fam));
    }
  }
  return PresheafMorphism(g, k.result, std::move(comp));
}

/// Inverse transpose of ψ : G → u_*F: ψ♯_a(y) = ψ_{u(a)}(y) at (a, id).
inline PresheafMorphism ran_untranspose(const Functor& u, const RightKan& k, const Presheaf& f,
                                        const PresheafMorphism& psi) {
  const FinCat& a = u.src();
  std::vector<FinMap> comp(a.object_count());
  for (ObId x = 0; x < a.object_count(); ++x) {
    ObId y = u.ob(x);
    ObId at = *k.slices[y].find_object(x, 0, u.dst().identity(y));
    for (Elem e : psi.at(y)) comp[x].push_back(k.limits[y].families[e][at]);
  }
  return PresheafMorphism(restrict(u, psi.src()), f, std::move(comp));
}

/// Transpose of χ : u_!F → G under u_! ⊣ u^*: χ♯_a(x) = χ_{u(a)}([x at (a, id)]).
inline PresheafMorphism lan_transpose(const Functor& u, const LeftKan& k, const Presheaf& f,
                                      const PresheafMorphism& chi) {
  const FinCat& a = u.src();
  std::vector<FinMap> comp(a.object_count());
  for (ObId x = 0; x < a.object_count(); ++x) {
    ObId y = u.ob(x);
    ObId at = *k.coslices[y].find_object(0, x, u.dst().identity(y));
    for (Elem e = 0; e < f.size(x); ++e) comp[x].push_back(chi.at(y)[k.colimits[y].cls(at, e)]);
  }
  return PresheafMorphism(f, restrict(u, chi.dst()), std::move(comp));
}

/// Inverse transpose of θ : F → u^*G: [x at (a, g)] ↦ G(g)(θ_a(x)).
inline PresheafMorphism lan_untranspose(const Functor& u, const LeftKan& k, const Presheaf& g,
                                        const PresheafMorphism& theta) {
  const FinCat& b = u.dst();
  std::vector<FinMap> comp(b.object_count());
  for (ObId y = 0; y < b.object_count(); ++y)
    for (const auto& [i, e] : k.colimits[y].representative) {
      const auto& key = k.coslices[y].objects[i];
      comp[y].push_back(g.act(key.g, theta.at(key.b)[e]));
    }
  return PresheafMorphism(k.result, g, std::move(comp));
}

// ---------------------------------------------------------------------------
// Base change

struct BaseChange {
  PresheafMorphism morphism;
  bool is_iso;
};

/// c_D : w^*u_*F → u′_*v^*F. At b′ a family over A/w(b′) is restricted
/// along the induced slice functor A′/b′ → A/w(b′).
inline BaseChange base_change_coh(const TwoSquare& d, const Presheaf& f, const Limits& limits = {}) {
  if (!same_category(d.a(), f.base())) throw Error(ErrorKind::BaseMismatch, "c_D: presheaf must live on A");
  RightKan top = ran(d.u, f, limits);
  RightKan bottom = ran(d.u_prime, restrict(d.v, f), limits);
  Presheaf src = restrict(d.w, top.result);
  std::vector<FinMap> comp(d.b_prime().object_count());
  for (ObId bp = 0; bp < comp.size(); ++bp) {
    InducedFunctor phi = induced_slice_functor(d, bp, limits);
    const FinLimit& from = top.limits[d.w.ob(bp)];
    const FinLimit& to = bottom.limits[bp];
    std::vector<Elem> fam(phi.source.objects.size());
    for (const auto& x : from.families) {
      for (ObId i = 0; i < fam.size(); ++i) fam[i] = x[phi.functor.ob(i)];
      comp[bp].push_back(to.index.at(fam));
    }
  }
  PresheafMorphism m(std::move(src), bottom.result, std::move(comp));
  bool iso = m.is_iso();
  return BaseChange{std::move(m), iso};
}

/// c′_D : v_!u′^*G → u^*w_!G. At a the class of x at (a′, f) goes to the
/// class of x at (u′(a′), α_{a′}∘u(f)).
inline BaseChange base_change_hom(const TwoSquare& d, const Presheaf& g, const Limits& limits = {}) {
  if (!same_category(d.b_prime(), g.base())) throw Error(ErrorKind::BaseMismatch, "c'_D: presheaf must live on B'");
  LeftKan left = lan(d.v, restrict(d.u_prime, g), limits);
  LeftKan right = lan(d.w, g, limits);
  Presheaf dst = restrict(d.u, right.result);
  std::vector<FinMap> comp(d.a().object_count());
  for (ObId a = 0; a < comp.size(); ++a) {
    InducedFunctor psi = induced_coslice_functor(d, a, limits);
    const FinColimit& from = left.colimits[a];
    const FinColimit& to = right.colimits[d.u.ob(a)];
    for (const auto& [i, e] : from.representative) comp[a].push_back(to.cls(psi.functor.ob(i), e));
  }
  PresheafMorphism m(left.result, std::move(dst), std::move(comp));
  bool iso = m.is_iso();
  return BaseChange{std::move(m), iso};
}

/// Guitart exactness via representables: c′_D is invertible on every y(b′).
inline CheckReport guitart_oracle(const TwoSquare& d, const CheckOptions& opt = {}) {
  std::vector<Witness> ws;
  for (ObId bp = 0; bp < d.b_prime().object_count(); ++bp) {
    BaseChange bc = base_change_hom(d, representable(d.b_prime_ref(), bp), opt.limits);
    if (bc.is_iso) continue;
    ObId a = *bc.morphism.first_non_iso();
    ws.push_back({detail::tuple_name({d.a().object_name(a), d.b_prime().object_name(bp)}),
                  "base change on the representable at " + d.b_prime().object_name(bp) +
                      " not invertible: component sizes " + std::to_string(bc.morphism.src().size(a)) + " -> " +
                      std::to_string(bc.morphism.dst().size(a)),
                  {bp, a}});
    if (!opt.all_witnesses) break;
  }
  return detail::finish(std::move(ws));
}

// ---------------------------------------------------------------------------
// Localizer of the presheaf prederivator with values in C

enum class PresheafLocalizer { W0, Wgr, Wtr };

inline std::string_view to_string(PresheafLocalizer l) {
  switch (l) {
    case PresheafLocalizer::W0: return "W0";
    case PresheafLocalizer::Wgr: return "Wgr";
    case PresheafLocalizer::Wtr: return "Wtr";
  }
  return "?";
}

inline PresheafLocalizer classify_presheaf_localizer(const FinCat& c) {
  if (c.empty()) return PresheafLocalizer::Wtr;
  bool singleton = true, thin = true;
  for (ObId x = 0; x < c.object_count(); ++x)
    for (ObId y = 0; y < c.object_count(); ++y) {
      std::size_t n = c.hom(x, y).size();
      singleton = singleton && n == 1;
      thin = thin && n <= 1;
    }
  if (singleton) return PresheafLocalizer::Wtr;
  return thin ? PresheafLocalizer::Wgr : PresheafLocalizer::W0;
}

// ---------------------------------------------------------------------------
// Presheaf-level criteria

/// The unit const_B X → u_* const_A X is invertible for each sample size.
inline bool check_aspheric_via_presheaves(const Functor& u, const std::vector<std::size_t>& sizes = {0, 1, 2, 3},
                                          const Limits& limits = {}) {
  for (std::size_t n : sizes)
    if (!ran_unit(u, constant_presheaf(u.dst_ref(), n), limits).is_iso()) return false;
  return true;
}

/// For v = w∘u over C, the canonical w_* const_B X → v_* const_A X is
/// invertible for each sample size.
inline bool check_local_equiv_via_presheaves(const Functor& u, const Functor& v, const Functor& w,
                                             const std::vector<std::size_t>& sizes = {0, 1, 2, 3},
                                             const Limits& limits = {}) {
  if (!same_category(v.src(), u.src()) || !same_category(w.src(), u.dst()) || !(compose(w, u) == v))
    throw Error(ErrorKind::TriangleMismatch, "triangle does not commute: w.u != v");
  for (std::size_t n : sizes) {
    RightKan from = ran(w, constant_presheaf(w.src_ref(), n), limits);
    RightKan to = ran(v, constant_presheaf(v.src_ref(), n), limits);
    std::vector<FinMap> comp(v.dst().object_count());
    for (ObId c = 0; c < comp.size(); ++c) {
      const auto& sa = to.slices[c];
      const auto& sb = from.slices[c];
      std::vector<Elem> fam(sa.objects.size());
      for (const auto& x : from.limits[c].families) {
        for (ObId i = 0; i < fam.size(); ++i) fam[i] = x[*sb.find_object(u.ob(sa.objects[i].a), 0, sa.objects[i].g)];
        comp[c].push_back(to.limits[c].index.at(fam));
      }
    }
    if (!PresheafMorphism(from.result, to.result, std::move(comp)).is_iso()) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Der axioms on the presheaf instance

/// P on A ⊔ B from its two restrictions.
inline Presheaf glue(const Coproduct& s, const Presheaf& p1, const Presheaf& p2) {
  const FinCat& c = *s.cat;
  std::vector<std::vector<std::string>> els(c.object_count());
  std::vector<FinMap> act(c.arrow_count());
  for (ObId x = 0; x < p1.base().object_count(); ++x) els[s.in1.ob(x)] = p1.at(x);
  for (ObId x = 0; x < p2.base().object_count(); ++x) els[s.in2.ob(x)] = p2.at(x);
  for (ArId f = 0; f < p1.base().arrow_count(); ++f) act[s.in1.ar(f)] = p1.act(f);
  for (ArId f = 0; f < p2.base().arrow_count(); ++f) act[s.in2.ar(f)] = p2.act(f);
  return Presheaf(s.cat, std::move(els), std::move(act));
}

/// Inverse morphism of a componentwise bijection.
inline std::optional<PresheafMorphism> inverse_of(const PresheafMorphism& phi) {
  if (!phi.is_iso()) return std::nullopt;
  std::vector<FinMap> comp(phi.components().size());
  for (ObId x = 0; x < comp.size(); ++x) {
    comp[x].resize(phi.at(x).size());
    for (Elem e = 0; e < phi.at(x).size(); ++e) comp[x][phi.at(x)[e]] = e;
  }
  return PresheafMorphism(phi.dst(), phi.src(), std::move(comp));
}

struct DerReport {
  bool der1 = true;
  bool der2 = true;
  bool der4g = true;
  bool der4d = true;
  std::vector<std::string> failures;

  bool ok() const { return der1 && der2 && der4g && der4d; }
};

/// Der 1 on A ⊔ B, Der 2 on sampled morphisms, Der 4g/4d on u : A → B at every
/// b, for each sampled presheaf F on A and G on B.
inline DerReport der_axiom_suite(const Functor& u, const std::vector<Presheaf>& on_a, const std::vector<Presheaf>& on_b,
                                 const Limits& limits = {}) {
  DerReport r;
  const CatRef& a = u.src_ref();
  const CatRef& b = u.dst_ref();
  Coproduct s = coproduct_cat(a, b, limits);
  for (const auto& f : on_a)
    for (const auto& g : on_b) {
      Presheaf glued = glue(s, f, g);
      if (!(restrict(s.in1, glued) == f) || !(restrict(s.in2, glued) == g)) {
        r.der1 = false;
        r.failures.push_back("Der 1: glue then restrict is not the identity");
      }
      if (!(glue(s, restrict(s.in1, glued), restrict(s.in2, glued)) == glued)) {
        r.der1 = false;
        r.failures.push_back("Der 1: restrict then glue is not the identity");
      }
    }
  for (const auto& f : on_a) {
    for (const auto& phi : all_morphisms(f, f, limits)) {
      auto inv = inverse_of(phi);
      bool two_sided = inv && compose(*inv, phi) == identity_morphism(f) && compose(phi, *inv) == identity_morphism(f);
      if (two_sided != phi.is_iso()) {
        r.der2 = false;
        r.failures.push_back("Der 2: invertibility differs from componentwise bijectivity");
      }
    }
    for (ObId y = 0; y < b->object_count(); ++y) {
      TwoSquare d = comma_category(u, object_functor(b, y), limits).square();
      BaseChange bc = base_change_coh(d, f, limits);
      FinLimit direct = finset_limit(restrict(slice(u, y, limits).proj_left, f), limits);
      if (!bc.is_iso || bc.morphism.src().size(0) != direct.size() || bc.morphism.dst().size(0) != direct.size()) {
        r.der4g = false;
        r.failures.push_back("Der 4g fails at " + b->object_name(y));
      }
    }
  }
  for (const auto& f : on_a)
    for (ObId y = 0; y < b->object_count(); ++y) {
      TwoSquare d = comma_category(object_functor(b, y), u, limits).square();
      BaseChange bc = base_change_hom(d, f, limits);
      FinColimit direct = finset_colimit(restrict(coslice(u, y, limits).proj_right, f), limits);
      if (!bc.is_iso || bc.morphism.src().size(0) != direct.size() || bc.morphism.dst().size(0) != direct.size()) {
        r.der4d = false;
        r.failures.push_back("Der 4d fails at " + b->object_name(y));
      }
    }
  return r;
}

// ---------------------------------------------------------------------------
// Presheaves with values in a finite category C

/// The square Hom(D^op, C):
///
///     C^{B^op} --w^*--> C^{B′^op}
///        |                  |
///       u^*                u′^*
///        v                  v
///     C^{A^op} --v^*--> C^{A′^op}
///
/// with component G(α_{a′}) at G and a′.
struct PresheafSquare {
  FunctorCategory on_b;        // new A′
  FunctorCategory on_b_prime;  // new A
  FunctorCategory on_a;        // new B′
  FunctorCategory on_a_prime;  // new B
  TwoSquare square;
};

namespace detail {

/// f^* : C^{Y^op} → C^{X^op} for f : X → Y.
inline Functor precompose(const Functor& f, const FunctorCategory& from, const FunctorCategory& to) {
  std::vector<ObId> ob(from.objects.size());
  for (ObId i = 0; i < ob.size(); ++i) {
    const Functor& g = from.objects[i];
    std::vector<ObId> o(f.src().object_count());
    std::vector<ArId> a(f.src().arrow_count());
    for (ObId x = 0; x < o.size(); ++x) o[x] = g.ob(f.ob(x));
    for (ArId k = 0; k < a.size(); ++k) a[k] = g.ar(f.ar(k));
    ob[i] = to.object_index.at({o, a});
  }
  std::vector<ArId> ar(from.components.size());
  for (ArId t = 0; t < ar.size(); ++t) {
    std::vector<ArId> comp(f.src().object_count());
    for (ObId x = 0; x < comp.size(); ++x) comp[x] = from.components[t][f.ob(x)];
    ar[t] = to.find(ob[from.cat->dom(t)], ob[from.cat->cod(t)], comp);
  }
  return Functor::trusted(from.cat, to.cat, std::move(ob), std::move(ar));
}

}  // namespace detail

inline PresheafSquare presheaf_square(const TwoSquare& d, const CatRef& c, const Limits& limits = {}) {
  FunctorCategory fb = functor_category(opposite(d.b_ref()), c, limits);
  FunctorCategory fbp = functor_category(opposite(d.b_prime_ref()), c, limits);
  FunctorCategory fa = functor_category(opposite(d.a_ref()), c, limits);
  FunctorCategory fap = functor_category(opposite(d.a_prime_ref()), c, limits);
  Functor v = detail::precompose(d.w, fb, fbp);
  Functor u = detail::precompose(d.u_prime, fbp, fap);
  Functor up = detail::precompose(d.u, fb, fa);
  Functor w = detail::precompose(d.v, fa, fap);
  Functor uv = compose(u, v);
  Functor wu = compose(w, up);
  std::vector<ArId> comp(fb.objects.size());
  for (ObId i = 0; i < comp.size(); ++i) {
    std::vector<ArId> cs(d.a_prime().object_count());
    for (ObId x = 0; x < cs.size(); ++x) cs[x] = fb.objects[i].ar(d.alpha.at(x));
    comp[i] = fap.find(uv.ob(i), wu.ob(i), cs);
  }
  NatTrans alpha(uv, wu, std::move(comp));
  TwoSquare sq(std::move(v), std::move(u), std::move(up), std::move(w), std::move(alpha));
  return PresheafSquare{std::move(fb), std::move(fbp), std::move(fa), std::move(fap), std::move(sq)};
}

}  // namespace catsq
