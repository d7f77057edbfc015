#pragma once

#include <iterator>
#include <string>
#include <utility>
#include <vector>

#include "catsq/fincat.hpp"

namespace catsq {

/// A functor between finite categories, fully tabulated. The constructor
/// checks preservation of dom/cod, identities and composition exhaustively.
class Functor {
 public:
  Functor(CatRef src, CatRef dst, std::vector<ObId> ob_map, std::vector<ArId> ar_map)
      : src_(std::move(src)), dst_(std::move(dst)), ob_(std::move(ob_map)), ar_(std::move(ar_map)) {
    if (auto problem = check(); !problem.empty()) throw Error(ErrorKind::NotAFunctor, problem);
  }

  /// Skips the functoriality check; for constructions that are functorial
  /// by design.
  static Functor trusted(CatRef src, CatRef dst, std::vector<ObId> ob_map, std::vector<ArId> ar_map) {
    return Functor(std::move(src), std::move(dst), std::move(ob_map), std::move(ar_map), Trusted{});
  }

  const FinCat& src() const { return *src_; }
  const FinCat& dst() const { return *dst_; }
  const CatRef& src_ref() const { return src_; }
  const CatRef& dst_ref() const { return dst_; }

  ObId ob(ObId x) const { return ob_[x]; }
  ArId ar(ArId f) const { return ar_[f]; }
  const std::vector<ObId>& ob_map() const { return ob_; }
  const std::vector<ArId>& ar_map() const { return ar_; }

  /// Empty when the tables form a functor, else a description of the first
  /// failure.
  std::string check() const {
    const FinCat& a = *src_;
    const FinCat& b = *dst_;
    if (ob_.size() != a.object_count() || ar_.size() != a.arrow_count()) return "map sizes do not match the source";
    for (ObId x : ob_)
      if (x >= b.object_count()) return "object image out of range";
    for (ArId f : ar_)
      if (f >= b.arrow_count()) return "arrow image out of range";
    for (ArId f = 0; f < a.arrow_count(); ++f) {
      if (b.dom(ar_[f]) != ob_[a.dom(f)] || b.cod(ar_[f]) != ob_[a.cod(f)])
        return "image of " + a.arrow_name(f) + " has the wrong source or target";
    }
    for (ObId x = 0; x < a.object_count(); ++x) {
      if (ar_[a.identity(x)] != b.identity(ob_[x])) return "identity of " + a.object_name(x) + " not preserved";
    }
    for (ArId f = 0; f < a.arrow_count(); ++f) {
      for (ArId g : a.out_arrows(a.cod(f))) {
        if (ar_[a.compose(g, f)] != b.compose(ar_[g], ar_[f]))
          return "composite " + a.arrow_name(g) + "." + a.arrow_name(f) + " not preserved";
      }
    }
    return {};
  }

  friend bool operator==(const Functor& x, const Functor& y) {
    return x.ob_ == y.ob_ && x.ar_ == y.ar_ && same_category(*x.src_, *y.src_) &&
           same_category(*x.dst_, *y.dst_);
  }

 private:
  struct Trusted {};
  Functor(CatRef src, CatRef dst, std::vector<ObId> ob_map, std::vector<ArId> ar_map, Trusted)
      : src_(std::move(src)), dst_(std::move(dst)), ob_(std::move(ob_map)), ar_(std::move(ar_map)) {}

  CatRef src_;
  CatRef dst_;
  std::vector<ObId> ob_;
  std::vector<ArId> ar_;
};

inline Functor identity_functor(const CatRef& c) {
  std::vector<ObId> ob(c->object_count());
  std::vector<ArId> ar(c->arrow_count());
  for (ObId x = 0; x < ob.size(); ++x) ob[x] = x;
  for (ArId f = 0; f < ar.size(); ++f) ar[f] = f;
  return Functor::trusted(c, c, std::move(ob), std::move(ar));
}

/// g∘f
inline Functor compose(const Functor& g, const Functor& f) {
  if (!same_category(f.dst(), g.src())) throw Error(ErrorKind::BoundaryMismatch, "functors are not composable");
  std::vector<ObId> ob(f.src().object_count());
  std::vector<ArId> ar(f.src().arrow_count());
  for (ObId x = 0; x < ob.size(); ++x) ob[x] = g.ob(f.ob(x));
  for (ArId a = 0; a < ar.size(); ++a) ar[a] = g.ar(f.ar(a));
  return Functor::trusted(f.src_ref(), g.dst_ref(), std::move(ob), std::move(ar));
}

inline Functor constant_functor(const CatRef& src, const CatRef& dst, ObId target) {
  std::vector<ObId> ob(src->object_count(), target);
  std::vector<ArId> ar(src->arrow_count(), dst->identity(target));
  return Functor::trusted(src, dst, std::move(ob), std::move(ar));
}

/// A natural transformation between parallel functors, given by its
/// components; naturality is checked at construction.
class NatTrans {
 public:
  NatTrans(Functor src, Functor dst, std::vector<ArId> components)
      : src_(std::move(src)), dst_(std::move(dst)), comp_(std::move(components)) {
    if (auto problem = check(); !problem.empty()) throw Error(ErrorKind::NotNatural, problem);
  }

  static NatTrans trusted(Functor src, Functor dst, std::vector<ArId> components) {
    return NatTrans(std::move(src), std::move(dst), std::move(components), Trusted{});
  }

  const Functor& src() const { return src_; }
  const Functor& dst() const { return dst_; }
  ArId at(ObId x) const { return comp_[x]; }
  const std::vector<ArId>& components() const { return comp_; }

  std::string check() const {
    if (!same_category(src_.src(), dst_.src()) || !same_category(src_.dst(), dst_.dst()))
      return "functors are not parallel";
    const FinCat& a = src_.src();
    const FinCat& b = src_.dst();
    if (comp_.size() != a.object_count()) return "component count does not match the source category";
    for (ObId x = 0; x < a.object_count(); ++x) {
      ArId c = comp_[x];
      if (c >= b.arrow_count() || b.dom(c) != src_.ob(x) || b.cod(c) != dst_.ob(x))
        return "component at " + a.object_name(x) + " has the wrong source or target";
    }
    for (ArId f = 0; f < a.arrow_count(); ++f) {
      if (b.compose(dst_.ar(f), comp_[a.dom(f)]) != b.compose(comp_[a.cod(f)], src_.ar(f)))
        return "naturality square at " + a.arrow_name(f) + " does not commute";
    }
    return {};
  }

  friend bool operator==(const NatTrans& x, const NatTrans& y) {
    return x.comp_ == y.comp_ && x.src_ == y.src_ && x.dst_ == y.dst_;
  }

 private:
  struct Trusted {};
  NatTrans(Functor src, Functor dst, std::vector<ArId> components, Trusted)
      : src_(std::move(src)), dst_(std::move(dst)), comp_(std::move(components)) {}

  Functor src_;
  Functor dst_;
  std::vector<ArId> comp_;
};

inline NatTrans identity_nat(const Functor& f) {
  std::vector<ArId> comp(f.src().object_count());
  for (ObId x = 0; x < comp.size(); ++x) comp[x] = f.dst().identity(f.ob(x));
  return NatTrans::trusted(f, f, std::move(comp));
}

/// Vertical composite β∘α.
inline NatTrans vcompose(const NatTrans& beta, const NatTrans& alpha) {
  if (!(alpha.dst() == beta.src())) throw Error(ErrorKind::BoundaryMismatch, "2-cells are not composable");
  const FinCat& b = alpha.src().dst();
  std::vector<ArId> comp(alpha.components().size());
  for (ObId x = 0; x < comp.size(); ++x) comp[x] = b.compose(beta.at(x), alpha.at(x));
  return NatTrans::trusted(alpha.src(), beta.dst(), std::move(comp));
}

/// Left whiskering w⋆α: components w(α_x).
inline NatTrans whisker(const Functor& w, const NatTrans& alpha) {
  std::vector<ArId> comp(alpha.components().size());
  for (ObId x = 0; x < comp.size(); ++x) comp[x] = w.ar(alpha.at(x));
  return NatTrans::trusted(compose(w, alpha.src()), compose(w, alpha.dst()), std::move(comp));
}

/// Right whiskering α⋆v: components α_{v(x)}.
inline NatTrans whisker(const NatTrans& alpha, const Functor& v) {
  std::vector<ArId> comp(v.src().object_count());
  for (ObId x = 0; x < comp.size(); ++x) comp[x] = alpha.at(v.ob(x));
  return NatTrans::trusted(compose(alpha.src(), v), compose(alpha.dst(), v), std::move(comp));
}

// ---------------------------------------------------------------------------
// Opposites. Ids and names are kept, so op is an involution on the nose.

inline FinCat opposite_cat(const FinCat& c) {
  CategoryBuilder b(Limits{.max_objects = static_cast<std::size_t>(-1),
                           .max_arrows = static_cast<std::size_t>(-1)});
  for (ObId x = 0; x < c.object_count(); ++x) b.add_object(c.object_name(x));
  for (ArId f = 0; f < c.arrow_count(); ++f) b.add_arrow(c.arrow_name(f), c.cod(f), c.dom(f));
  for (ObId x = 0; x < c.object_count(); ++x) b.set_identity(x, c.identity(x));
  return std::move(b).build([&](ArId g, ArId f) { return c.compose(f, g); });
}

inline CatRef opposite(const CatRef& c) { return make_cat(opposite_cat(*c)); }

/// Functor u^op : A^op → B^op, built over freshly made opposite categories
/// unless they are supplied.
inline Functor opposite(const Functor& u, CatRef src_op = nullptr, CatRef dst_op = nullptr) {
  if (!src_op) src_op = opposite(u.src_ref());
  if (!dst_op) dst_op = (u.src_ref() == u.dst_ref()) ? src_op : opposite(u.dst_ref());
  return Functor::trusted(std::move(src_op), std::move(dst_op), u.ob_map(), u.ar_map());
}

/// α : F ⇒ G becomes α^op : G^op ⇒ F^op with the same components.
inline NatTrans opposite(const NatTrans& alpha, CatRef src_op = nullptr, CatRef dst_op = nullptr) {
  if (!src_op) src_op = opposite(alpha.src().src_ref());
  if (!dst_op) dst_op = opposite(alpha.src().dst_ref());
  Functor f = opposite(alpha.src(), src_op, dst_op);
  Functor g = opposite(alpha.dst(), src_op, dst_op);
  return NatTrans::trusted(std::move(g), std::move(f), alpha.components());
}

}  // namespace catsq
