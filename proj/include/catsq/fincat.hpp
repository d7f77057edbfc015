#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "catsq/error.hpp"

namespace catsq {

using ObId = std::uint32_t;
using ArId = std::uint32_t;

inline constexpr ArId kNoArrow = static_cast<ArId>(-1);

class CategoryBuilder;

/// A finite category given by explicit object and arrow lists and a total
/// composition table over composable pairs. Ids are dense indices in
/// declaration order; names are kept for reporting and serialization.
/// Instances are immutable once built.
class FinCat {
 public:
  FinCat() = default;

  std::size_t object_count() const { return ob_names_.size(); }
  std::size_t arrow_count() const { return ar_names_.size(); }
  bool empty() const { return ob_names_.empty(); }

  ObId dom(ArId f) const { return dom_[f]; }
  ObId cod(ArId f) const { return cod_[f]; }
  ArId identity(ObId x) const { return id_[x]; }
  bool is_identity(ArId f) const { return dom_[f] == cod_[f] && id_[dom_[f]] == f; }
  bool composable(ArId g, ArId f) const { return cod_[f] == dom_[g]; }

  /// g∘f; requires cod(f) = dom(g).
  ArId compose(ArId g, ArId f) const {
    return comp_[comp_offset_[f] + out_pos_[g]];
  }

  ArId compose(std::initializer_list<ArId> chain) const {
    // rightmost applied first: compose({h, g, f}) = h∘g∘f
    auto it = std::rbegin(chain);
    ArId acc = *it++;
    for (; it != std::rend(chain); ++it) acc = compose(*it, acc);
    return acc;
  }

  /// Arrows x → y in declaration order.
  std::span<const ArId> hom(ObId x, ObId y) const {
    const auto& out = out_[x];
    auto lo = std::lower_bound(out.begin(), out.end(), y,
                               [&](ArId f, ObId t) { return cod_[f] < t; });
    auto hi = std::upper_bound(lo, out.end(), y,
                               [&](ObId t, ArId f) { return t < cod_[f]; });
    return {lo, hi};
  }

  std::span<const ArId> out_arrows(ObId x) const { return out_[x]; }
  std::span<const ArId> in_arrows(ObId y) const { return in_[y]; }

  const std::string& object_name(ObId x) const { return ob_names_[x]; }
  const std::string& arrow_name(ArId f) const { return ar_names_[f]; }
  const std::vector<std::string>& object_names() const { return ob_names_; }
  const std::vector<std::string>& arrow_names() const { return ar_names_; }

  std::optional<ObId> find_object(const std::string& name) const {
    auto it = ob_lookup_.find(name);
    if (it == ob_lookup_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<ArId> find_arrow(const std::string& name) const {
    auto it = ar_lookup_.find(name);
    if (it == ar_lookup_.end()) return std::nullopt;
    return it->second;
  }

  ObId object(const std::string& name) const {
    auto x = find_object(name);
    if (!x) throw Error(ErrorKind::UnknownObject, name);
    return *x;
  }
  ArId arrow(const std::string& name) const {
    auto f = find_arrow(name);
    if (!f) throw Error(ErrorKind::UnknownArrow, name);
    return *f;
  }

  /// Same tables, ignoring names.
  friend bool same_shape(const FinCat& a, const FinCat& b) {
    return a.dom_ == b.dom_ && a.cod_ == b.cod_ && a.id_ == b.id_ && a.comp_ == b.comp_ &&
           a.out_ == b.out_;
  }
  friend bool operator==(const FinCat& a, const FinCat& b) {
    return same_shape(a, b) && a.ob_names_ == b.ob_names_ && a.ar_names_ == b.ar_names_;
  }

 private:
  friend class CategoryBuilder;

  std::vector<std::string> ob_names_;
  std::vector<std::string> ar_names_;
  std::vector<ObId> dom_;
  std::vector<ObId> cod_;
  std::vector<ArId> id_;
  std::vector<std::vector<ArId>> out_;  // sorted by (cod, id)
  std::vector<std::vector<ArId>> in_;   // sorted by (dom, id)
  std::vector<std::uint32_t> out_pos_;
  std::vector<std::size_t> comp_offset_;
  std::vector<ArId> comp_;
  std::unordered_map<std::string, ObId> ob_lookup_;
  std::unordered_map<std::string, ArId> ar_lookup_;
};

using CatRef = std::shared_ptr<const FinCat>;

/// Same category: shared instance or identical tables and names.
inline bool same_category(const FinCat& a, const FinCat& b) { return &a == &b || a == b; }

/// Assembles a FinCat from objects, arrows, identities and a composition
/// callback. Colliding names get a `~n` suffix so names stay unique.
class CategoryBuilder {
 public:
  explicit CategoryBuilder(Limits limits = {}) : limits_(limits) {}

  ObId add_object(std::string name) {
    guard(cat_.ob_names_.size() < limits_.max_objects,
          "object count exceeds " + std::to_string(limits_.max_objects));
    ObId x = static_cast<ObId>(cat_.ob_names_.size());
    name = unique_name(std::move(name), cat_.ob_lookup_);
    cat_.ob_lookup_.emplace(name, x);
    cat_.ob_names_.push_back(std::move(name));
    cat_.id_.push_back(kNoArrow);
    return x;
  }

  ArId add_arrow(std::string name, ObId dom, ObId cod) {
    guard(cat_.ar_names_.size() < limits_.max_arrows,
          "arrow count exceeds " + std::to_string(limits_.max_arrows));
    ArId f = static_cast<ArId>(cat_.ar_names_.size());
    name = unique_name(std::move(name), cat_.ar_lookup_);
    cat_.ar_lookup_.emplace(name, f);
    cat_.ar_names_.push_back(std::move(name));
    cat_.dom_.push_back(dom);
    cat_.cod_.push_back(cod);
    return f;
  }

  void set_identity(ObId x, ArId f) { cat_.id_[x] = f; }

  std::size_t object_count() const { return cat_.ob_names_.size(); }
  std::size_t arrow_count() const { return cat_.ar_names_.size(); }
  ObId dom(ArId f) const { return cat_.dom_[f]; }
  ObId cod(ArId f) const { return cat_.cod_[f]; }
  ArId identity(ObId x) const { return cat_.id_[x]; }

  /// Fills the composition table; `compose(g, f)` is called once per
  /// composable pair and must return the id of g∘f.
  template <class Compose>
  FinCat build(Compose&& compose) && {
    index();
    auto& c = cat_;
    for (ArId f = 0; f < c.ar_names_.size(); ++f) {
      for (ArId g : c.out_[c.cod_[f]]) c.comp_[c.comp_offset_[f] + c.out_pos_[g]] = compose(g, f);
    }
    return std::move(cat_);
  }

  /// Builds the index structures only; composition entries stay kNoArrow
  /// until `set_composite` fills them.
  void index() {
    auto& c = cat_;
    std::size_t n = c.ob_names_.size();
    c.out_.assign(n, {});
    c.in_.assign(n, {});
    for (ArId f = 0; f < c.ar_names_.size(); ++f) {
      c.out_[c.dom_[f]].push_back(f);
      c.in_[c.cod_[f]].push_back(f);
    }
    for (auto& out : c.out_) {
      std::stable_sort(out.begin(), out.end(), [&](ArId a, ArId b) { return c.cod_[a] < c.cod_[b]; });
    }
    for (auto& in : c.in_) {
      std::stable_sort(in.begin(), in.end(), [&](ArId a, ArId b) { return c.dom_[a] < c.dom_[b]; });
    }
    c.out_pos_.assign(c.ar_names_.size(), 0);
    for (const auto& out : c.out_) {
      for (std::uint32_t i = 0; i < out.size(); ++i) c.out_pos_[out[i]] = i;
    }
    c.comp_offset_.assign(c.ar_names_.size(), 0);
    std::size_t total = 0;
    for (ArId f = 0; f < c.ar_names_.size(); ++f) {
      c.comp_offset_[f] = total;
      total += c.out_[c.cod_[f]].size();
    }
    c.comp_.assign(total, kNoArrow);
  }

  const FinCat& partial() const { return cat_; }
  void set_composite(ArId g, ArId f, ArId h) {
    cat_.comp_[cat_.comp_offset_[f] + cat_.out_pos_[g]] = h;
  }
  ArId composite(ArId g, ArId f) const {
    return cat_.comp_[cat_.comp_offset_[f] + cat_.out_pos_[g]];
  }
  FinCat finish() && { return std::move(cat_); }

 private:
  template <class Map>
  static std::string unique_name(std::string name, const Map& taken) {
    if (!taken.contains(name)) return name;
    for (std::size_t n = 2;; ++n) {
      std::string candidate = name + "~" + std::to_string(n);
      if (!taken.contains(candidate)) return candidate;
    }
  }

  Limits limits_;
  FinCat cat_;
};

template <class... Args>
CatRef make_cat(Args&&... args) {
  return std::make_shared<const FinCat>(std::forward<Args>(args)...);
}

// ---------------------------------------------------------------------------
// Validation of user-supplied tables

enum class Shape { None, Poset, Discrete, Interval, Parallel };

struct RawArrow {
  std::string name;
  std::string dom;
  std::string cod;
};

struct RawComposite {
  std::string g;  // outer
  std::string f;  // inner
  std::string h;  // g∘f
};

struct RawCategory {
  std::vector<std::string> objects;
  std::vector<RawArrow> arrows;
  /// Explicit identity assignment (object → arrow listed in `arrows`).
  /// Objects without one get an implicit arrow `id_<object>`.
  std::vector<std::pair<std::string, std::string>> identities;
  std::vector<RawComposite> composites;
  Shape shape = Shape::None;
};

struct Violation {
  ErrorKind kind;
  std::string message;
  /// Which raw entry is at fault: 'o' object, 'a' arrow, 'i' identity,
  /// 'c' composite, 's' shape / whole table.
  char section = 's';
  std::size_t index = 0;
};

struct ValidationResult {
  std::optional<FinCat> category;
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

inline ValidationResult validate_category(const RawCategory& raw) {
  ValidationResult result;
  auto fail = [&](ErrorKind k, std::string msg, char section, std::size_t index) {
    result.violations.push_back({k, std::move(msg), section, index});
  };

  CategoryBuilder b(Limits{.max_objects = static_cast<std::size_t>(-1),
                           .max_arrows = static_cast<std::size_t>(-1)});
  std::map<std::string, ObId> objects;
  for (std::size_t i = 0; i < raw.objects.size(); ++i) {
    const auto& name = raw.objects[i];
    if (objects.contains(name)) {
      fail(ErrorKind::DuplicateId, "object '" + name + "' declared twice", 'o', i);
      continue;
    }
    objects.emplace(name, b.add_object(name));
  }

  std::map<std::string, std::string> explicit_id;
  for (std::size_t i = 0; i < raw.identities.size(); ++i) {
    const auto& [ob, ar] = raw.identities[i];
    if (!objects.contains(ob)) {
      fail(ErrorKind::DanglingId, "identity for unknown object '" + ob + "'", 'i', i);
      continue;
    }
    explicit_id[ob] = ar;
  }

  std::map<std::string, ArId> arrows;
  std::set<std::string> declared_names;
  for (const auto& a : raw.arrows) declared_names.insert(a.name);
  // implicit identities first, in object order
  for (const auto& name : raw.objects) {
    auto it = objects.find(name);
    if (it == objects.end() || explicit_id.contains(name) || b.identity(it->second) != kNoArrow) continue;
    std::string id_name = "id_" + name;
    if (declared_names.contains(id_name)) {
      fail(ErrorKind::DuplicateId, "arrow '" + id_name + "' clashes with the implicit identity of '" + name + "'",
           'o', static_cast<std::size_t>(it->second));
      continue;
    }
    ArId f = b.add_arrow(id_name, it->second, it->second);
    b.set_identity(it->second, f);
    arrows.emplace(id_name, f);
  }
  for (std::size_t i = 0; i < raw.arrows.size(); ++i) {
    const auto& a = raw.arrows[i];
    if (arrows.contains(a.name)) {
      fail(ErrorKind::DuplicateId, "arrow '" + a.name + "' declared twice", 'a', i);
      continue;
    }
    auto d = objects.find(a.dom);
    auto c = objects.find(a.cod);
    if (d == objects.end() || c == objects.end()) {
      fail(ErrorKind::DanglingId,
           "arrow '" + a.name + "' refers to unknown object '" + (d == objects.end() ? a.dom : a.cod) + "'", 'a', i);
      continue;
    }
    arrows.emplace(a.name, b.add_arrow(a.name, d->second, c->second));
  }
  for (std::size_t i = 0; i < raw.identities.size(); ++i) {
    const auto& [ob, ar] = raw.identities[i];
    auto o = objects.find(ob);
    auto f = arrows.find(ar);
    if (o == objects.end()) continue;
    if (f == arrows.end()) {
      fail(ErrorKind::DanglingId, "identity of '" + ob + "' names unknown arrow '" + ar + "'", 'i', i);
      continue;
    }
    if (b.dom(f->second) != o->second || b.cod(f->second) != o->second) {
      fail(ErrorKind::BadIdentity, "identity of '" + ob + "' is '" + ar + "', which is not an endo-arrow of it", 'i', i);
      continue;
    }
    b.set_identity(o->second, f->second);
  }
  if (!result.ok()) return result;

  b.index();
  const FinCat& c = b.partial();

  auto is_id = [&](ArId f) { return b.identity(c.dom(f)) == f; };

  // shape constraints
  auto non_identity_count = [&] {
    std::size_t n = 0;
    for (ArId f = 0; f < c.arrow_count(); ++f) n += !is_id(f);
    return n;
  };
  switch (raw.shape) {
    case Shape::None: break;
    case Shape::Discrete:
      if (non_identity_count() != 0) fail(ErrorKind::ShapeMismatch, "discrete shape with non-identity arrows", 's', 0);
      break;
    case Shape::Interval:
      if (c.object_count() != 2 || non_identity_count() != 1 || c.hom(0, 1).size() != 1)
        fail(ErrorKind::ShapeMismatch, "interval shape needs objects 0 < 1 with exactly one arrow between them", 's', 0);
      break;
    case Shape::Parallel:
      if (c.object_count() != 2 || c.hom(1, 0).size() != 0 || c.hom(0, 0).size() != 1 || c.hom(1, 1).size() != 1)
        fail(ErrorKind::ShapeMismatch, "parallel shape needs two objects and arrows only from the first to the second",
             's', 0);
      break;
    case Shape::Poset:
      for (ObId x = 0; x < c.object_count(); ++x)
        for (ObId y = 0; y < c.object_count(); ++y)
          if (c.hom(x, y).size() > 1)
            fail(ErrorKind::ShapeMismatch,
                 "poset shape with two arrows " + c.object_name(x) + " -> " + c.object_name(y), 's', 0);
      break;
  }
  if (!result.ok()) return result;

  for (std::size_t i = 0; i < raw.composites.size(); ++i) {
    const auto& rc = raw.composites[i];
    auto g = arrows.find(rc.g), f = arrows.find(rc.f), h = arrows.find(rc.h);
    if (g == arrows.end() || f == arrows.end() || h == arrows.end()) {
      const std::string& bad = g == arrows.end() ? rc.g : f == arrows.end() ? rc.f : rc.h;
      fail(ErrorKind::DanglingId, "composite " + rc.g + "." + rc.f + " = " + rc.h + " names unknown arrow '" + bad + "'",
           'c', i);
      continue;
    }
    if (c.cod(f->second) != c.dom(g->second)) {
      fail(ErrorKind::NotComposable,
           "composite " + rc.g + "." + rc.f + ": cod(" + rc.f + ") = " + c.object_name(c.cod(f->second)) +
               " but dom(" + rc.g + ") = " + c.object_name(c.dom(g->second)),
           'c', i);
      continue;
    }
    if (is_id(f->second) && h->second != g->second) {
      fail(ErrorKind::BadIdentity, "composite " + rc.g + "." + rc.f + " = " + rc.h + " violates the unit law (expected " +
                                       rc.g + ")", 'c', i);
      continue;
    }
    if (is_id(g->second) && h->second != f->second) {
      fail(ErrorKind::BadIdentity, "composite " + rc.g + "." + rc.f + " = " + rc.h + " violates the unit law (expected " +
                                       rc.f + ")", 'c', i);
      continue;
    }
    if (c.dom(h->second) != c.dom(f->second) || c.cod(h->second) != c.cod(g->second)) {
      fail(ErrorKind::BadComposite, "composite " + rc.g + "." + rc.f + " = " + rc.h + " has the wrong source or target",
           'c', i);
      continue;
    }
    ArId prev = b.composite(g->second, f->second);
    if (prev != kNoArrow && prev != h->second) {
      fail(ErrorKind::DuplicateId, "composite " + rc.g + "." + rc.f + " given twice with different values", 'c', i);
      continue;
    }
    b.set_composite(g->second, f->second, h->second);
  }

  for (ArId f = 0; f < c.arrow_count(); ++f) {
    for (ArId g : c.out_arrows(c.cod(f))) {
      if (b.composite(g, f) != kNoArrow) continue;
      if (is_id(f)) {
        b.set_composite(g, f, g);
      } else if (is_id(g)) {
        b.set_composite(g, f, f);
      } else if (raw.shape == Shape::Poset) {
        auto h = c.hom(c.dom(f), c.cod(g));
        if (h.size() == 1) {
          b.set_composite(g, f, h[0]);
        } else {
          fail(ErrorKind::MissingComposite,
               "poset shape: no arrow " + c.object_name(c.dom(f)) + " -> " + c.object_name(c.cod(g)) + " for " +
                   c.arrow_name(g) + "." + c.arrow_name(f),
               's', 0);
        }
      } else {
        fail(ErrorKind::MissingComposite, "composite " + c.arrow_name(g) + "." + c.arrow_name(f) + " is not defined",
             's', 0);
      }
    }
  }
  if (!result.ok()) return result;

  // associativity: report the first failing triple only
  for (ArId f = 0; f < c.arrow_count() && result.ok(); ++f) {
    for (ArId g : c.out_arrows(c.cod(f))) {
      ArId gf = b.composite(g, f);
      bool bad = false;
      for (ArId h : c.out_arrows(c.cod(g))) {
        if (b.composite(h, gf) != b.composite(b.composite(h, g), f)) {
          fail(ErrorKind::NonAssociative,
               "(" + c.arrow_name(h) + "." + c.arrow_name(g) + ")." + c.arrow_name(f) + " != " + c.arrow_name(h) +
                   ".(" + c.arrow_name(g) + "." + c.arrow_name(f) + ")",
               's', 0);
          bad = true;
          break;
        }
      }
      if (bad) break;
    }
  }
  if (!result.ok()) return result;

  result.category = std::move(b).finish();
  return result;
}

/// Validates and throws on the first violation.
inline FinCat make_category(const RawCategory& raw) {
  auto r = validate_category(raw);
  if (!r.ok()) throw Error(r.violations.front().kind, r.violations.front().message);
  return std::move(*r.category);
}

/// Re-checks the category laws of an already built table; used by tests on
/// internally constructed categories.
inline std::vector<Violation> check_laws(const FinCat& c) {
  std::vector<Violation> out;
  for (ArId f = 0; f < c.arrow_count(); ++f) {
    if (c.compose(c.identity(c.cod(f)), f) != f || c.compose(f, c.identity(c.dom(f))) != f)
      out.push_back({ErrorKind::BadIdentity, "unit law fails at " + c.arrow_name(f)});
    for (ArId g : c.out_arrows(c.cod(f))) {
      ArId gf = c.compose(g, f);
      if (gf == kNoArrow || c.dom(gf) != c.dom(f) || c.cod(gf) != c.cod(g)) {
        out.push_back({ErrorKind::BadComposite, c.arrow_name(g) + "." + c.arrow_name(f)});
        continue;
      }
      for (ArId h : c.out_arrows(c.cod(g))) {
        if (c.compose(h, gf) != c.compose(c.compose(h, g), f)) {
          out.push_back({ErrorKind::NonAssociative,
                         c.arrow_name(h) + "." + c.arrow_name(g) + "." + c.arrow_name(f)});
          return out;
        }
      }
    }
  }
  return out;
}

}  // namespace catsq
