#pragma once

#include <algorithm>
#include <atomic>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "catsq/properties.hpp"
#include "catsq/squares.hpp"

namespace catsq {

struct Witness {
  std::string location;
  std::string reason;
  /// Raw ids of the location, e.g. {a, b′, g} for link-category witnesses.
  std::vector<std::uint32_t> ids;

  friend bool operator==(const Witness&, const Witness&) = default;
};

struct CheckReport {
  bool verdict = true;
  /// False only for Beck-Chevalley checks whose adjoints do not exist.
  bool applicable = true;
  std::vector<Witness> witnesses;
  std::string note;

  bool holds() const { return applicable && verdict; }
};

struct CheckOptions {
  /// Collect every failing location instead of the first one per b′.
  bool all_witnesses = false;
  unsigned threads = 1;
  Limits limits;
  TieBreak tie_break = TieBreak::Least;
};

namespace detail {

inline CheckReport finish(std::vector<Witness> ws) {
  std::sort(ws.begin(), ws.end(), [](const Witness& x, const Witness& y) { return x.ids < y.ids; });
  CheckReport r;
  r.verdict = ws.empty();
  r.witnesses = std::move(ws);
  return r;
}

/// Runs `job(i)` for i in [0, n) on up to `threads` workers.
template <class Job>
void fan_out(std::size_t n, unsigned threads, Job&& job) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next++;
      if (i >= n) return;
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(threads, n); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline std::string pi0_mismatch(const Functor& u, Localizer l) {
  if (is_w_equivalence(u, l)) return {};
  if (l == Localizer::Wgr)
    return std::string(u.src().empty() ? "source empty" : "source nonempty") + ", target " +
           (u.dst().empty() ? "empty" : "nonempty");
  auto cs = connected_components(u.src());
  auto ct = connected_components(u.dst());
  return "pi0 map " + std::to_string(cs.count()) + " -> " + std::to_string(ct.count()) + " components: " +
         describe_components(u.src(), cs) + " -> " + describe_components(u.dst(), ct);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exactness via link categories

/// Failure reason for the link category at (a, b′, g); empty if aspherical.
inline std::string link_failure(const TwoSquare& d, ObId a, ObId bp, ArId g, Localizer l, const Limits& limits = {}) {
  LinkData link = link_category(d, a, bp, g, limits);
  return asphericity_failure(*link.cat, l, "link category");
}

inline CheckReport is_exact(const TwoSquare& d, Localizer l, const CheckOptions& opt = {}) {
  const FinCat& a = d.a();
  const FinCat& b = d.b();
  std::vector<std::vector<Witness>> per_bp(d.b_prime().object_count());
  detail::fan_out(per_bp.size(), opt.threads, [&](std::size_t i) {
    ObId bp = static_cast<ObId>(i);
    for (ObId x = 0; x < a.object_count(); ++x)
      for (ArId g : b.hom(d.u.ob(x), d.w.ob(bp))) {
        std::string why = link_failure(d, x, bp, g, l, opt.limits);
        if (why.empty()) continue;
        per_bp[i].push_back({d.triple_name(x, bp, g), std::move(why), {x, bp, g}});
        if (!opt.all_witnesses) return;
      }
  });
  std::vector<Witness> all;
  for (auto& ws : per_bp) std::move(ws.begin(), ws.end(), std::back_inserter(all));
  return detail::finish(std::move(all));
}

/// Second implementation: every induced slice functor A′/b′ → A/w(b′) is
/// coaspheric, i.e. each coslice (a, g)\φ is aspherical.
inline CheckReport is_exact_via_coaspherique(const TwoSquare& d, Localizer l, const CheckOptions& opt = {}) {
  std::vector<Witness> ws;
  for (ObId bp = 0; bp < d.b_prime().object_count(); ++bp) {
    InducedFunctor phi = induced_slice_functor(d, bp, opt.limits);
    for (ObId y = 0; y < phi.target.objects.size(); ++y) {
      CommaData under = coslice(phi.functor, y, opt.limits);
      std::string why = asphericity_failure(*under.cat, l, "coslice of the induced slice functor");
      if (why.empty()) continue;
      const auto& key = phi.target.objects[y];
      ws.push_back({d.triple_name(key.a, bp, key.g), std::move(why), {key.a, bp, key.g}});
      if (!opt.all_witnesses) break;
    }
  }
  return detail::finish(std::move(ws));
}

// ---------------------------------------------------------------------------
// Aspheric / coaspheric functors

inline CheckReport is_aspheric_functor(const Functor& u, Localizer l, const CheckOptions& opt = {}) {
  std::vector<Witness> ws;
  for (ObId b = 0; b < u.dst().object_count(); ++b) {
    CommaData s = slice(u, b, opt.limits);
    std::string why = asphericity_failure(*s.cat, l, "slice");
    if (why.empty()) continue;
    ws.push_back({u.dst().object_name(b), std::move(why), {b}});
    if (!opt.all_witnesses) break;
  }
  return detail::finish(std::move(ws));
}

/// Aspheric check of u^op; the slices of u^op are the opposite coslices.
inline CheckReport is_coaspheric_functor(const Functor& u, Localizer l, const CheckOptions& opt = {}) {
  Functor uop = opposite(u);
  CheckReport r = is_aspheric_functor(uop, l, opt);
  for (auto& w : r.witnesses) w.reason.replace(0, 5, "coslice");
  return r;
}

// ---------------------------------------------------------------------------
// Local / colocal equivalences over a base C, for a triangle v = w∘u

namespace detail {

/// A/c → B/c induced by u, or c\A → c\B when `co`.
inline Functor induced_on_commas(const Functor& u, const CommaData& from, const CommaData& to, bool co) {
  const ArId pt = point_category()->identity(0);
  std::vector<ObId> ob(from.objects.size());
  std::vector<ArId> ar(from.arrows.size());
  for (ObId s = 0; s < ob.size(); ++s) {
    const auto& k = from.objects[s];
    ob[s] = co ? *to.find_object(0, u.ob(k.b), k.g) : *to.find_object(u.ob(k.a), 0, k.g);
  }
  for (ArId f = 0; f < ar.size(); ++f) {
    ObId s = from.cat->dom(f), t = from.cat->cod(f);
    ar[f] = co ? to.find_arrow(ob[s], ob[t], pt, u.ar(from.arrows[f].g))
               : to.find_arrow(ob[s], ob[t], u.ar(from.arrows[f].f), pt);
  }
  return Functor::trusted(from.cat, to.cat, std::move(ob), std::move(ar));
}

inline CheckReport local_equivalence(const Functor& u, const Functor& v, const Functor& w, Localizer l,
                                     const CheckOptions& opt, bool co) {
  if (!same_category(v.src(), u.src()) || !same_category(w.src(), u.dst()) || !(compose(w, u) == v))
    throw Error(ErrorKind::TriangleMismatch, "triangle does not commute: w.u != v");
  std::vector<Witness> ws;
  for (ObId c = 0; c < v.dst().object_count(); ++c) {
    CommaData from = co ? coslice(v, c, opt.limits) : slice(v, c, opt.limits);
    CommaData to = co ? coslice(w, c, opt.limits) : slice(w, c, opt.limits);
    std::string why = pi0_mismatch(induced_on_commas(u, from, to, co), l);
    if (why.empty()) continue;
    ws.push_back({v.dst().object_name(c),
                  std::string(co ? "induced functor on coslices" : "induced functor on slices") +
                      " is not a W-equivalence: " + why,
                  {c}});
    if (!opt.all_witnesses) break;
  }
  return finish(std::move(ws));
}

}  // namespace detail

/// u : A → B over C with v = w∘u; checks A/c → B/c for every c.
inline CheckReport is_local_equivalence(const Functor& u, const Functor& v, const Functor& w, Localizer l,
                                        const CheckOptions& opt = {}) {
  return detail::local_equivalence(u, v, w, l, opt, false);
}

/// Dual: c\A → c\B for every c.
inline CheckReport is_colocal_equivalence(const Functor& u, const Functor& v, const Functor& w, Localizer l,
                                          const CheckOptions& opt = {}) {
  return detail::local_equivalence(u, v, w, l, opt, true);
}

// ---------------------------------------------------------------------------
// Weak exactness

/// Each induced slice functor A′/b′ → A/w(b′) is a colocal W-equivalence over A.
inline CheckReport is_weak_exact(const TwoSquare& d, Localizer l, const CheckOptions& opt = {}) {
  std::vector<Witness> ws;
  for (ObId bp = 0; bp < d.b_prime().object_count(); ++bp) {
    InducedFunctor phi = induced_slice_functor(d, bp, opt.limits);
    Functor over_src = compose(d.v, phi.source.proj_left);
    CheckReport r = is_colocal_equivalence(phi.functor, over_src, phi.target.proj_left, l, opt);
    for (auto& w : r.witnesses) {
      ObId a = w.ids[0];
      ws.push_back({detail::tuple_name({d.a().object_name(a), d.b_prime().object_name(bp)}), std::move(w.reason),
                    {bp, a}});
    }
  }
  return detail::finish(std::move(ws));
}

/// Dual criterion: each ψ_a : a\A′ → u(a)\B′ is a local W-equivalence over B′.
inline CheckReport is_weak_exact_dual(const TwoSquare& d, Localizer l, const CheckOptions& opt = {}) {
  std::vector<Witness> ws;
  for (ObId a = 0; a < d.a().object_count(); ++a) {
    InducedFunctor psi = induced_coslice_functor(d, a, opt.limits);
    Functor over_src = compose(d.u_prime, psi.source.proj_right);
    CheckReport r = is_local_equivalence(psi.functor, over_src, psi.target.proj_right, l, opt);
    for (auto& w : r.witnesses) {
      ObId bp = w.ids[0];
      ws.push_back({detail::tuple_name({d.a().object_name(a), d.b_prime().object_name(bp)}), std::move(w.reason),
                    {bp, a}});
    }
  }
  return detail::finish(std::move(ws));
}

// ---------------------------------------------------------------------------
// Proper / smooth functors, pre(co)fibrations

/// Every canonical functor from a fiber A_b → A/b is coaspheric.
inline CheckReport is_proper(const Functor& u, Localizer l, const CheckOptions& opt = {}) {
  std::vector<Witness> ws;
  for (ObId b = 0; b < u.dst().object_count(); ++b) {
    FiberData fb = fiber(u, b, opt.limits);
    CheckReport r = is_coaspheric_functor(fb.to_slice, l, opt);
    if (r.verdict) continue;
    const Witness& w = r.witnesses.front();
    ws.push_back({u.dst().object_name(b), "fiber -> slice not coaspheric at " + w.location + ": " + w.reason, {b}});
    if (!opt.all_witnesses) break;
  }
  return detail::finish(std::move(ws));
}

/// Every canonical functor from a fiber A_b → b\A is aspheric.
inline CheckReport is_smooth(const Functor& u, Localizer l, const CheckOptions& opt = {}) {
  std::vector<Witness> ws;
  for (ObId b = 0; b < u.dst().object_count(); ++b) {
    FiberData fb = fiber(u, b, opt.limits);
    CheckReport r = is_aspheric_functor(fb.to_coslice, l, opt);
    if (r.verdict) continue;
    const Witness& w = r.witnesses.front();
    ws.push_back({u.dst().object_name(b), "fiber -> coslice not aspheric at " + w.location + ": " + w.reason, {b}});
    if (!opt.all_witnesses) break;
  }
  return detail::finish(std::move(ws));
}

/// Every A_b → A/b has a left adjoint.
inline bool is_precofibration(const Functor& u, const Limits& limits = {}) {
  for (ObId b = 0; b < u.dst().object_count(); ++b)
    if (!find_left_adjoint(fiber(u, b, limits).to_slice)) return false;
  return true;
}

/// Every A_b → b\A has a right adjoint.
inline bool is_prefibration(const Functor& u, const Limits& limits = {}) {
  for (ObId b = 0; b < u.dst().object_count(); ++b)
    if (!find_right_adjoint(fiber(u, b, limits).to_coslice)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Beck-Chevalley

/// The mate c = (rw⋆ε′)(r⋆α⋆r′)(η⋆vr′) : v r′ ⇒ r w, given adjunctions
/// u ⊣ r and u′ ⊣ r′.
inline NatTrans bc_mate(const TwoSquare& d, const Adjunction& adj, const Adjunction& adj_prime) {
  const Functor& r = adj.right;
  const Functor& rp = adj_prime.right;
  NatTrans first = whisker(adj.unit, compose(d.v, rp));
  NatTrans second = whisker(r, whisker(d.alpha, rp));
  NatTrans third = whisker(compose(r, d.w), adj_prime.counit);
  return vcompose(third, vcompose(second, first));
}

inline CheckReport is_bc_left(const TwoSquare& d, const CheckOptions& opt = {}) {
  auto adj = find_right_adjoint(d.u, opt.tie_break);
  auto adj_p = find_right_adjoint(d.u_prime, opt.tie_break);
  CheckReport r;
  r.note = std::string("adjoint choice: ") + (opt.tie_break == TieBreak::Least ? "least" : "greatest") + " terminal";
  if (!adj || !adj_p) {
    r.applicable = false;
    r.verdict = false;
    r.witnesses.push_back({!adj ? "u" : "uprime", "no right adjoint", {}});
    return r;
  }
  NatTrans c = bc_mate(d, *adj, *adj_p);
  const FinCat& a = d.a();
  for (ObId bp = 0; bp < d.b_prime().object_count(); ++bp) {
    if (is_invertible(a, c.at(bp))) continue;
    r.verdict = false;
    r.witnesses.push_back({d.b_prime().object_name(bp), "mate component " + a.arrow_name(c.at(bp)) + " not invertible",
                           {bp}});
    if (!opt.all_witnesses) break;
  }
  return r;
}

inline CheckReport is_bc_right(const TwoSquare& d, const CheckOptions& opt = {}) {
  return is_bc_left(opposite_square(d), opt);
}

/// Every link category has a terminal object.
inline CheckReport has_final_object_criterion(const TwoSquare& d, const CheckOptions& opt = {}) {
  std::vector<Witness> ws;
  for (ObId bp = 0; bp < d.b_prime().object_count(); ++bp)
    for (ObId x = 0; x < d.a().object_count(); ++x) {
      bool stop = false;
      for (ArId g : d.b().hom(d.u.ob(x), d.w.ob(bp))) {
        LinkData link = link_category(d, x, bp, g, opt.limits);
        if (!terminal_objects(*link.cat).empty()) continue;
        ws.push_back({d.triple_name(x, bp, g), "link category has no terminal object", {x, bp, g}});
        if (!opt.all_witnesses) {
          stop = true;
          break;
        }
      }
      if (stop) break;
    }
  return detail::finish(std::move(ws));
}

}  // namespace catsq
