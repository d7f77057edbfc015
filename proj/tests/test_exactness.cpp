#include <gtest/gtest.h>

#include "support.hpp"

using namespace catsq;
using namespace catsq::testing;

namespace {

constexpr Localizer kBoth[] = {Localizer::W0, Localizer::Wgr};

TwoSquare named(const std::string& file, const std::string& name) { return fixture(file).square(name); }

}  // namespace

// ---------------------------------------------------------------------------
// Exactness on the named examples

TEST(Exact, CommaSquaresAreExact) {
  Rng rng(11);
  for (int i = 0; i < 60; ++i) {
    TwoSquare d = random_comma_square(rng, {});
    for (Localizer l : kBoth) {
      EXPECT_TRUE(is_exact(d, l).verdict);
      EXPECT_TRUE(is_exact_via_coaspherique(d, l).verdict);
    }
  }
}

TEST(Exact, CommaFixture) {
  TwoSquare d = named("comma.catsq", "S");
  for (Localizer l : kBoth) EXPECT_TRUE(is_exact(d, l).verdict);
}

TEST(Exact, CocommaOverIntervalIsExact) {
  TwoSquare d = named("cocomma.catsq", "CocommaI");
  EXPECT_TRUE(is_exact(d, Localizer::W0).verdict);
  EXPECT_TRUE(is_exact_via_coaspherique(d, Localizer::W0).verdict);
}

TEST(Exact, CocommaOverDiscretePairIsNot) {
  TwoSquare d = named("cocomma.catsq", "CocommaPQ");
  CheckReport r = is_exact(d, Localizer::W0);
  ASSERT_FALSE(r.verdict);
  ASSERT_EQ(r.witnesses.size(), 1u);
  EXPECT_EQ(r.witnesses[0].location, "(•,•,t)");
  EXPECT_EQ(r.witnesses[0].reason, "link category has 2 components: {(p,id_•,id_•)},{(q,id_•,id_•)}");
  EXPECT_FALSE(is_exact_via_coaspherique(d, Localizer::W0).verdict);
  EXPECT_TRUE(is_exact(d, Localizer::Wgr).verdict);
}

TEST(Exact, WgrSquareSeparatesWeakFromExact) {
  TwoSquare d = named("wgr.catsq", "Swgr");
  CheckReport r = is_exact(d, Localizer::Wgr);
  ASSERT_FALSE(r.verdict);
  ASSERT_EQ(r.witnesses.size(), 1u);
  EXPECT_EQ(r.witnesses[0].location, "(•,•,β)");
  EXPECT_EQ(r.witnesses[0].reason, "link category empty");
  EXPECT_FALSE(is_exact_via_coaspherique(d, Localizer::Wgr).verdict);
  EXPECT_TRUE(is_weak_exact(d, Localizer::Wgr).verdict);
  EXPECT_TRUE(is_weak_exact_dual(d, Localizer::Wgr).verdict);
  EXPECT_FALSE(is_weak_exact(d, Localizer::W0).verdict);
}

TEST(Exact, AllWitnessesListsEveryTriple) {
  TwoSquare d = named("wgr.catsq", "Swgr");
  CheckOptions opt;
  opt.all_witnesses = true;
  EXPECT_EQ(is_exact(d, Localizer::W0, opt).witnesses.size(), 1u);
  TwoSquare pq = named("cocomma.catsq", "CocommaPQ");
  EXPECT_EQ(is_exact(pq, Localizer::W0, opt).witnesses.size(), 1u);
}

TEST(Exact, WitnessesRecheckFalse) {
  Rng rng(12);
  CheckOptions opt;
  opt.all_witnesses = true;
  int failures = 0;
  for (int i = 0; i < 80; ++i) {
    TwoSquare d = random_mixed_square(rng, {});
    for (Localizer l : kBoth) {
      CheckReport r = is_exact(d, l, opt);
      EXPECT_EQ(r.verdict, r.witnesses.empty());
      for (const auto& w : r.witnesses) {
        ++failures;
        ASSERT_EQ(w.ids.size(), 3u);
        EXPECT_FALSE(is_aspherical_cat(*link_category(d, w.ids[0], w.ids[1], w.ids[2]).cat, l));
      }
    }
  }
  EXPECT_GT(failures, 0);
}

TEST(Exact, ThreadsDoNotChangeReports) {
  Rng rng(13);
  for (int i = 0; i < 40; ++i) {
    TwoSquare d = random_mixed_square(rng, {});
    for (bool all : {false, true}) {
      CheckOptions seq, par;
      seq.all_witnesses = par.all_witnesses = all;
      par.threads = 4;
      CheckReport x = is_exact(d, Localizer::W0, seq), y = is_exact(d, Localizer::W0, par);
      EXPECT_EQ(x.verdict, y.verdict);
      EXPECT_EQ(x.witnesses, y.witnesses);
    }
  }
}

TEST(Exact, AgreesWithDefinitionOracle) {
  Rng rng(14);
  for (int i = 0; i < 150; ++i) {
    TwoSquare d = random_mixed_square(rng, {});
    for (Localizer l : kBoth) {
      bool want = exact_by_definition(d, l);
      EXPECT_EQ(is_exact(d, l).verdict, want);
      EXPECT_EQ(is_exact_via_coaspherique(d, l).verdict, want);
    }
  }
}

// ---------------------------------------------------------------------------
// Aspheric and coaspheric functors

TEST(Aspheric, ZeroIntoIntervalIsAspheric) {
  CatRef i = two();
  Functor zero = pick(i, "0");
  for (Localizer l : kBoth) EXPECT_TRUE(is_aspheric_functor(zero, l).verdict);
  CheckReport r = is_coaspheric_functor(zero, Localizer::W0);
  EXPECT_FALSE(r.verdict);
  ASSERT_FALSE(r.witnesses.empty());
  EXPECT_EQ(r.witnesses[0].location, "1");
  EXPECT_EQ(r.witnesses[0].reason.rfind("coslice", 0), 0u);
}

TEST(Aspheric, OneIntoIntervalIsNot) {
  CatRef i = two();
  CheckReport r = is_aspheric_functor(pick(i, "1"), Localizer::W0);
  ASSERT_FALSE(r.verdict);
  EXPECT_EQ(r.witnesses[0].location, "0");
  EXPECT_EQ(r.witnesses[0].reason, "slice empty");
  EXPECT_TRUE(is_coaspheric_functor(pick(i, "1"), Localizer::W0).verdict);
}

TEST(Aspheric, DiscretePairToPoint) {
  Functor u = to_point(pq());
  EXPECT_FALSE(is_aspheric_functor(u, Localizer::W0).verdict);
  EXPECT_TRUE(is_aspheric_functor(u, Localizer::Wgr).verdict);
}

TEST(Aspheric, RightAdjointsMakeAspheric) {
  Rng rng(15);
  for (int i = 0; i < 40; ++i) {
    Functor u = random_left_adjoint(rng, {});
    for (Localizer l : kBoth) EXPECT_TRUE(is_aspheric_functor(u, l).verdict);
  }
}

TEST(Aspheric, CoasphericIsAsphericOfOpposite) {
  Rng rng(16);
  for (int i = 0; i < 60; ++i) {
    Functor u = random_functor_between(rng, {});
    for (Localizer l : kBoth) EXPECT_EQ(is_coaspheric_functor(u, l).verdict, is_aspheric_functor(opposite(u), l).verdict);
  }
}

// ---------------------------------------------------------------------------
// Local equivalences

TEST(LocalEquiv, IdentityIsLocal) {
  Rng rng(17);
  for (int i = 0; i < 20; ++i) {
    Functor w = random_functor_between(rng, {});
    Functor id = identity_functor(w.src_ref());
    for (Localizer l : kBoth) {
      EXPECT_TRUE(is_local_equivalence(id, w, w, l).verdict);
      EXPECT_TRUE(is_colocal_equivalence(id, w, w, l).verdict);
    }
  }
}

TEST(LocalEquiv, AsphericOverItsTarget) {
  Rng rng(18);
  int seen = 0;
  for (int i = 0; i < 200 && seen < 30; ++i) {
    Functor u = random_functor_between(rng, {});
    if (!is_aspheric_functor(u, Localizer::W0).verdict) continue;
    ++seen;
    EXPECT_TRUE(is_local_equivalence(u, u, identity_functor(u.dst_ref()), Localizer::W0).verdict);
  }
  EXPECT_GE(seen, 10);
}

TEST(LocalEquiv, DiscretePairOverPoint) {
  Functor u = to_point(pq());
  Functor id = identity_functor(u.dst_ref());
  CheckReport r = is_local_equivalence(u, u, id, Localizer::W0);
  ASSERT_FALSE(r.verdict);
  EXPECT_EQ(r.witnesses[0].location, "•");
  EXPECT_TRUE(is_local_equivalence(u, u, id, Localizer::Wgr).verdict);
}

TEST(LocalEquiv, WgrSquareIsColocalOverPoint) {
  TwoSquare d = named("wgr.catsq", "Swgr");
  InducedFunctor phi = induced_slice_functor(d, 0);
  Functor over = compose(d.v, phi.source.proj_left);
  EXPECT_TRUE(is_colocal_equivalence(phi.functor, over, phi.target.proj_left, Localizer::Wgr).verdict);
  EXPECT_FALSE(is_colocal_equivalence(phi.functor, over, phi.target.proj_left, Localizer::W0).verdict);
}

TEST(LocalEquiv, TriangleMustCommute) {
  CatRef i = two();
  Functor zero = pick(i, "0"), one = pick(i, "1");
  Functor id = identity_functor(i);
  try {
    is_local_equivalence(identity_functor(zero.src_ref()), one, zero, Localizer::W0);
    FAIL() << "expected TriangleMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TriangleMismatch);
  }
  (void)id;
}

// ---------------------------------------------------------------------------
// Proper and smooth functors

TEST(Proper, Identity) {
  Rng rng(19);
  for (int i = 0; i < 10; ++i) {
    Functor id = identity_functor(random_category(rng, {}));
    for (Localizer l : kBoth) {
      EXPECT_TRUE(is_proper(id, l).verdict);
      EXPECT_TRUE(is_smooth(id, l).verdict);
    }
    EXPECT_TRUE(is_precofibration(id));
    EXPECT_TRUE(is_prefibration(id));
  }
}

TEST(Proper, ProjectionsAreProperAndSmooth) {
  Rng rng(20);
  for (int i = 0; i < 15; ++i) {
    CatRef a = random_category(rng, {}), b = random_category(rng, {});
    Product p = product_cat(a, b);
    for (Localizer l : kBoth) {
      EXPECT_TRUE(is_proper(p.pr1, l).verdict);
      EXPECT_TRUE(is_smooth(p.pr1, l).verdict);
    }
    EXPECT_TRUE(is_precofibration(p.pr1));
    EXPECT_TRUE(is_prefibration(p.pr1));
  }
}

TEST(Proper, ZeroIntoIntervalIsNotProper) {
  Functor zero = pick(two(), "0");
  CheckReport r = is_proper(zero, Localizer::W0);
  ASSERT_FALSE(r.verdict);
  EXPECT_EQ(r.witnesses[0].location, "1");
  EXPECT_FALSE(is_precofibration(zero));
  EXPECT_FALSE(is_proper(zero, Localizer::Wgr).verdict);
}

TEST(Proper, PrecofibrationsAreProper) {
  Rng rng(21);
  int pre = 0, prefib = 0;
  for (int i = 0; i < 150; ++i) {
    Functor u = random_functor_between(rng, {});
    if (is_precofibration(u)) {
      ++pre;
      for (Localizer l : kBoth) EXPECT_TRUE(is_proper(u, l).verdict);
    }
    if (is_prefibration(u)) {
      ++prefib;
      for (Localizer l : kBoth) EXPECT_TRUE(is_smooth(u, l).verdict);
    }
  }
  EXPECT_GT(pre, 10);
  EXPECT_GT(prefib, 10);
}

TEST(Proper, SmoothIsProperOfOpposite) {
  Rng rng(22);
  for (int i = 0; i < 80; ++i) {
    Functor u = random_functor_between(rng, {});
    for (Localizer l : kBoth) EXPECT_EQ(is_smooth(u, l).verdict, is_proper(opposite(u), l).verdict);
  }
}

TEST(Proper, CartesianSquaresOverProperAreExact) {
  Rng rng(23);
  int proper = 0, smooth = 0;
  for (int i = 0; i < 200; ++i) {
    Functor u = random_functor_between(rng, {});
    CatRef bp = random_category(rng, {});
    auto w = random_functor(rng, bp, u.dst_ref());
    if (!w) continue;
    TwoSquare d = pullback_cat(u, *w);
    for (Localizer l : kBoth) {
      bool p = is_proper(u, l).verdict, s = is_smooth(*w, l).verdict;
      if (p) ++proper;
      if (s) ++smooth;
      if (p || s) EXPECT_TRUE(is_exact(d, l).verdict);
    }
  }
  EXPECT_GT(proper, 20);
  EXPECT_GT(smooth, 20);
}

TEST(Proper, ProperIffCartesianSquaresOverSlicesExact) {
  Rng rng(24);
  int improper = 0;
  for (int i = 0; i < 80; ++i) {
    Functor u = random_functor_between(rng, {});
    for (Localizer l : kBoth) {
      bool all = true;
      for (ObId b = 0; b < u.dst().object_count(); ++b) {
        all = all && is_exact(pullback_cat(u, object_functor(u.dst_ref(), b)), l).verdict;
        all = all && is_exact(pullback_cat(u, slice(identity_functor(u.dst_ref()), b).proj_left), l).verdict;
      }
      bool proper = is_proper(u, l).verdict;
      improper += !proper;
      EXPECT_EQ(proper, all);
    }
  }
  EXPECT_GT(improper, 5);
}

// ---------------------------------------------------------------------------
// Weak exactness

TEST(WeakExact, IdentitySquare) {
  Rng rng(25);
  for (int i = 0; i < 10; ++i) {
    TwoSquare d = identity_square(random_category(rng, {}));
    for (Localizer l : kBoth) EXPECT_TRUE(is_weak_exact(d, l).verdict);
  }
}

TEST(WeakExact, CoincidesWithExactAtW0) {
  Rng rng(26);
  for (int i = 0; i < 120; ++i) {
    TwoSquare d = random_mixed_square(rng, {});
    bool exact = is_exact(d, Localizer::W0).verdict;
    EXPECT_EQ(is_weak_exact(d, Localizer::W0).verdict, exact);
    EXPECT_EQ(is_weak_exact_dual(d, Localizer::W0).verdict, exact);
    if (is_exact(d, Localizer::Wgr).verdict) EXPECT_TRUE(is_weak_exact(d, Localizer::Wgr).verdict);
    EXPECT_EQ(is_weak_exact(d, Localizer::Wgr).verdict, is_weak_exact_dual(d, Localizer::Wgr).verdict);
  }
}

// ---------------------------------------------------------------------------
// Stability laws

TEST(Stability, OppositeInvariance) {
  Rng rng(27);
  for (int i = 0; i < 120; ++i) {
    TwoSquare d = random_mixed_square(rng, {});
    for (Localizer l : kBoth) EXPECT_EQ(is_exact(d, l).verdict, is_exact(opposite_square(d), l).verdict);
  }
}

TEST(Stability, HorizontalComposition) {
  Rng rng(28);
  int both = 0;
  for (int i = 0; i < 150; ++i) {
    TwoSquare d = random_mixed_square(rng, {});
    auto left = square_with_u(rng, d.u_prime, {});
    if (!left) continue;
    TwoSquare c = compose_h(d, *left);
    for (Localizer l : kBoth)
      if (is_exact(d, l).verdict && is_exact(*left, l).verdict) {
        ++both;
        EXPECT_TRUE(is_exact(c, l).verdict);
      }
  }
  EXPECT_GT(both, 20);
}

TEST(Stability, VerticalComposition) {
  Rng rng(29);
  int both = 0;
  for (int i = 0; i < 150; ++i) {
    TwoSquare top = random_mixed_square(rng, {});
    auto bottom = square_with_v(rng, top.w, {});
    if (!bottom) continue;
    TwoSquare c = compose_v(top, *bottom);
    for (Localizer l : kBoth)
      if (is_exact(top, l).verdict && is_exact(*bottom, l).verdict) {
        ++both;
        EXPECT_TRUE(is_exact(c, l).verdict);
      }
  }
  EXPECT_GT(both, 20);
}

TEST(Stability, W0ImpliesWgr) {
  Rng rng(30);
  for (int i = 0; i < 150; ++i) {
    TwoSquare d = random_mixed_square(rng, {});
    if (is_exact(d, Localizer::W0).verdict) EXPECT_TRUE(is_exact(d, Localizer::Wgr).verdict);
  }
}

TEST(Stability, SliceDescent) {
  Rng rng(31);
  int non_exact = 0;
  for (int i = 0; i < 100; ++i) {
    TwoSquare d = random_mixed_square(rng, {});
    for (Localizer l : kBoth) {
      bool all = true;
      for (ObId bp = 0; bp < d.b_prime().object_count(); ++bp) {
        CommaData over = slice(identity_functor(d.b_prime_ref()), bp);
        TwoSquare dj = comma_category(d.u_prime, over.proj_left).square();
        all = all && is_exact(dj, l).verdict && is_exact(compose_h(d, dj), l).verdict;
      }
      bool exact = is_exact(d, l).verdict;
      non_exact += !exact;
      EXPECT_EQ(exact, all);
    }
  }
  EXPECT_GT(non_exact, 10);
}

// ---------------------------------------------------------------------------
// Beck-Chevalley

TEST(BeckChevalley, IdentitySquare) {
  Rng rng(32);
  for (int i = 0; i < 10; ++i) {
    TwoSquare d = identity_square(random_category(rng, {}));
    EXPECT_TRUE(is_bc_left(d).holds());
    EXPECT_TRUE(is_bc_right(d).holds());
    EXPECT_TRUE(has_final_object_criterion(d).verdict);
  }
}

TEST(BeckChevalley, SliceCommaOfLeftAdjoint) {
  Rng rng(33);
  for (int i = 0; i < 20; ++i) {
    Functor u = random_left_adjoint(rng, {});
    for (ObId b = 0; b < u.dst().object_count(); ++b) {
      TwoSquare d = comma_category(u, object_functor(u.dst_ref(), b)).square();
      CheckReport r = is_bc_left(d);
      EXPECT_TRUE(r.applicable);
      EXPECT_TRUE(r.verdict);
      EXPECT_TRUE(has_final_object_criterion(d).verdict);
    }
  }
}

TEST(BeckChevalley, NotApplicableWithoutAdjoints) {
  TwoSquare d = named("wgr.catsq", "Swgr");
  CheckReport r = is_bc_left(d);
  EXPECT_FALSE(r.applicable);
  EXPECT_FALSE(r.holds());
  ASSERT_EQ(r.witnesses.size(), 1u);
  EXPECT_EQ(r.witnesses[0].location, "u");
  EXPECT_EQ(r.witnesses[0].reason, "no right adjoint");
}

TEST(BeckChevalley, FindsNonExactSquareWithAdjoints) {
  Rng rng(34);
  bool found = false;
  for (int i = 0; i < 400 && !found; ++i) {
    TwoSquare d = random_bc_square(rng, {});
    if (is_exact(d, Localizer::W0).verdict) continue;
    found = true;
    CheckReport r = is_bc_left(d);
    EXPECT_TRUE(r.applicable);
    EXPECT_FALSE(r.verdict);
    EXPECT_FALSE(r.witnesses.empty());
  }
  EXPECT_TRUE(found);
}

TEST(BeckChevalley, EquivalentCriteria) {
  Rng rng(35);
  int exact = 0, non_exact = 0;
  for (int i = 0; i < 400; ++i) {
    TwoSquare d = random_bc_square(rng, {});
    CheckReport bc = is_bc_left(d);
    ASSERT_TRUE(bc.applicable);
    bool e = is_exact(d, Localizer::W0).verdict;
    (e ? exact : non_exact)++;
    EXPECT_EQ(bc.verdict, e);
    EXPECT_EQ(has_final_object_criterion(d).verdict, e);
    CheckOptions rev;
    rev.tie_break = TieBreak::Greatest;
    EXPECT_EQ(is_bc_left(d, rev).verdict, bc.verdict);
  }
  EXPECT_GT(exact, 5);
  EXPECT_GT(non_exact, 5);
}

TEST(BeckChevalley, RightIsLeftOfOpposite) {
  Rng rng(36);
  for (int i = 0; i < 40; ++i) {
    TwoSquare d = random_mixed_square(rng, {});
    CheckReport r = is_bc_right(d);
    EXPECT_EQ(r.applicable, find_left_adjoint(d.w).has_value() && find_left_adjoint(d.v).has_value());
    if (r.applicable) EXPECT_EQ(r.verdict, is_exact(d, Localizer::W0).verdict);
  }
}

TEST(BeckChevalley, FinalObjectFailsOnCocommaPair) {
  TwoSquare d = named("cocomma.catsq", "CocommaPQ");
  CheckReport r = has_final_object_criterion(d);
  ASSERT_FALSE(r.verdict);
  EXPECT_EQ(r.witnesses[0].location, "(•,•,t)");
}
