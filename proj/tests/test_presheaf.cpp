#include <gtest/gtest.h>

#include <cmath>

#include "catsq/presheaf.hpp"
#include "support.hpp"

using namespace catsq;
using namespace catsq::testing;

namespace {

Presheaf on_pq(std::size_t np, std::size_t nq) {
  std::vector<std::vector<std::string>> els(2);
  for (std::size_t i = 0; i < np; ++i) els[0].push_back("x" + std::to_string(i));
  for (std::size_t i = 0; i < nq; ++i) els[1].push_back("y" + std::to_string(i));
  CatRef c = pq();
  std::vector<FinMap> act(c->arrow_count());
  for (ArId f = 0; f < c->arrow_count(); ++f) {
    act[f].resize(els[c->dom(f)].size());
    std::iota(act[f].begin(), act[f].end(), 0);
  }
  return Presheaf(c, els, act);
}

std::vector<std::size_t> sizes(const Presheaf& p) {
  std::vector<std::size_t> out;
  for (ObId x = 0; x < p.base().object_count(); ++x) out.push_back(p.size(x));
  return out;
}

/// Total size of the product enumerated by the cone oracle at b.
double cone_space(const Functor& u, const Presheaf& f, ObId b) {
  double total = 1;
  for (ObId x = 0; x < u.src().object_count(); ++x)
    total *= std::pow(static_cast<double>(f.size(x)), static_cast<double>(u.dst().hom(u.ob(x), b).size()));
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// Restriction and finite limits

TEST(Restrict, AlongIdentity) {
  Rng rng(40);
  for (int i = 0; i < 20; ++i) {
    CatRef a = random_category(rng, {});
    Presheaf g = random_presheaf(rng, a, 3, true);
    EXPECT_EQ(restrict(identity_functor(a), g), g);
  }
}

TEST(Restrict, AlongPoint) {
  CatRef i = two();
  Presheaf g = representable(i, i->object("1"));
  Presheaf r = restrict(pick(i, "0"), g);
  EXPECT_EQ(r.base().object_count(), 1u);
  EXPECT_EQ(r.at(0), g.at(i->object("0")));
}

TEST(Restrict, AlongProjectionIsConstantInSecondFactor) {
  Rng rng(41);
  for (int i = 0; i < 10; ++i) {
    CatRef a = random_category(rng, {}), b = random_category(rng, {});
    Product p = product_cat(a, b);
    Presheaf f = random_presheaf(rng, a, 2);
    Presheaf r = restrict(p.pr1, f);
    for (ArId k = 0; k < p.cat->arrow_count(); ++k)
      if (a->is_identity(p.pr1.ar(k))) {
        FinMap id(r.size(p.cat->cod(k)));
        std::iota(id.begin(), id.end(), 0);
        EXPECT_EQ(r.act(k), id);
      }
  }
}

TEST(FinLimits, DiscretePair) {
  Presheaf f = on_pq(2, 3);
  EXPECT_EQ(finset_limit(f).size(), 6u);
  EXPECT_EQ(finset_colimit(f).size(), 5u);
}

TEST(FinLimits, EmptyIndex) {
  Presheaf f = constant_presheaf(make_cat(empty_category()), 2);
  EXPECT_EQ(finset_limit(f).size(), 1u);
  EXPECT_EQ(finset_colimit(f).size(), 0u);
}

TEST(FinLimits, SizeGuard) {
  Limits tight;
  tight.max_elements = 5;
  try {
    finset_limit(on_pq(2, 3), tight);
    FAIL() << "expected SizeGuardExceeded";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SizeGuardExceeded);
  }
}

// ---------------------------------------------------------------------------
// Kan extensions

TEST(Kan, FixtureCollapsingTwoPoints) {
  Workspace ws = fixture("kan.catsq");
  const Functor& u = ws.functor("u");
  const Presheaf& f = ws.presheaf("F");
  EXPECT_EQ(ran(u, f).result.size(0), 6u);
  EXPECT_EQ(lan(u, f).result.size(0), 5u);
  EXPECT_EQ(*cone_count(u, f, 0), 6u);
  EXPECT_EQ(cocone_count(u, f, 0), 5u);
}

TEST(Kan, OneIntoInterval) {
  CatRef i = two();
  Functor one = pick(i, "1");
  Presheaf f = constant_presheaf(one.src_ref(), 2);
  EXPECT_EQ(sizes(ran(one, f).result), (std::vector<std::size_t>{1, 2}));
  // 0\A contains (•, t), so the left extension is nonempty at 0
  EXPECT_EQ(sizes(lan(one, f).result), (std::vector<std::size_t>{2, 2}));
  EXPECT_EQ(cocone_count(one, f, 0), 2u);
  EXPECT_EQ(*cone_count(one, f, 0), 1u);
}

TEST(Kan, AlongIdentityIsIdentity) {
  Rng rng(42);
  for (int i = 0; i < 20; ++i) {
    CatRef a = random_category(rng, {});
    Presheaf f = random_presheaf(rng, a, 3, true);
    Functor id = identity_functor(a);
    EXPECT_EQ(sizes(ran(id, f).result), sizes(f));
    EXPECT_EQ(sizes(lan(id, f).result), sizes(f));
    EXPECT_TRUE(ran_unit(id, f).is_iso());
    EXPECT_TRUE(lan_unit(id, f).is_iso());
  }
}

TEST(Kan, SizesMatchConeAndCoconeOracles) {
  Rng rng(43);
  int checked = 0;
  for (int i = 0; i < 120; ++i) {
    Functor u = random_functor_between(rng, {});
    Presheaf f = random_presheaf(rng, u.src_ref(), 3, true);
    Presheaf r = ran(u, f).result, l = lan(u, f).result;
    for (ObId b = 0; b < u.dst().object_count(); ++b) {
      EXPECT_EQ(l.size(b), cocone_count(u, f, b));
      if (cone_space(u, f, b) > 1e6) continue;
      ++checked;
      EXPECT_EQ(r.size(b), *cone_count(u, f, b));
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(Kan, AdjunctionRoundTrips) {
  Rng rng(44);
  for (int i = 0; i < 60; ++i) {
    Functor u = random_functor_between(rng, {});
    Presheaf f = random_presheaf(rng, u.src_ref(), 2, true);
    Presheaf g = random_presheaf(rng, u.dst_ref(), 2, true);
    RightKan rk = ran(u, f);
    auto left = all_morphisms(restrict(u, g), f);
    auto right = all_morphisms(g, rk.result);
    EXPECT_EQ(left.size(), right.size());
    for (const auto& phi : left) EXPECT_EQ(ran_untranspose(u, rk, f, ran_transpose(u, rk, g, phi)), phi);
    for (const auto& psi : right) EXPECT_EQ(ran_transpose(u, rk, g, ran_untranspose(u, rk, f, psi)), psi);

    LeftKan lk = lan(u, f);
    auto lleft = all_morphisms(lk.result, g);
    auto lright = all_morphisms(f, restrict(u, g));
    EXPECT_EQ(lleft.size(), lright.size());
    for (const auto& chi : lleft) EXPECT_EQ(lan_untranspose(u, lk, g, lan_transpose(u, lk, f, chi)), chi);
    for (const auto& theta : lright) EXPECT_EQ(lan_transpose(u, lk, f, lan_untranspose(u, lk, g, theta)), theta);
  }
}

TEST(Kan, UnitsAndCountitsSatisfyTriangles) {
  Rng rng(45);
  for (int i = 0; i < 30; ++i) {
    Functor u = random_functor_between(rng, {});
    Presheaf g = random_presheaf(rng, u.dst_ref(), 2, true);
    // u^*G → u^*u_*u^*G → u^*G
    PresheafMorphism eta = restrict(u, ran_unit(u, g));
    PresheafMorphism eps = ran_counit(u, restrict(u, g));
    EXPECT_EQ(compose(eps, eta), identity_morphism(restrict(u, g)));
    // u^*G → u^*u_!u^*G → u^*G
    PresheafMorphism leta = lan_unit(u, restrict(u, g));
    PresheafMorphism leps = restrict(u, lan_counit(u, g));
    EXPECT_EQ(compose(leps, leta), identity_morphism(restrict(u, g)));
  }
}

// ---------------------------------------------------------------------------
// Representables

TEST(Representable, Sizes) {
  CatRef e = point_category();
  EXPECT_EQ(sizes(representable(e, 0)), (std::vector<std::size_t>{1}));
  CatRef i = two();
  EXPECT_EQ(sizes(representable(i, i->object("1"))), (std::vector<std::size_t>{1, 1}));
  CatRef p = par();
  EXPECT_EQ(sizes(representable(p, p->object("1"))), (std::vector<std::size_t>{2, 1}));
}

// ---------------------------------------------------------------------------
// Base change

TEST(BaseChange, IdentitySquareGivesIdentity) {
  Rng rng(46);
  for (int i = 0; i < 10; ++i) {
    CatRef a = random_category(rng, {});
    TwoSquare d = identity_square(a);
    Presheaf f = random_presheaf(rng, a, 2, true);
    BaseChange c = base_change_coh(d, f);
    EXPECT_TRUE(c.is_iso);
    BaseChange h = base_change_hom(d, f);
    EXPECT_TRUE(h.is_iso);
  }
}

TEST(BaseChange, CommaSquaresAreIso) {
  Rng rng(47);
  for (int i = 0; i < 40; ++i) {
    TwoSquare d = random_comma_square(rng, {});
    EXPECT_TRUE(base_change_coh(d, random_presheaf(rng, d.a_ref(), 2, true)).is_iso);
    EXPECT_TRUE(base_change_hom(d, random_presheaf(rng, d.b_prime_ref(), 2, true)).is_iso);
  }
}

TEST(BaseChange, CocommaOverDiscretePair) {
  Workspace ws = fixture("cocomma.catsq");
  const TwoSquare& d = ws.square("CocommaPQ");
  BaseChange bc = base_change_hom(d, ws.presheaf("G"));
  EXPECT_FALSE(bc.is_iso);
  EXPECT_EQ(bc.morphism.src().size(0), 2u);
  EXPECT_EQ(bc.morphism.dst().size(0), 1u);
  EXPECT_TRUE(base_change_hom(ws.square("CocommaI"), representable(d.b_prime_ref(), 0)).is_iso);
}

TEST(BaseChange, ExactSquaresGiveIsos) {
  Rng rng(48);
  int exact = 0;
  for (int i = 0; i < 150; ++i) {
    TwoSquare d = random_mixed_square(rng, {});
    bool ex = is_exact(d, Localizer::W0).verdict;
    bool all_coh = true, all_hom = true;
    for (int s = 0; s < 3; ++s) {
      all_coh = all_coh && base_change_coh(d, random_presheaf(rng, d.a_ref(), 3, true)).is_iso;
      all_hom = all_hom && base_change_hom(d, random_presheaf(rng, d.b_prime_ref(), 3, true)).is_iso;
    }
    for (ObId bp = 0; bp < d.b_prime().object_count(); ++bp)
      all_hom = all_hom && base_change_hom(d, representable(d.b_prime_ref(), bp)).is_iso;
    if (ex) {
      ++exact;
      EXPECT_TRUE(all_coh);
      EXPECT_TRUE(all_hom);
    } else {
      EXPECT_FALSE(all_hom);
    }
    EXPECT_EQ(all_hom, is_weak_exact(d, Localizer::W0).verdict);
  }
  EXPECT_GT(exact, 20);
}

TEST(Guitart, AgreesWithLinkEngine) {
  Rng rng(49);
  for (int i = 0; i < 200; ++i) {
    TwoSquare d = random_mixed_square(rng, {});
    EXPECT_EQ(guitart_oracle(d).verdict, is_exact(d, Localizer::W0).verdict);
  }
}

TEST(Guitart, Fixtures) {
  EXPECT_TRUE(guitart_oracle(fixture("comma.catsq").square("S")).verdict);
  EXPECT_FALSE(guitart_oracle(fixture("wgr.catsq").square("Swgr")).verdict);
  Workspace co = fixture("cocomma.catsq");
  EXPECT_TRUE(guitart_oracle(co.square("CocommaI")).verdict);
  CheckReport r = guitart_oracle(co.square("CocommaPQ"));
  ASSERT_FALSE(r.verdict);
  EXPECT_EQ(r.witnesses[0].location, "(•,•)");
}

// ---------------------------------------------------------------------------
// Presheaf localizer classification

TEST(Classify, Fixtures) {
  Workspace ws = fixture("classify.catsq");
  EXPECT_EQ(classify_presheaf_localizer(ws.category("Par")), PresheafLocalizer::W0);
  EXPECT_EQ(classify_presheaf_localizer(ws.category("I")), PresheafLocalizer::Wgr);
  EXPECT_EQ(classify_presheaf_localizer(ws.category("e")), PresheafLocalizer::Wtr);
  EXPECT_EQ(classify_presheaf_localizer(ws.category("Empty")), PresheafLocalizer::Wtr);
}

TEST(Classify, ChaoticCategoryIsTrivial) {
  // two isomorphic objects: equivalent to the point
  RawCategory raw;
  raw.objects = {"x", "y"};
  raw.arrows = {{"f", "x", "y"}, {"g", "y", "x"}};
  raw.composites = {{"g", "f", "id_x"}, {"f", "g", "id_y"}};
  EXPECT_EQ(classify_presheaf_localizer(make_category(raw)), PresheafLocalizer::Wtr);
  EXPECT_EQ(classify_presheaf_localizer(discrete_category({"p", "q"})), PresheafLocalizer::Wgr);
}

// ---------------------------------------------------------------------------
// Presheaf-level criteria

TEST(ViaPresheaves, AsphericExamples) {
  EXPECT_TRUE(check_aspheric_via_presheaves(identity_functor(two())));
  Functor u = to_point(pq());
  EXPECT_FALSE(check_aspheric_via_presheaves(u));
  Presheaf two_pts = constant_presheaf(u.dst_ref(), 2);
  PresheafMorphism unit = ran_unit(u, two_pts);
  EXPECT_EQ(unit.src().size(0), 2u);
  EXPECT_EQ(unit.dst().size(0), 4u);
}

TEST(ViaPresheaves, AgreesWithAspheric) {
  Rng rng(50);
  for (int i = 0; i < 100; ++i) {
    Functor u = random_functor_between(rng, {});
    EXPECT_EQ(check_aspheric_via_presheaves(u), is_aspheric_functor(u, Localizer::W0).verdict);
  }
}

TEST(ViaPresheaves, LocalEquivalenceExamples) {
  Functor u = to_point(pq());
  Functor id = identity_functor(u.dst_ref());
  EXPECT_FALSE(check_local_equiv_via_presheaves(u, u, id));
  Functor zero = pick(two(), "0");
  EXPECT_TRUE(check_local_equiv_via_presheaves(zero, zero, identity_functor(zero.dst_ref())));
  Functor idA = identity_functor(u.src_ref());
  EXPECT_TRUE(check_local_equiv_via_presheaves(idA, u, u));
}

TEST(ViaPresheaves, AgreesWithLocalEquivalence) {
  Rng rng(51);
  int fails = 0;
  for (int i = 0; i < 100; ++i) {
    Functor w = random_functor_between(rng, {});
    CatRef a = random_category(rng, {});
    auto u = random_functor(rng, a, w.src_ref());
    if (!u) continue;
    Functor v = compose(w, *u);
    bool want = is_local_equivalence(*u, v, w, Localizer::W0).verdict;
    fails += !want;
    EXPECT_EQ(check_local_equiv_via_presheaves(*u, v, w), want);
  }
  EXPECT_GT(fails, 5);
}

// ---------------------------------------------------------------------------
// Der axioms on the presheaf instance

TEST(Der, KanFixture) {
  Workspace ws = fixture("kan.catsq");
  const Functor& u = ws.functor("u");
  DerReport r = der_axiom_suite(u, {ws.presheaf("F")}, {constant_presheaf(u.dst_ref(), 2)});
  EXPECT_TRUE(r.ok());
  for (const auto& f : r.failures) ADD_FAILURE() << f;
  // Der 4g at • computed directly: |F(p)|·|F(q)|
  TwoSquare d = comma_category(u, object_functor(u.dst_ref(), 0)).square();
  EXPECT_EQ(base_change_coh(d, ws.presheaf("F")).morphism.src().size(0), 6u);
}

TEST(Der, PointPlusPoint) {
  CatRef e = point_category();
  Coproduct s = coproduct_cat(e, e);
  Presheaf x = constant_presheaf(e, 2), y = constant_presheaf(e, 3);
  Presheaf glued = glue(s, x, y);
  EXPECT_EQ(sizes(glued), (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(restrict(s.in1, glued), x);
  EXPECT_EQ(restrict(s.in2, glued), y);
}

TEST(Der, Generated) {
  Rng rng(52);
  for (int i = 0; i < 25; ++i) {
    Functor u = random_functor_between(rng, {});
    std::vector<Presheaf> fa{random_presheaf(rng, u.src_ref(), 2, true), random_presheaf(rng, u.src_ref(), 2)};
    std::vector<Presheaf> gb{random_presheaf(rng, u.dst_ref(), 2, true)};
    DerReport r = der_axiom_suite(u, fa, gb);
    EXPECT_TRUE(r.ok());
    for (const auto& f : r.failures) ADD_FAILURE() << f;
  }
}

TEST(Der, ComponentwiseBijectionIsIso) {
  Presheaf f = on_pq(2, 2);
  int isos = 0;
  for (const auto& phi : all_morphisms(f, f)) {
    auto inv = inverse_of(phi);
    EXPECT_EQ(inv.has_value(), phi.is_iso());
    isos += phi.is_iso();
  }
  EXPECT_EQ(isos, 4);
}

// ---------------------------------------------------------------------------
// Squares of presheaf categories with values in a finite category

TEST(ValuedSquares, FixturesAgreeWithParallelPairValues) {
  CatRef c = par();
  Workspace co = fixture("cocomma.catsq");
  std::vector<TwoSquare> ds{fixture("comma.catsq").square("S"), fixture("wgr.catsq").square("Swgr"),
                            co.square("CocommaI"), co.square("CocommaPQ")};
  for (const auto& d : ds) {
    PresheafSquare h = presheaf_square(d, c);
    EXPECT_EQ(is_exact(h.square, Localizer::W0).verdict, is_exact(d, Localizer::W0).verdict);
  }
}

TEST(ValuedSquares, ExactSquaresStayExactForCompleteValues) {
  Rng rng(53);
  int exact = 0;
  for (CatRef c : {point_category(), two()}) {
    for (int i = 0; i < 80; ++i) {
      TwoSquare d = random_mixed_square(rng, {3, 5});
      if (!is_exact(d, Localizer::W0).verdict) continue;
      ++exact;
      EXPECT_TRUE(is_exact(presheaf_square(d, c).square, Localizer::W0).verdict);
    }
  }
  EXPECT_GT(exact, 20);
}

// With values in the parallel pair, which has neither all finite limits nor
// all finite colimits, exactness of D and of its presheaf square can differ.
TEST(ValuedSquares, ParallelPairValuesCanDisagree) {
  Rng rng(54);
  CatRef c = par();
  bool found = false;
  for (int i = 0; i < 300 && !found; ++i) {
    TwoSquare d = random_mixed_square(rng, {3, 5});
    found = is_exact(presheaf_square(d, c).square, Localizer::W0).verdict != is_exact(d, Localizer::W0).verdict;
  }
  EXPECT_TRUE(found);
}

TEST(ValuedSquares, FourObjectCounterexample) {
  Workspace ws = fixture("counterexample.catsq");
  const TwoSquare& d = ws.square("D");
  EXPECT_TRUE(is_exact(d, Localizer::W0).verdict);
  PresheafSquare h = presheaf_square(d, ws.category_ref("C"));
  CheckReport r = is_exact(h.square, Localizer::W0);
  ASSERT_FALSE(r.verdict);
  ASSERT_FALSE(r.witnesses.empty());
  EXPECT_EQ(r.witnesses[0].reason, "link category empty");
  const auto& ids = r.witnesses[0].ids;
  EXPECT_TRUE(link_category(h.square, ids[0], ids[1], ids[2]).cat->empty());
}
