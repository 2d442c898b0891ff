#include <gtest/gtest.h>

#include "tdual/cohomology.hpp"

using namespace tdual;
using namespace tdual::topology;
using algebra::IntMatrix;
using algebra::IntVector;

namespace {

ComplexPtr share(CellComplex c) { return std::make_shared<const CellComplex>(std::move(c)); }

AbelianGroup H(const std::string& space, int k) { return cohomology(builtin(space), k); }

long euler(const CellComplex& X) {
    long chi = 0;
    for (int k = 0; k <= X.dimension(); ++k) chi += (k % 2 ? -1 : 1) * static_cast<long>(X.count(k));
    return chi;
}

IntVector unit(std::size_t n, std::size_t i) {
    IntVector v(n);
    v[i] = 1;
    return v;
}

}  // namespace

TEST(Complexes, BoundarySquaresToZero) {
    for (const std::string name : {"point", "S0", "S1", "S2", "S3", "S4", "D3", "S2xS1", "S3xS1", "C0S2xS1", "CP2", "L1p:5",
                                   "wedge:3", "dS4"})
        EXPECT_NO_THROW(builtin(name).validate()) << name;
    CellComplex bad;
    bad.add_cell(0, "a");
    bad.add_cell(0, "b");
    bad.add_cell(1, "e", {{"a", 1}, {"b", -1}});
    bad.add_cell(2, "f", {{"e", 1}});
    EXPECT_THROW(bad.validate(), InvalidComplex);
    EXPECT_THROW(builtin("nowhere"), UnknownSpace);
    EXPECT_THROW(builtin("L1p:x"), UnknownSpace);
}

TEST(Complexes, LabelsMustFormSubcomplexes) {
    CellComplex X = builtin("D3");
    EXPECT_EQ(X.labeled("shell").size(), 2u);
    CellComplex Y = X;
    Y.add_label(Y.find("c(s)"), "bogus");
    EXPECT_THROW(Y.labeled("bogus"), NotASubcomplex);
}

TEST(Complexes, JsonRoundTrip) {
    CellComplex X = builtin("S3");
    EXPECT_EQ(complex_from_json(to_json(X)), X);
    nlohmann::json broken = {{"cells", {{{"name", "e"}, {"dim", 1}, {"boundary", {{"missing", 1}}}}}}};
    EXPECT_THROW(complex_from_json(broken), InvalidComplex);
}

TEST(Smith, CohomologyTable) {
    EXPECT_EQ(H("S2xS1", 3), AbelianGroup::Z());
    EXPECT_EQ(H("CP2", 2), AbelianGroup::Z());
    EXPECT_EQ(H("S3", 3), AbelianGroup::Z());
    for (long p : {2, 3, 7}) EXPECT_EQ(H("L1p:" + std::to_string(p), 2), AbelianGroup::Zn(p)) << p;
    EXPECT_EQ(H("L1p:1", 2), AbelianGroup::zero());
    EXPECT_EQ(H("L1p:0", 2), AbelianGroup::Z());
    for (std::size_t p : {1u, 2u, 5u}) EXPECT_EQ(homology(wedge_of_spheres(p - 1, 2), 2), AbelianGroup::Z(p - 1));
}

TEST(Smith, DegreeBeyondDimension) {
    EXPECT_EQ(H("S2", 7), AbelianGroup::zero());
    EXPECT_EQ(H("S2", 0), AbelianGroup::Z());
}

TEST(Smith, FullTables) {
    // sphere-by-sphere oracles
    EXPECT_EQ(H("S0", 0), AbelianGroup::Z(2));
    EXPECT_EQ(H("S1", 1), AbelianGroup::Z());
    EXPECT_EQ(H("S4", 4), AbelianGroup::Z());
    EXPECT_EQ(H("S4", 2), AbelianGroup::zero());
    EXPECT_EQ(H("D3", 3), AbelianGroup::zero());
    EXPECT_EQ(H("D3", 0), AbelianGroup::Z());
    EXPECT_EQ(H("dS4", 3), AbelianGroup::Z());
    EXPECT_EQ(H("dS4", 2), AbelianGroup::zero());
    EXPECT_EQ(H("S3xS1", 4), AbelianGroup::Z());
    EXPECT_EQ(H("S3xS1", 3), AbelianGroup::Z());
    EXPECT_EQ(H("S3xS1", 2), AbelianGroup::zero());
    EXPECT_EQ(H("CP2", 4), AbelianGroup::Z());
    EXPECT_EQ(H("CP2", 3), AbelianGroup::zero());
    EXPECT_EQ(homology(builtin("L1p:6"), 1), AbelianGroup::Zn(6));
    EXPECT_EQ(homology(builtin("L1p:6"), 3), AbelianGroup::Z());
}

TEST(Smith, MixedTorsionOrdered) {
    // two 1-cells with d e2 = 2 a, d e2' = 3 b: H_1 = Z_6 = Z_2 + Z_3 in invariant-factor form
    CellComplex X;
    X.add_cell(0, "v");
    X.add_cell(1, "a", {}, {}, {"v"});
    X.add_cell(1, "b", {}, {}, {"v"});
    X.add_cell(2, "f", {{"a", 2}});
    X.add_cell(2, "g", {{"b", 4}});
    EXPECT_EQ(homology(X, 1), (AbelianGroup{0, {2, 4}}));
    EXPECT_EQ(cohomology(X, 2), (AbelianGroup{0, {2, 4}}));
    EXPECT_EQ(AbelianGroup(AbelianGroup{2, {2, 4}}).to_string(), "Z^2 + Z_2 + Z_4");
}

TEST(Smith, UniversalCoefficients) {
    for (const std::string name : {"point", "S1", "S2", "S3", "D3", "S2xS1", "S3xS1", "C0S2xS1", "CP2", "L1p:2", "L1p:7", "wedge:4", "dS4"}) {
        CellComplex X = builtin(name);
        for (int k = 0; k <= X.dimension() + 1; ++k) {
            AbelianGroup Hk = cohomology(X, k), hk = homology(X, k), hk1 = homology(X, k - 1);
            EXPECT_EQ(Hk.free_rank, hk.free_rank) << name << " " << k;
            EXPECT_EQ(Hk.torsion, hk1.torsion) << name << " " << k;
        }
    }
}

TEST(Relative, Groups) {
    ComplexPtr D = share(builtin("D3"));
    EXPECT_EQ(relative_cohomology(D, D->labeled("shell"), 3), AbelianGroup::Z());
    for (int k = 0; k <= 3; ++k) EXPECT_EQ(relative_cohomology(D, D->all(), k), AbelianGroup::zero());
    ComplexPtr S3S1 = share(builtin("S3xS1"));
    EXPECT_EQ(relative_cohomology(S3S1, S3S1->labeled("S"), 4), AbelianGroup::Z());
    ComplexPtr C0 = share(builtin("C0S2xS1"));
    EXPECT_EQ(relative_cohomology(C0, C0->labeled("shell"), 4), AbelianGroup::Z());
}

TEST(Relative, EmptySubspaceIsAbsolute) {
    ComplexPtr X = share(builtin("L1p:3"));
    for (int k = 0; k <= 3; ++k) EXPECT_EQ(relative_cohomology(X, X->none(), k), cohomology(*X, k));
}

TEST(Relative, CP2RelativePoint) {
    CellComplex X = builtin("CP2");
    X.add_label(X.find("e0"), "pt");
    ComplexPtr P = share(X);
    EXPECT_EQ(relative_cohomology(P, P->labeled("pt"), 2), AbelianGroup::Z());
    EXPECT_EQ(relative_cohomology(P, P->labeled("pt"), 0), AbelianGroup::zero());
}

TEST(Relative, NotASubcomplex) {
    ComplexPtr D = share(builtin("D3"));
    CellSet bad = D->none();
    bad.insert(D->find("s"));
    EXPECT_THROW(Pair::of(D, D->all(), bad), NotASubcomplex);
}

TEST(Exactness, Basics) {
    // Z -2-> Z -> Z_2 -> 0
    IntMatrix two(1, 1, {2}), one(1, 1, {1});
    EXPECT_TRUE(exact_at(two, one, {0}, {2}));
    EXPECT_FALSE(exact_at(one, one, {0}, {2}));
    EXPECT_TRUE(is_isomorphism(IntMatrix(1, 1, {-1}), {0}, {0}));
    EXPECT_FALSE(is_isomorphism(two, {0}, {0}));
    EXPECT_TRUE(is_isomorphism(IntMatrix(1, 1, {5}), {3}, {3}));
}

class PairSequence : public ::testing::TestWithParam<std::tuple<std::string, std::string, std::string>> {};

TEST_P(PairSequence, ExactEverywhere) {
    auto [space, whole, sub] = GetParam();
    ComplexPtr X = share(builtin(space));
    auto seq = long_exact_sequence(Pair::labeled(X, whole, sub));
    for (const auto& n : seq.nodes) EXPECT_TRUE(n.exact) << space << " " << n.name;
}

INSTANTIATE_TEST_SUITE_P(
    Pairs, PairSequence,
    ::testing::Values(std::make_tuple("D3", "", "shell"), std::make_tuple("S3", "", "S"), std::make_tuple("S3", "N", "shell"),
                      std::make_tuple("C0S2xS1", "", "shell"), std::make_tuple("S3xS1", "", "S"), std::make_tuple("D3", "", "D3-none"),
                      std::make_tuple("S2xS1", "", "")));

TEST(Exactness, ConnectingMapIsIsomorphism) {
    ComplexPtr D = share(builtin("D3"));
    Pair XA = Pair::labeled(D, "", "shell");
    auto seq = long_exact_sequence(XA);
    // nodes: 3k + {0: H^k(X,A), 1: H^k(X), 2: H^k(A)}; delta: H^2(A) -> H^3(X,A)
    const std::size_t i = 3 * 2 + 2;
    EXPECT_EQ(seq.nodes[i].group, AbelianGroup::Z());
    EXPECT_EQ(seq.nodes[i + 1].group, AbelianGroup::Z());
    EXPECT_TRUE(is_isomorphism(seq.maps[i], seq.nodes[i].moduli, seq.nodes[i + 1].moduli));
}

TEST(Exactness, DetectsBrokenSequence) {
    LongExactSequence seq;
    IntMatrix zero(1, 1, {0});
    EXPECT_FALSE(exact_at(zero, IntMatrix(0, 1), {0}, {}));
}

TEST(Excision, DiscPairToSphere) {
    ComplexPtr S3 = share(builtin("S3"));
    CohomologyGroup rel_disc(Pair::labeled(S3, "N", "shell"), 3);
    CohomologyGroup rel_sphere(Pair::labeled(S3, "", "S"), 3);
    CohomologyGroup sphere(Pair::whole(S3), 3);
    IntMatrix excision = restriction_map(rel_sphere, rel_disc);
    IntMatrix j = restriction_map(rel_sphere, sphere);
    EXPECT_TRUE(is_isomorphism(excision, rel_sphere.moduli(), rel_disc.moduli()));
    EXPECT_TRUE(is_isomorphism(j, rel_sphere.moduli(), sphere.moduli()));
    EXPECT_EQ(map_rank(excision), 1u);
    EXPECT_EQ(map_rank(j), 1u);
}

TEST(Products, CircleProducts) {
    CellComplex S2S1 = builtin("S2xS1");
    for (int k = 0; k <= 3; ++k) EXPECT_EQ(homology(S2S1, k), AbelianGroup::Z()) << k;
    CellComplex pS1 = product_with_circle(share(point()));
    for (int k = 0; k <= 1; ++k) EXPECT_EQ(cohomology(pS1, k), cohomology(circle(), k));
    for (const std::string name : {"S2", "CP2", "L1p:3", "dS4"}) EXPECT_EQ(euler(product_with_circle(share(builtin(name)))), 0);
}

TEST(Products, GeneralProductKunneth) {
    CellComplex T = product(share(circle()), share(circle()));
    EXPECT_EQ(cohomology(T, 1), AbelianGroup::Z(2));
    EXPECT_EQ(cohomology(T, 2), AbelianGroup::Z());
    CellComplex RP = product(share(builtin("L1p:2")), share(builtin("L1p:3")));
    // H_1(L2 x L3) = Z_2 + Z_3 = Z_6
    EXPECT_EQ(homology(RP, 1), AbelianGroup::Zn(6));
}

TEST(Cross, GeneratorToGenerator) {
    ComplexPtr S2 = share(sphere(2));
    ComplexPtr P = share(product_with_circle(S2));
    CohomologyGroup H2(Pair::whole(S2), 2);
    CohClass gen = class_from_coordinates(H2, {1});
    CohClass x = cross_with_z(gen, P);
    CohomologyGroup H3(Pair::whole(P), 3);
    auto c = H3.coordinates(x.cochain);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(abs(c[0]), 1);
    EXPECT_TRUE(is_zero_class(cross_with_z(scale(gen, 0), P)));
}

TEST(Cross, Bilinear) {
    ComplexPtr X = share(builtin("S3xS1"));
    ComplexPtr P = share(product_with_circle(X));
    CohomologyGroup H3(Pair::whole(X), 3);
    CohClass a = class_from_coordinates(H3, {2});
    CohClass b = class_from_coordinates(H3, {-5});
    EXPECT_TRUE(same_class(cross_with_z(add(a, b), P), add(cross_with_z(a, P), cross_with_z(b, P))));
}

TEST(Cross, Errors) {
    ComplexPtr S2 = share(sphere(2));
    CohClass c{Pair::whole(S2), 2, IntVector{0}};
    EXPECT_THROW(cross_with_z(c, S2), NotAProduct);
    ComplexPtr P = share(product_with_circle(S2));
    CohClass high{Pair::whole(S2), 3, {}};
    EXPECT_THROW(cross_with_z(high, P), DegreeOverflow);
    CohClass flat{Pair::whole(S2), 1, {}};
    EXPECT_THROW(fiber_integrate(flat), NotAProduct);
}

TEST(FiberIntegration, RoundTripOnBuiltins) {
    for (const std::string name : {"point", "S1", "S2", "S3", "D3", "S2xS1", "S3xS1", "C0S2xS1", "CP2", "L1p:2", "L1p:5", "wedge:3", "dS4"}) {
        ComplexPtr X = share(builtin(name));
        ComplexPtr P = share(product_with_circle(X));
        for (int k = 1; k <= 3; ++k) {
            CohomologyGroup Hk(Pair::whole(X), k);
            for (std::size_t g = 0; g < Hk.generator_count(); ++g) {
                CohClass c = class_from_coordinates(Hk, unit(Hk.generator_count(), g));
                CohClass back = fiber_integrate(cross_with_z(c, P));
                EXPECT_TRUE(same_class(back, c)) << name << " k=" << k;
                EXPECT_EQ(back.cochain, c.cochain);
            }
        }
    }
}

TEST(FiberIntegration, PulledBackClassesVanish) {
    ComplexPtr X = share(builtin("S2"));
    ComplexPtr P = share(product_with_circle(X));
    // pi^* of the generator of H^2(S^2): value on (s, v)
    IntVector pulled(P->count(2));
    pulled[P->product_cell(X->find("s"), {0, 0})->index] = 1;
    CohClass c{Pair::whole(P), 2, pulled};
    EXPECT_FALSE(is_zero_class(c));
    EXPECT_TRUE(is_zero_class(fiber_integrate(c)));
}

TEST(FiberIntegration, GeneratorOfS2xS1) {
    ComplexPtr X = share(sphere(2));
    ComplexPtr P = share(product_with_circle(X));
    CohomologyGroup H3(Pair::whole(P), 3);
    CohClass top = class_from_coordinates(H3, {1});
    CohClass down = fiber_integrate(top);
    EXPECT_EQ(abs(coordinates(down)[0]), 1);
}

TEST(Thom, Spaces) {
    ComplexPtr pt = share(point());
    CellComplex T2 = thom_space(trivial_disc_bundle(pt, 2));
    for (int k = 0; k <= 3; ++k) EXPECT_EQ(cohomology(T2, k), cohomology(sphere(2), k)) << k;
    CellComplex T1 = thom_space(trivial_disc_bundle(share(sphere(2)), 1));
    EXPECT_EQ(cohomology(T1, 3), AbelianGroup::Z());
    EXPECT_THROW(thom_space(builtin("S2")), BoundaryNotLabeled);
}

TEST(Thom, IsomorphismShift) {
    for (const std::string name : {"point", "S1", "S2", "CP2", "L1p:3"}) {
        ComplexPtr F = share(builtin(name));
        for (int k = 1; k <= 3; ++k) {
            CellComplex T = thom_space(trivial_disc_bundle(F, k));
            for (int i = 0; i <= F->dimension(); ++i) EXPECT_EQ(cohomology(*F, i), cohomology(T, i + k)) << name << " " << i << " " << k;
            for (int i = 1; i < k; ++i) EXPECT_EQ(cohomology(T, i), AbelianGroup::zero());
        }
    }
}

TEST(Collapse, CommutesWithExcision) {
    // B = D(F), B+ = D(F) with a cone on S(F); F = point, codimension 3
    ComplexPtr F = share(point());
    CellComplex DF = trivial_disc_bundle(F, 3);
    DF.add_label(DF.all(), "N");
    ComplexPtr Bplus = share(attach_cone(DF, DF.labeled("boundary"), "inf"));
    ComplexPtr T = share(thom_space(DF));
    ChainMap lambda = collapse_map(Bplus, T);
    IntMatrix lam3 = lambda.induced(3);
    // H^3(T) -> H^3(B+) is an isomorphism Z -> Z
    EXPECT_TRUE(is_isomorphism(lam3, {0}, {0}));

    // class from H^3(B, B-F) pushed to H^3(B+) equals lambda^* of its Thom image
    ComplexPtr DFp = share(DF);
    CohomologyGroup rel(Pair::labeled(DFp, "", "boundary"), 3);
    CohomologyGroup relplus(Pair::labeled(Bplus, "", "inf"), 3);
    CohomologyGroup top(Pair::whole(Bplus), 3);
    CohomologyGroup thom3(Pair::whole(T), 3);
    IntVector x = rel.representative({1});
    // excision inverse: same cells in B+
    IntVector ext(Bplus->count(3));
    for (std::size_t i = 0; i < DF.count(3); ++i) ext[Bplus->find(DF.cells(3)[i].name).index] = x[i];
    IntVector pushed = top.coordinates(ext);
    IntVector thom_cochain(T->count(3));
    for (std::size_t i = 0; i < DF.count(3); ++i)
        if (x[i] != 0) thom_cochain[T->find(DF.cells(3)[i].name).index] = x[i];
    IntVector via_thom = lam3 * thom3.coordinates(thom_cochain);
    EXPECT_EQ(top.reduce(via_thom), pushed);
    (void)relplus;
}

TEST(Collapse, LabelMismatch) {
    ComplexPtr F = share(point());
    CellComplex DF = trivial_disc_bundle(F, 2);
    ComplexPtr T = share(thom_space(DF));
    EXPECT_THROW(collapse_map(share(DF), T, "N"), LabelMismatch);
    CellComplex DFN = DF;
    DFN.add_label(DFN.all(), "N");
    EXPECT_NO_THROW(collapse_map(share(DFN), T, "N"));
    ComplexPtr T3 = share(thom_space(trivial_disc_bundle(F, 3)));
    EXPECT_THROW(collapse_map(share(DFN), T3, "N"), LabelMismatch);
}

TEST(Json, Group) {
    EXPECT_EQ(to_json(AbelianGroup{1, {3}})["text"], "Z + Z_3");
}
