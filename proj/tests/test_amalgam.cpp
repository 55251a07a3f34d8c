#include <doctest.h>

#include <cmath>

#include "frameforge/amalgam.hpp"
#include "helpers.hpp"

using namespace frameforge;
using namespace testutil;

TEST_CASE("atom family construction and envelope verification") {
    Box box(1, 16.0, 256);
    SUBCASE("valid envelope accepted") {
        CHECK_NOTHROW(poly_family(box, 3.0));
    }
    SUBCASE("violated envelope reports the worst offender") {
        NodeSet nodes(box, {{0, 0}});
        GridFunction f = poly_bump(box, {0, 0}, 2.0);  // decays slower than claimed
        CHECK_THROWS_AS(AtomFamily(nodes, {f}, Envelope{1.0, 4.0}), std::invalid_argument);
        try {
            AtomFamily(nodes, {f}, Envelope{1.0, 4.0});
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("envelope violated") != std::string::npos);
            CHECK(std::string(e.what()).find("grid point") != std::string::npos);
        }
    }
    SUBCASE("length mismatch rejected") {
        NodeSet nodes(box, {{0, 0}, {1, 0}});
        CHECK_THROWS(AtomFamily(nodes, {bump(box, {0, 0}, 1.0)}));
    }
}

TEST_CASE("family amalgam norm: single-cell indicator") {
    Box box(1, 16.0, 512);  // h = 1/32, 1/h integral
    NodeSet nodes(box, {{0, 0}});
    GridFunction f = GridFunction::Zero(box.total_points());
    f[0] = 1.0;
    FamilyAmalgamNorm n = family_amalgam_norm(AtomFamily(nodes, {f}), Weight(0), 1.0);
    // Anchors whose closed unit window meets the cell: measure (1 + h)^d.
    CHECK(n.per_node_l1[0] == doctest::Approx(1.0 + box.step()).epsilon(1e-12));
    CHECK(n.sup_sum == doctest::Approx(1.0));
    CHECK(n.value == doctest::Approx(1.0 + box.step()));
}

TEST_CASE("family amalgam norm: empty family has value 0") {
    Box box(1, 16.0, 256);
    AtomFamily empty(NodeSet(box, {}), {});
    FamilyAmalgamNorm n = family_amalgam_norm(empty, Weight(1.0), 1.0);
    CHECK(n.value == 0.0);
}

TEST_CASE("translate families: norm vs single-generator norm") {
    Box box(1, 16.0, 256);
    AtomFamily family = bump_family(box, 0.8);
    NodeSet single_node(box, {{0, 0}});
    AtomFamily single(single_node, {bump(box, {0, 0}, 0.8)});

    Weight w(1.0);
    const double fam = family_amalgam_norm(family, w, 1.0).value;
    const double gen = family_amalgam_norm(single, w, 1.0).value;
    const int rel = rel_separation(family.nodes());
    const double ratio = fam / gen;
    CHECK(ratio >= 1.0 - 1e-9);
    // Fitted constant of the equivalence: finite and modest at this scale.
    CHECK(ratio <= 10.0 * rel);
    // All per-node L1 parts agree exactly by translation invariance.
    FamilyAmalgamNorm fn = family_amalgam_norm(family, w, 1.0);
    for (double l1 : fn.per_node_l1) CHECK(l1 == doctest::Approx(fn.per_node_l1[0]));
}

TEST_CASE("window equivalence between cube sides") {
    Box box(1, 16.0, 256);
    AtomFamily family = bump_family(box, 0.7);
    Weight w(1.0);
    const double n1 = family_amalgam_norm(family, w, 1.0).value;
    const double n2 = family_amalgam_norm(family, w, 2.0).value;
    // Monotone in the window, and controlled by the covering constant
    // sum_{s in {0,1}} w_1(s) = 3 for sides 1 -> 2 in d = 1.
    CHECK(n1 <= n2 * (1 + 1e-9));
    CHECK(n2 <= 3.0 * n1 * (1 + 1e-9));
    CHECK_THROWS(family_amalgam_norm(family, w, 8.0));  // beyond L/4
    CHECK_THROWS(family_amalgam_norm(family, w, box.step() / 2));
}

TEST_CASE("synthesize: delta and zero coefficients") {
    Box box(1, 16.0, 256);
    AtomFamily family = bump_family(box, 0.8);
    std::vector<Complex> c(family.size(), 0.0);
    GridFunction zero = synthesize(c, family);
    CHECK(zero.norm() == 0.0);
    c[3] = 1.0;
    GridFunction f = synthesize(c, family);
    CHECK((f - family.atom(3)).norm() == 0.0);
    std::vector<Complex> bad(family.size() + 1, 0.0);
    CHECK_THROWS(synthesize(bad, family));
}

TEST_CASE("synthesize is linear to machine precision") {
    Box box(1, 16.0, 256);
    AtomFamily family = bump_family(box, 0.8);
    Rng rng(17);
    std::vector<Complex> c(family.size()), d(family.size());
    for (auto& z : c) z = rng.normal_complex();
    for (auto& z : d) z = rng.normal_complex();
    const Complex a(1.3, -0.4), b(-0.2, 2.1);
    std::vector<Complex> combo(family.size());
    for (std::size_t k = 0; k < family.size(); ++k) combo[k] = a * c[k] + b * d[k];
    GridFunction lhs = synthesize(combo, family);
    GridFunction rhs = Complex(a) * synthesize(c, family) + Complex(b) * synthesize(d, family);
    CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());
}

TEST_CASE("synthesis multiplier bound holds with the moderation constant") {
    Box box(1, 16.0, 256);
    AtomFamily family = bump_family(box, 0.8);
    ModeratedPair vw = make_moderated_pair(box, Weight(1.0), Weight(2.0));
    Rng rng(23);
    std::vector<Complex> c(family.size());
    for (auto& z : c) z = rng.normal_complex();
    for (double p : {1.0, 2.0, kInf}) {
        SynthesisReport rep = synthesize_checked(c, family, p, vw, 1.0);
        CHECK(rep.lhs <= rep.rhs * (1 + 1e-9));
        CHECK(rep.ratio <= vw.constant * (1 + 1e-9));
    }
}

TEST_CASE("matrix_apply: identity, permutation, banded bound") {
    Box box(1, 16.0, 256);
    AtomFamily family = bump_family(box, 0.8);
    const long n = static_cast<long>(family.size());

    SUBCASE("identity gives the family back exactly") {
        SchurMatrix id(Eigen::MatrixXcd::Identity(n, n), family.nodes(), family.nodes());
        AtomFamily g = matrix_apply(id, family);
        for (std::size_t k = 0; k < family.size(); ++k)
            CHECK((g.atom(k) - family.atom(k)).norm() == 0.0);
    }
    SUBCASE("permutation reindexes with equal norms") {
        Eigen::MatrixXcd perm = Eigen::MatrixXcd::Zero(n, n);
        for (long k = 0; k < n; ++k) perm(k, (k + 1) % n) = 1.0;
        SchurMatrix c(perm, family.nodes(), family.nodes());
        AtomFamily g = matrix_apply(c, family);
        Weight w(1.0);
        // Torus translation invariance: permuted translate family, same norm.
        CHECK(family_amalgam_norm(g, w, 1.0).value ==
              doctest::Approx(family_amalgam_norm(family, w, 1.0).value));
    }
    SUBCASE("random banded matrix obeys the Schur bound") {
        Rng rng(31);
        Eigen::MatrixXcd banded = Eigen::MatrixXcd::Zero(n, n);
        for (long k = 0; k < n; ++k)
            for (long j = 0; j < n; ++j) {
                long diff = std::abs(k - j);
                diff = std::min(diff, n - diff);
                if (diff <= 2) banded(k, j) = rng.normal_complex();
            }
        SchurMatrix c(banded, family.nodes(), family.nodes());
        MatrixApplyReport rep = matrix_apply_checked(c, family, Weight(1.0), 1.0);
        CHECK(rep.lhs <= rep.rhs * (1 + 1e-9));
    }
}

TEST_CASE("cross correlation") {
    Box box(1, 16.0, 256);
    SUBCASE("orthonormal indicators on disjoint cells give the identity") {
        AtomFamily f = indicator_family(box, {0, 32, 64, 96});
        SchurMatrix c = cross_correlation(f, f);
        CHECK((c.entries() - Eigen::MatrixXcd::Identity(4, 4)).norm() <= 1e-12);
    }
    SUBCASE("single unit-norm atom gives [1]") {
        GridFunction f = bump(box, {0, 0}, 1.0);
        f /= l2_norm(box, f);
        AtomFamily fam(NodeSet(box, {{0, 0}}), {f});
        SchurMatrix c = cross_correlation(fam, fam);
        CHECK(std::abs(c.entries()(0, 0) - 1.0) <= 1e-12);
    }
    SUBCASE("gaussian bumps: finite Schur norm, bound ratio reported") {
        AtomFamily f = bump_family(box, 0.8);
        CrossCorrelationReport rep = cross_correlation_checked(f, f, Weight(1.0), 1.0);
        CHECK(std::isfinite(rep.schur_norm));
        CHECK(rep.schur_norm > 0);
        CHECK(rep.ratio > 0);
    }
    SUBCASE("adjoint symmetry to machine precision") {
        AtomFamily f = bump_family(box, 0.8);
        AtomFamily g = bump_family(box, 0.5, 1.0, 0.5);
        SchurMatrix fg = cross_correlation(f, g);
        SchurMatrix gf = cross_correlation(g, f);
        CHECK((fg.entries() - gf.entries().adjoint()).norm() <= 1e-13 * fg.entries().norm());
    }
}

TEST_CASE("analysis sequences") {
    Box box(1, 16.0, 256);
    SUBCASE("orthogonal function gives the zero sequence") {
        AtomFamily f = indicator_family(box, {0, 32});
        GridFunction g = GridFunction::Zero(box.total_points());
        g[10] = 1.0;
        auto c = analyze(g, f);
        for (auto z : c) CHECK(std::abs(z) == 0.0);
    }
    SUBCASE("biorthogonality for orthonormal families") {
        AtomFamily f = indicator_family(box, {0, 32, 64});
        auto c = analyze(f.atom(1), f);
        CHECK(std::abs(c[1] - 1.0) <= 1e-12);
        CHECK(std::abs(c[0]) <= 1e-12);
        CHECK(std::abs(c[2]) <= 1e-12);
    }
    SUBCASE("analysis bound holds with the moderation constant") {
        AtomFamily f = bump_family(box, 0.8);
        ModeratedPair vw = make_moderated_pair(box, Weight(1.0), Weight(2.0));
        Rng rng(37);
        GridFunction g = random_function(box, rng);
        for (double p : {1.0, 2.0, kInf}) {
            AnalysisReport rep = analyze_checked(g, f, p, vw, 1.0);
            CHECK(rep.lhs <= vw.constant * rep.rhs * (1 + 1e-9));
        }
    }
}

TEST_CASE("schur interpolation lemma oracle") {
    Box box(1, 16.0, 256);
    AtomFamily f = bump_family(box, 0.8);
    Rng rng(41);
    std::vector<Complex> c(f.size());
    for (auto& z : c) z = rng.normal_complex();
    GridFunction g = random_function(box, rng);
    SchurLemmaReport rep = schur_interpolation_check(f, c, g);
    CHECK(rep.all_hold());
    REQUIRE(rep.part_a.size() == 3);
    // p = 1 is the pure triangle-inequality case.
    CHECK(rep.part_a[0].lhs <= rep.part_a[0].rhs * (1 + 1e-9));
    // p = inf with c == 1: ||sum f_k||_inf <= sup_x sum |f_k|.
    std::vector<Complex> ones(f.size(), 1.0);
    GridFunction zero_g = GridFunction::Zero(box.total_points());
    SchurLemmaReport rep1 = schur_interpolation_check(f, ones, zero_g);
    CHECK(rep1.part_a[2].lhs <= rep1.part_a[2].rhs * (1 + 1e-9));
}

TEST_CASE("Schur norm is submultiplicative for submultiplicative weights") {
    Box box(1, 16.0, 256);
    NodeSet nodes = integer_nodes(box);
    const long n = static_cast<long>(nodes.size());
    Rng rng(43);
    auto banded = [&](int band) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
        for (long k = 0; k < n; ++k)
            for (long j = 0; j < n; ++j) {
                long diff = std::abs(k - j);
                diff = std::min(diff, n - diff);
                if (diff <= band) m(k, j) = rng.normal_complex();
            }
        return m;
    };
    Weight w(1.0);
    for (int trial = 0; trial < 5; ++trial) {
        SchurMatrix a(banded(2), nodes, nodes);
        SchurMatrix b(banded(3), nodes, nodes);
        SchurMatrix ab(a.entries() * b.entries(), nodes, nodes);
        CHECK(ab.schur_norm(w) <= a.schur_norm(w) * b.schur_norm(w) * (1 + 1e-9));
    }
}

TEST_CASE("atom family serialization round-trip") {
    Box box(1, 16.0, 64);
    AtomFamily family = poly_family(box, 3.0, 4.0);
    std::string text = atom_family_to_json(family);
    AtomFamily back = atom_family_from_json(text);
    REQUIRE(back.size() == family.size());
    for (std::size_t k = 0; k < family.size(); ++k)
        CHECK((back.atom(k) - family.atom(k)).norm() <= 1e-15);
    REQUIRE(back.envelope().has_value());
    CHECK(back.envelope()->exponent == doctest::Approx(3.0));
}
