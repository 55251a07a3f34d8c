#include <doctest.h>

#include <cmath>

#include "frameforge/fft.hpp"
#include "frameforge/siskn.hpp"
#include "helpers.hpp"

using namespace frameforge;
using namespace testutil;

namespace {

struct SisFixture {
    Box box{1, 16.0, 256};
    LatticePair lat;
    SisFixture() : lat(box, {1.0}) {}

    // A signal whose Fourier transform is the indicator of a frequency set.
    GridFunction from_spectrum_indicator(const std::vector<long>& freqs) const {
        GridFunction fhat = GridFunction::Zero(box.total_points());
        for (long m : freqs) fhat[m] = 1.0;
        return fourier_hat_inverse(box, fhat);
    }
};

GridFunction translate(const Box& box, const GridFunction& g, double shift) {
    const int n = box.points_per_axis();
    const long s = std::lround(shift / box.step());
    GridFunction out(n);
    for (int j = 0; j < n; ++j) out[j] = g[((j - s) % n + n) % n];
    return out;
}

}  // namespace

TEST_CASE("lattice pair validation and enumeration") {
    Box box(1, 16.0, 256);
    LatticePair lat(box, {2.0});
    CHECK(lat.size() == 8);
    CHECK(lat.dual_size() == 32);   // 2.0 / (1/16)
    CHECK(lat.fiber_size() == 8);
    CHECK(lat.volume() == doctest::Approx(2.0));
    CHECK_THROWS_WITH(LatticePair(box, {0.7}), "incommensurate lattice");
    CHECK_THROWS_WITH(LatticePair(box, {3.0}), "incommensurate lattice");
    // Every frequency index appears exactly once in the fiber enumeration.
    std::vector<int> seen(box.total_points(), 0);
    for (long x = 0; x < lat.fiber_size(); ++x)
        for (long k = 0; k < lat.dual_size(); ++k) seen[lat.freq_index(x, k)]++;
    for (int s : seen) CHECK(s == 1);
}

TEST_CASE("bracket products") {
    SisFixture fx;
    SUBCASE("spectral indicator of a fundamental domain gives bracket == 1") {
        std::vector<long> fund;
        for (long m = 0; m < fx.lat.fiber_size(); ++m) fund.push_back(m);
        GridFunction f = fx.from_spectrum_indicator(fund);
        GridFunction b = bracket(fx.box, f, f, fx.lat);
        for (long x = 0; x < b.size(); ++x)
            CHECK(std::abs(b[x] - 1.0) <= 1e-10);
    }
    SUBCASE("disjoint dual orbits give bracket == 0 and orthogonal translates") {
        std::vector<long> layer0, layer1;
        for (long x = 0; x < fx.lat.fiber_size(); ++x) {
            layer0.push_back(fx.lat.freq_index(x, 0));
            layer1.push_back(fx.lat.freq_index(x, 1));
        }
        GridFunction f = fx.from_spectrum_indicator(layer0);
        GridFunction g = fx.from_spectrum_indicator(layer1);
        GridFunction b = bracket(fx.box, f, g, fx.lat);
        CHECK(b.norm() <= 1e-10);
        // Oracle: direct inner products against every lattice translate.
        for (long l = 0; l < fx.lat.size(); ++l) {
            GridFunction tg = translate(fx.box, g, fx.lat.point(l)[0]);
            CHECK(std::abs(inner(fx.box, f, tg)) <= 1e-10);
        }
    }
    SUBCASE("conjugate symmetry") {
        Rng rng(3);
        GridFunction f = random_function(fx.box, rng);
        GridFunction g = random_function(fx.box, rng);
        GridFunction fg = bracket(fx.box, f, g, fx.lat);
        GridFunction gf = bracket(fx.box, g, f, fx.lat);
        for (long x = 0; x < fg.size(); ++x)
            CHECK(std::abs(fg[x] - std::conj(gf[x])) <= 1e-12 * (1 + std::abs(fg[x])));
    }
    SUBCASE("periodicity modulo the dual lattice is exact index arithmetic") {
        Rng rng(5);
        GridFunction f = random_function(fx.box, rng);
        GridFunction g = random_function(fx.box, rng);
        GridFunction fh = fourier_hat(fx.box, f);
        GridFunction gh = fourier_hat(fx.box, g);
        GridFunction b = bracket(fx.box, f, g, fx.lat);
        // Recompute the defining sum with the base point shifted by one dual
        // step: identical index set, identical value.
        for (long x = 0; x < fx.lat.fiber_size(); x += 3) {
            Complex s = 0;
            for (long k = 0; k < fx.lat.dual_size(); ++k) {
                long m = (fx.lat.freq_index(x, k) + fx.lat.fiber_size()) %
                         fx.box.total_points();
                s += fh[m] * std::conj(gh[m]);
            }
            CHECK(std::abs(s - b[x]) <= 1e-12 * (1 + std::abs(b[x])));
        }
    }
}

TEST_CASE("fiber gram matrices") {
    SisFixture fx;
    SUBCASE("constant unit bracket gives all fibers [1]") {
        std::vector<long> fund;
        for (long m = 0; m < fx.lat.fiber_size(); ++m) fund.push_back(m);
        std::vector<GridFunction> f{fx.from_spectrum_indicator(fund)};
        FiberGram fg = fiber_gram(fx.box, f, f, fx.lat);
        CHECK(fg.uniformly_invertible());
        for (const auto& m : fg.fibers) CHECK(std::abs(m(0, 0) - 1.0) <= 1e-10);
        CHECK(fg.sup_norm == doctest::Approx(1.0));
        CHECK(fg.sup_inverse_norm == doctest::Approx(1.0));
    }
    SUBCASE("orthogonal generator pair has zero off-diagonal fibers") {
        std::vector<long> layer0, layer1;
        for (long x = 0; x < fx.lat.fiber_size(); ++x) {
            layer0.push_back(fx.lat.freq_index(x, 0));
            layer1.push_back(fx.lat.freq_index(x, 1));
        }
        std::vector<GridFunction> gens{fx.from_spectrum_indicator(layer0),
                                       fx.from_spectrum_indicator(layer1)};
        FiberGram fg = fiber_gram(fx.box, gens, gens, fx.lat);
        for (const auto& m : fg.fibers) {
            CHECK(std::abs(m(0, 1)) <= 1e-10);
            CHECK(std::abs(m(1, 0)) <= 1e-10);
        }
    }
    SUBCASE("singular fibers are flagged with infinite inverse norm") {
        // Zero out one full dual orbit: that fiber's Gram vanishes.
        std::vector<long> fund;
        for (long m = 1; m < fx.lat.fiber_size(); ++m) fund.push_back(m);
        std::vector<GridFunction> f{fx.from_spectrum_indicator(fund)};
        FiberGram fg = fiber_gram(fx.box, f, f, fx.lat);
        CHECK_FALSE(fg.uniformly_invertible());
        REQUIRE(fg.singular_fibers.size() == 1);
        CHECK(fg.singular_fibers[0] == 0);
        CHECK(std::isinf(fg.sup_inverse_norm));
    }
}

TEST_CASE("fiber criterion agrees with the full-Gram criterion") {
    SisFixture fx;
    Rng rng(7);
    int checked = 0;
    auto smooth_random = [&]() {
        // Band-limited random generator: smooth and generic.
        GridFunction fhat = GridFunction::Zero(fx.box.total_points());
        for (long m = 0; m < 24; ++m) {
            fhat[m] = rng.normal_complex();
            if (m > 0) fhat[fx.box.total_points() - m] = rng.normal_complex();
        }
        return fourier_hat_inverse(fx.box, fhat);
    };
    std::vector<std::vector<GridFunction>> configs;
    configs.push_back({bump(fx.box, {0, 0}, 0.5)});
    configs.push_back({bump(fx.box, {0, 0}, 1.0)});
    configs.push_back({poly_bump(fx.box, {0, 0}, 4.0)});
    configs.push_back({bump(fx.box, {0, 0}, 0.5), bump(fx.box, {0.25, 0}, 1.0)});
    for (int i = 0; i < 5; ++i) configs.push_back({smooth_random()});
    // Deliberately singular fiber: one dual orbit removed.
    std::vector<long> fund;
    for (long m = 1; m < fx.lat.fiber_size(); ++m) fund.push_back(m);
    configs.push_back({fx.from_spectrum_indicator(fund)});

    REQUIRE(configs.size() == 10);
    int disagreements = 0;
    bool saw_singular = false;
    for (const auto& gens : configs) {
        RieszVerdict v = riesz_verdicts(fx.box, gens, fx.lat);
        if (!v.agree()) ++disagreements;
        if (!v.fiber_invertible) saw_singular = true;
        ++checked;
    }
    CHECK(checked == 10);
    CHECK(disagreements == 0);
    CHECK(saw_singular);
}

TEST_CASE("full Gram spectrum equals the fiber spectra rescaled by the volume") {
    Box box(1, 16.0, 256);
    LatticePair lat(box, {2.0});
    std::vector<GridFunction> gens{bump(box, {0, 0}, 0.6), bump(box, {0.5, 0}, 1.1)};
    FiberGram fg = fiber_gram(box, gens, gens, lat);
    std::vector<double> fiber_eigs;
    for (const auto& m : fg.fibers) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()));
        for (long i = 0; i < es.eigenvalues().size(); ++i)
            fiber_eigs.push_back(es.eigenvalues()[i] / lat.volume());
    }
    std::sort(fiber_eigs.begin(), fiber_eigs.end());
    AtomFamily family = translate_system(box, gens, lat);
    SpectrumInfo direct = spectrum_of(gram(family).entries());
    REQUIRE(fiber_eigs.size() == direct.eigenvalues.size());
    for (std::size_t i = 0; i < fiber_eigs.size(); ++i)
        CHECK(fiber_eigs[i] ==
              doctest::Approx(direct.eigenvalues[i]).epsilon(1e-8).scale(direct.upper));
}

TEST_CASE("fiber duals reconstruct the shift-invariant span") {
    SisFixture fx;
    std::vector<GridFunction> ref{bump(fx.box, {0, 0}, 0.5), bump(fx.box, {0.25, 0}, 0.9)};

    auto check_reconstruction = [&](const std::vector<GridFunction>& probe_gens) {
        FiberGram cross = fiber_gram(fx.box, ref, probe_gens, fx.lat);
        REQUIRE(cross.uniformly_invertible());
        std::vector<GridFunction> duals = fiber_duals(fx.box, ref, cross, fx.lat);
        AtomFamily ref_family = translate_system(fx.box, ref, fx.lat);
        AtomFamily probe_family = translate_system(fx.box, probe_gens, fx.lat);
        AtomFamily dual_family = translate_system(fx.box, duals, fx.lat);
        Rng rng(11);
        GridFunction f = random_span(ref_family, 1, rng).col(0);
        GridFunction rec = dual_family.matrix() *
                           (probe_family.matrix().adjoint() * f * fx.box.cell_measure());
        CHECK(l2_norm(fx.box, rec - f) <= 1e-8 * l2_norm(fx.box, f));
    };

    SUBCASE("self-dual case") { check_reconstruction(ref); }
    SUBCASE("distinct donor generators") {
        check_reconstruction({bump(fx.box, {0, 0}, 0.7), bump(fx.box, {0.5, 0}, 1.2)});
    }
}

TEST_CASE("quilt_sis") {
    SisFixture fx;
    std::vector<GridFunction> ref{bump(fx.box, {0, 0}, 0.6)};

    SUBCASE("single donor identical to the reference recovers its bounds") {
        std::vector<long> all(fx.box.total_points());
        for (long i = 0; i < fx.box.total_points(); ++i) all[i] = i;
        Covering whole(fx.box, {all});
        SisQuiltReport rep = quilt_sis(fx.box, ref, {ref}, fx.lat, whole,
                                       std::vector<double>{fx.box.side() / 2});
        REQUIRE_FALSE(rep.refused);
        REQUIRE(rep.rows.size() == 1);
        CHECK(rep.rows[0].lower ==
              doctest::Approx(rep.reference_bounds.lower).epsilon(1e-8));
        CHECK(rep.rows[0].upper ==
              doctest::Approx(rep.reference_bounds.upper).epsilon(1e-8));
        CHECK(rep.rows[0].certified);
    }
    SUBCASE("two donors over half-boxes certify at a large radius") {
        Covering halves = axis_split_covering(
            fx.box, std::vector<std::pair<double, double>>{{0.0, 8.0}, {8.0, 16.0}});
        std::vector<std::vector<GridFunction>> donors{
            {bump(fx.box, {0, 0}, 0.5)}, {bump(fx.box, {0, 0}, 0.8)}};
        SisQuiltReport rep = quilt_sis(fx.box, ref, donors, fx.lat, halves,
                                       std::vector<double>{1.0, 3.0, 8.0});
        REQUIRE_FALSE(rep.refused);
        CHECK(rep.rows.back().certified);
        CHECK(rep.rows.back().lower > 0);
        CHECK(std::isfinite(rep.sup_fiber_inverse_norm));
        // Deviation shrinks with the radius.
        CHECK(rep.rows.back().deviation < rep.rows.front().deviation);
    }
    SUBCASE("a donor with a singular fiber refuses certification") {
        std::vector<long> fund;
        for (long m = 1; m < fx.lat.fiber_size(); ++m) fund.push_back(m);
        std::vector<std::vector<GridFunction>> donors{
            {fx.from_spectrum_indicator(fund)}};
        std::vector<long> all(fx.box.total_points());
        for (long i = 0; i < fx.box.total_points(); ++i) all[i] = i;
        Covering whole(fx.box, {all});
        SisQuiltReport rep = quilt_sis(fx.box, ref, donors, fx.lat, whole,
                                       std::vector<double>{8.0});
        CHECK(rep.refused);
        CHECK(rep.refusal.find("singular fiber") != std::string::npos);
    }
}

TEST_CASE("Kohn-Nirenberg rank-one symbols") {
    Box box(1, 8.0, 64);
    Rng rng(13);
    GridFunction f = random_function(box, rng);
    GridFunction g = random_function(box, rng);
    KNSymbol sym = kn_symbol_rank_one(box, f, g);

    SUBCASE("value at the origin") {
        GridFunction gh = fourier_hat(box, g);
        CHECK(std::abs(sym.values[0] - f[0] * std::conj(gh[0])) <= 1e-12);
    }
    SUBCASE("HS norm of a rank-one operator") {
        const double hs = sym.values.norm() * std::sqrt(sym.tf_box.cell_measure());
        CHECK(hs == doctest::Approx(l2_norm(box, f) * l2_norm(box, g)).epsilon(1e-8));
    }
    SUBCASE("2d Fourier transform equals V_g f(-w, x)") {
        GridFunction sym_hat = fourier_hat(sym.tf_box, sym.values);
        STFTImage v = stft(box, f, g);
        const int n = box.points_per_axis();
        double worst = 0;
        for (int m0 = 0; m0 < n; ++m0) {
            for (int m1 = 0; m1 < n; ++m1) {
                const long t_idx = ((-m1) % n + n) % n;  // time -m1/L on the grid
                const Complex expected = v.values[t_idx * n + m0];
                worst = std::max(worst,
                                 std::abs(sym_hat[static_cast<long>(m0) * n + m1] - expected));
            }
        }
        CHECK(worst <= 1e-8);
    }
    SUBCASE("KN map is an HS isometry against the operator-matrix oracle") {
        GridFunction f2 = random_function(box, rng);
        GridFunction g2 = random_function(box, rng);
        KNSymbol sym2 = kn_symbol_rank_one(box, f2, g2);
        const double mu = sym.tf_box.cell_measure();
        const Complex lhs = sym2.values.dot(sym.values) * mu;
        Eigen::MatrixXcd p1 = f * g.adjoint() * box.cell_measure();
        Eigen::MatrixXcd p2 = f2 * g2.adjoint() * box.cell_measure();
        const Complex rhs = hs_inner(p1, p2);
        CHECK(std::abs(lhs - rhs) <= 1e-8 * std::abs(rhs));
    }
    SUBCASE("translation covariance") {
        for (Point z : {Point{1.0, 0.5}, Point{2.0, 3.5}}) {
            GridFunction pf = tf_atom(box, z, f);
            GridFunction pg = tf_atom(box, z, g);
            KNSymbol shifted = kn_symbol_rank_one(box, pf, pg);
            GridFunction expected = tf_translate(sym.tf_box, sym.values, z);
            CHECK((shifted.values - expected).norm() <= 1e-8 * expected.norm());
        }
    }
}

TEST_CASE("gabor multiplier: symbol matches the operator-matrix oracle") {
    Box box(1, 8.0, 64);
    TFLattice lattice(box, 1.0, 0.5);
    GridFunction w = gauss_window(box);
    GridFunction w2 = bump(box, {0, 0}, 0.8);
    GaborMultiplier T{box, lattice, {{w, w}, {w2, w2}}, {}};
    Rng rng(17);
    for (int p = 0; p < 2; ++p) {
        Eigen::VectorXcd mask(lattice.size());
        for (long l = 0; l < lattice.size(); ++l) mask[l] = rng.normal_complex();
        T.masks.push_back(mask);
    }
    KNSymbol sym = T.symbol();
    Eigen::MatrixXcd op = T.operator_matrix();
    const double hs_sym = sym.values.norm() * std::sqrt(sym.tf_box.cell_measure());
    CHECK(hs_sym == doctest::Approx(op.norm()).epsilon(1e-8));
}

TEST_CASE("multiplier mask recovery") {
    Box box(1, 8.0, 64);
    TFLattice lattice(box, 1.0, 0.5);
    GridFunction w1 = gauss_window(box);
    GridFunction w2 = bump(box, {0, 0}, 0.7);
    for (long i = 0; i < w2.size(); ++i) w2[i] /= l2_norm(box, w2);

    Rng rng(19);
    GaborMultiplier truth{box, lattice, {{w1, w1}}, {}};
    Eigen::VectorXcd mask(lattice.size());
    for (long l = 0; l < lattice.size(); ++l) mask[l] = rng.normal_complex();
    truth.masks.push_back(mask);

    Box tf = lattice.tf_box();
    Covering halves = axis_split_covering(
        tf, std::vector<std::pair<double, double>>{{0.0, 4.0}, {4.0, 8.0}});

    SUBCASE("probes equal to the reference with full selection recover exactly") {
        std::vector<std::vector<std::pair<GridFunction, GridFunction>>> probes{
            {{w1, w1}}, {{w1, w1}}};
        RecoveryReport rep = multiplier_recover(truth, probes, halves, tf.side());
        REQUIRE_FALSE(rep.rank_deficient);
        REQUIRE(rep.masks.has_value());
        CHECK(((*rep.masks)[0] - mask).norm() <= 1e-8 * mask.norm());
        CHECK(rep.hs_residual <= 1e-8);
    }
    SUBCASE("two distinct probe families at a moderate radius") {
        std::vector<std::vector<std::pair<GridFunction, GridFunction>>> probes{
            {{w1, w1}}, {{w2, w2}}};
        RecoveryReport rep = multiplier_recover(truth, probes, halves, 2.0);
        REQUIRE_FALSE(rep.rank_deficient);
        REQUIRE(rep.masks.has_value());
        CHECK(((*rep.masks)[0] - mask).norm() <= 1e-6 * mask.norm());
        CHECK(rep.hs_residual <= 1e-6);
    }
    SUBCASE("structural rank deficiency at r = 0 is reported") {
        // Two reference pairs but single-pair probe families: at r = 0 each
        // lattice point is measured by one probe only, half the rows needed.
        GaborMultiplier truth2{box, lattice, {{w1, w1}, {w2, w2}}, {}};
        Eigen::VectorXcd m2(lattice.size());
        for (long l = 0; l < lattice.size(); ++l) m2[l] = rng.normal_complex();
        truth2.masks.push_back(mask);
        truth2.masks.push_back(m2);
        std::vector<std::vector<std::pair<GridFunction, GridFunction>>> probes{
            {{w1, w1}}, {{w2, w2}}};
        RecoveryReport rep = multiplier_recover(truth2, probes, halves, 0.0);
        CHECK(rep.rank_deficient);
        CHECK_FALSE(rep.masks.has_value());
        CHECK(rep.smallest_singular_value <= 1e-10 * rep.largest_singular_value);
        // The same mixed system becomes well-posed at a large radius.
        RecoveryReport rep_large = multiplier_recover(truth2, probes, halves, 4.0);
        CHECK_FALSE(rep_large.rank_deficient);
        REQUIRE(rep_large.masks.has_value());
        double num = ((*rep_large.masks)[0] - mask).norm() +
                     ((*rep_large.masks)[1] - m2).norm();
        CHECK(num <= 1e-6 * (mask.norm() + m2.norm()));
    }
}
