#include <doctest.h>

#include <cmath>

#include "cvqt/fock.hpp"
#include "cvqt/subtraction.hpp"

using namespace cvqt;

TEST_CASE("formal_subtract") {
    SUBCASE("s = 0 is the identity") {
        const GammaTable t = build_table(make_tmsv(0.5), Cutoffs{10, 10, 100});
        const GammaTable u = formal_subtract(t, 0);
        CHECK((t.diag() - u.diag()).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("TMSV s = 1 reproduces the subtracted Schmidt weights") {
        const double z = 0.86;
        const GammaTable src = build_table(make_tmsv(z), Cutoffs{35, 35, 200});
        const GammaTable sub = formal_subtract(src, 1);
        CHECK(sub.cutoffs().n_c == 34);
        const FockTwoModeState oracle = photon_subtract_fock(tmsv_fock(z, 70), 1);
        double worst = 0.0;
        for (int n = 0; n <= 20; ++n) {
            const double pop = oracle.amplitudes()(n, n) * oracle.amplitudes()(n, n);
            worst = std::max(worst, std::abs(sub.diag()(n, n) - pop));
            const double coh = oracle.amplitudes()(n, n) * oracle.amplitudes()(n + 1, n + 1);
            worst = std::max(worst, std::abs(sub.ggee()(n, n) - coh));
        }
        CHECK(worst < 1e-8);
    }
    SUBCASE("thermal product stays rank one") {
        StandardForm th;
        th.n1 = 1.9;
        th.n2 = 1.4;
        const GammaTable sub = formal_subtract(build_table(th, Cutoffs{14, 14, 80}), 1);
        double worst = 0.0;
        for (int n = 0; n <= 12; ++n)
            for (int m = 0; m <= 12; ++m)
                worst = std::max(worst, std::abs(sub.diag()(n, m) * sub.diag()(0, 0) -
                                                 sub.diag()(n, 0) * sub.diag()(0, m)));
        CHECK(worst < 1e-10);
    }
    SUBCASE("renormalization order does not matter") {
        const GammaTable t = build_table(make_tmsv(1.1), Cutoffs{20, 20, 150});
        // explicitly pre-normalized copy
        GammaTable scaled(t.sf(), t.cutoffs(), t.diag() / t.normalization(),
                          t.ge() / t.normalization(), t.eg() / t.normalization(),
                          t.ggee() / t.normalization(), t.geeg() / t.normalization());
        const GammaTable a = formal_subtract(t, 2);
        const GammaTable b = formal_subtract(scaled, 2);
        CHECK((a.diag() - b.diag()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((a.ggee() - b.ggee()).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("source cutoffs must cover the shift") {
        const GammaTable t = build_table(make_tmsv(0.5), Cutoffs{3, 3, 60});
        CHECK_THROWS_AS(formal_subtract(t, 5), TruncationError);
    }
}

TEST_CASE("physical_subtract") {
    const GammaTable src = build_table(make_tmsv(0.86), Cutoffs{26, 26, 150});
    SUBCASE("output is normalized") {
        const GammaTable p = physical_subtract(src, 0.9);
        CHECK(p.diag().sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("T = 0.9999 is indistinguishable from the formal map") {
        const GammaTable f = formal_subtract(src, 1);
        const GammaTable p = physical_subtract(src, 0.9999);
        const std::vector<double> taus = linspace(0.0, 2.0 * M_PI, 200);
        const TransferCurve cf = transfer_curve(f, taus);
        const TransferCurve cp = transfer_curve(p, taus);
        double worst = 0.0;
        for (std::size_t i = 0; i < taus.size(); ++i)
            worst = std::max(worst, std::abs(cf.negativity[i] - cp.negativity[i]));
        CHECK(worst <= 1e-3);
    }
    SUBCASE("entrywise convergence to the formal map as T -> 1") {
        const GammaTable f = formal_subtract(src, 1);
        const GammaTable p = physical_subtract(src, 1.0 - 1e-8);
        double worst = std::max((f.diag() - p.diag()).cwiseAbs().maxCoeff(),
                                (f.ggee() - p.ggee()).cwiseAbs().maxCoeff());
        worst = std::max(worst, (f.ge() - p.ge()).cwiseAbs().maxCoeff());
        CHECK(worst < 1e-5);
    }
    SUBCASE("transmittivity validation") {
        CHECK_THROWS_AS(physical_subtract(src, 1.0), ParameterError);
        CHECK_THROWS_AS(physical_subtract(src, 0.0), ParameterError);
    }
}

TEST_CASE("gaussian_equivalent_cm") {
    SUBCASE("s = 0 reduces to the TMSV") {
        const StandardForm sf = gaussian_equivalent_cm(0.7, 0);
        const StandardForm ref = make_tmsv(0.7);
        CHECK(sf.n1 == doctest::Approx(ref.n1).epsilon(1e-9));
        CHECK(sf.m_plus == doctest::Approx(ref.m_plus).epsilon(1e-9));
    }
    SUBCASE("frozen anchor at zeta = 0.5, s = 1") {
        const StandardForm sf = gaussian_equivalent_cm(0.5, 1);
        CHECK(sf.n1 == doctest::Approx(2.98118763078184594).epsilon(1e-10));
        CHECK(sf.m_plus == doctest::Approx(2.76400942497563948).epsilon(1e-10));
        CHECK(sf.m_minus == doctest::Approx(-2.76400942497563948).epsilon(1e-10));
    }
    SUBCASE("stable under truncation refinement") {
        const StandardForm a = gaussian_equivalent_cm(0.5, 1, 120);
        const StandardForm b = gaussian_equivalent_cm(0.5, 1, 240);
        CHECK(std::abs(a.n1 - b.n1) < 1e-8);
        CHECK(std::abs(a.m_plus - b.m_plus) < 1e-8);
    }
    SUBCASE("second moments witness more entanglement after subtraction") {
        for (double z : {0.3, 0.86})
            CHECK(nu_minus(gaussian_equivalent_cm(z, 1)) < nu_minus(make_tmsv(z)));
    }
}

TEST_CASE("max_transfer") {
    SUBCASE("vacuum transfers nothing") {
        const GammaTable vac = build_table(StandardForm{}, Cutoffs{6, 6, 40});
        CHECK(max_transfer(vac) == 0.0);
    }
    SUBCASE("TMSV(0.86) maximum matches the oracle") {
        const GammaTable t = build_table(make_tmsv(0.86), Cutoffs{});
        const FockTwoModeState f = tmsv_fock(0.86, 60);
        double oracle = 0.0;
        for (double tau : linspace(0.0, 2.0 * M_PI, 4000))
            oracle = std::max(oracle, negativity(jc_evolve_trace(f, tau)));
        CHECK(max_transfer(t) == doctest::Approx(oracle).epsilon(1e-4));
    }
    SUBCASE("nonincreasing in s for a mixed random resource") {
        const StandardForm sf = to_standard_form(random_resource(7)).first;
        double prev = max_transfer(build_subtracted(sf, 0, Cutoffs{25, 25, 100}));
        for (int s = 1; s <= 4; ++s) {
            const double cur = max_transfer(build_subtracted(sf, s, Cutoffs{25, 25, 100}));
            CHECK(cur <= prev + 1e-9);
            prev = cur;
        }
    }
}

TEST_CASE("non_gaussianity") {
    CHECK(non_gaussianity(0.8, 0) == 0.0);
    CHECK(non_gaussianity(0.1, 1) >= 0.0);
    CHECK(non_gaussianity(1.0, 1) >= 0.0);
    // doubled-truncation stability through the pipeline
    const double a = von_neumann_entropy(
        CovarianceMatrix(gaussian_equivalent_cm(1.0, 1, 150).matrix()));
    const double b = von_neumann_entropy(
        CovarianceMatrix(gaussian_equivalent_cm(1.0, 1, 300).matrix()));
    CHECK(std::abs(a - b) < 1e-8);
}

TEST_CASE("transfer ordering at zeta = 0.86 is reversed by subtraction") {
    // the resource entanglement grows with s while the transferred maximum drops
    const StandardForm sf = make_tmsv(0.86);
    const GammaTable plain = build_table(sf, Cutoffs{});
    const GammaTable sub = formal_subtract(build_table(sf, Cutoffs{35, 35, 200}), 1);
    const double m0 = max_transfer(plain);
    const double m1 = max_transfer(sub);
    CHECK(m1 < m0);
    CHECK(cv_log_negativity(photon_subtract_fock(tmsv_fock(0.86, 80), 1)) >
          cv_log_negativity(tmsv_fock(0.86, 80)));
}

TEST_CASE("degauss_difference basics") {
    DegaussOptions opts;
    opts.cutoffs = Cutoffs{18, 18, 120};
    const std::vector<double> zetas = {0.0, 0.86};
    const std::vector<double> taus = linspace(0.0, 2.0 * M_PI, 40);
    const DegaussSurface surf = degauss_difference(zetas, taus, 1, opts);
    REQUIRE(surf.rows.size() == zetas.size() * taus.size());
    for (std::size_t i = 0; i < taus.size(); ++i) {
        CHECK(surf.rows[i].e_gaus == 0.0);  // zeta = 0 column
        CHECK(surf.rows[i].e_nongaus == 0.0);
    }
    // at 0.86 the subtracted state transfers strictly less at its peak
    double mg = 0.0, mn = 0.0;
    for (std::size_t i = taus.size(); i < surf.rows.size(); ++i) {
        mg = std::max(mg, surf.rows[i].e_gaus);
        mn = std::max(mn, surf.rows[i].e_nongaus);
    }
    CHECK(mg > mn);
}
