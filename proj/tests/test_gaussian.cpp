#include <doctest.h>

#include <cmath>
#include <random>

#include "cvqt/gaussian.hpp"

using namespace cvqt;

namespace {

// random single-mode symplectic: rotation * squeeze * rotation
Eigen::Matrix2d random_sp2(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> sq(-0.8, 0.8);
    auto rot = [](double t) {
        Eigen::Matrix2d r;
        r << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
        return r;
    };
    Eigen::Matrix2d s = Eigen::Matrix2d::Identity();
    const double r = sq(gen);
    s(0, 0) = std::exp(-r);
    s(1, 1) = std::exp(r);
    return rot(ang(gen)) * s * rot(ang(gen));
}

}  // namespace

TEST_CASE("make_tmsv anchors") {
    const StandardForm vac = make_tmsv(0.0);
    CHECK(vac.n1 == 1.0);
    CHECK(vac.n2 == 1.0);
    CHECK(vac.m_plus == 0.0);
    CHECK(vac.m_minus == 0.0);

    const StandardForm sf = make_tmsv(0.86);
    CHECK(sf.n1 == doctest::Approx(2.88179730609377362).epsilon(1e-14));
    CHECK(sf.m_plus == doctest::Approx(2.70273115818228039).epsilon(1e-14));
    CHECK(sf.m_minus == doctest::Approx(-2.70273115818228039).epsilon(1e-14));

    CHECK(make_tmsv(-0.5) == make_tmsv(0.5));
}

TEST_CASE("squeezed thermal beam-splitter construction") {
    SUBCASE("vacuum through passive optics") {
        ResourceParams p;
        p.s1 = p.s2 = 0.0;
        p.transmittivity = 0.37;
        p.phi1 = 1.1;
        p.phi2 = -0.4;
        const CovarianceMatrix v = make_squeezed_thermal_bs(p);
        CHECK((v.mat() - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("symmetric squeezed thermal anchor") {
        ResourceParams p;
        p.s1 = 0.86;
        p.s2 = -0.86;
        p.transmittivity = 0.5;
        p.nbar1 = p.nbar2 = 0.7;
        const auto [sf, op] = to_standard_form(make_squeezed_thermal_bs(p));
        const double lam = 1.0 + 2.0 * 0.7;
        CHECK(sf.n1 == doctest::Approx(lam * 2.88179730609377362).epsilon(1e-12));
        CHECK(sf.n2 == doctest::Approx(lam * 2.88179730609377362).epsilon(1e-12));
        CHECK(sf.m_plus == doctest::Approx(lam * 2.70273115818228039).epsilon(1e-12));
        CHECK(sf.m_minus == doctest::Approx(-lam * 2.70273115818228039).epsilon(1e-12));
        CHECK(op.is_symplectic());
    }
    SUBCASE("nbar = 0 reproduces the TMSV") {
        ResourceParams p;
        p.s1 = 0.86;
        p.s2 = -0.86;
        p.transmittivity = 0.5;
        const auto [sf, op] = to_standard_form(make_squeezed_thermal_bs(p));
        const StandardForm ref = make_tmsv(0.86);
        CHECK(sf.n1 == doctest::Approx(ref.n1).epsilon(1e-12));
        CHECK(sf.m_plus == doctest::Approx(ref.m_plus).epsilon(1e-12));
        CHECK(sf.m_minus == doctest::Approx(ref.m_minus).epsilon(1e-12));
    }
    SUBCASE("invalid transmittivity") {
        ResourceParams p;
        p.transmittivity = 1.2;
        CHECK_THROWS_AS(make_squeezed_thermal_bs(p), ParameterError);
    }
}

TEST_CASE("to_standard_form") {
    SUBCASE("already standard: identity operation") {
        const StandardForm in = make_tmsv(0.6);
        const auto [sf, op] = to_standard_form(CovarianceMatrix(in.matrix()));
        CHECK(sf.n1 == doctest::Approx(in.n1).epsilon(1e-12));
        CHECK(sf.m_minus == doctest::Approx(in.m_minus).epsilon(1e-12));
        CHECK((op.matrix() - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-9);
    }
    SUBCASE("thermal product") {
        Eigen::Matrix4d v = Eigen::Matrix4d::Identity();
        v(0, 0) = v(1, 1) = 3.0;
        v(2, 2) = v(3, 3) = 2.0;
        const auto [sf, op] = to_standard_form(CovarianceMatrix(v));
        CHECK(sf.n1 == doctest::Approx(3.0));
        CHECK(sf.n2 == doctest::Approx(2.0));
        CHECK(sf.m_plus == doctest::Approx(0.0));
        CHECK(sf.m_minus == doctest::Approx(0.0));
    }
    SUBCASE("invariance under random local symplectics") {
        std::mt19937_64 gen(7);
        const StandardForm ref = make_tmsv(0.86);
        for (int trial = 0; trial < 10; ++trial) {
            LocalSymplectic s{random_sp2(gen), random_sp2(gen)};
            REQUIRE(s.is_symplectic());
            const Eigen::Matrix4d v = s.matrix() * ref.matrix() * s.matrix().transpose();
            const auto [sf, op] = to_standard_form(CovarianceMatrix(v));
            CHECK(sf.n1 == doctest::Approx(ref.n1).epsilon(1e-9));
            CHECK(sf.n2 == doctest::Approx(ref.n2).epsilon(1e-9));
            CHECK(sf.m_plus == doctest::Approx(ref.m_plus).epsilon(1e-9));
            CHECK(sf.m_minus == doctest::Approx(ref.m_minus).epsilon(1e-9));
            // the returned operation maps v to the standard-form matrix
            const Eigen::Matrix4d mapped = op.matrix() * v * op.matrix().transpose();
            CHECK((mapped - sf.matrix()).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
    SUBCASE("non bona fide input") {
        Eigen::Matrix4d v = 0.3 * Eigen::Matrix4d::Identity();
        CHECK_THROWS_AS(to_standard_form(CovarianceMatrix(v)), DomainError);
    }
}

TEST_CASE("nu_minus anchors") {
    CHECK(nu_minus(StandardForm{}) == 1.0);  // vacuum, exact
    CHECK(nu_minus(make_tmsv(0.86)) ==
          doctest::Approx(0.17906614791149323).epsilon(1e-13));
    // thermalized TMSV at the separability threshold
    const double nbar = 2.292;
    StandardForm sf = make_tmsv(0.86);
    const double lam = 1.0 + 2.0 * nbar;
    sf.n1 *= lam;
    sf.n2 *= lam;
    sf.m_plus *= lam;
    sf.m_minus *= lam;
    CHECK(nu_minus(sf) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("is_entangled") {
    CHECK_FALSE(is_entangled(StandardForm{}));
    CHECK(is_entangled(make_tmsv(0.86)));
    StandardForm sf = make_tmsv(0.86);
    const double lam = 1.0 + 2.0 * 2.5;  // past the threshold 2.292
    sf.n1 *= lam;
    sf.n2 *= lam;
    sf.m_plus *= lam;
    sf.m_minus *= lam;
    CHECK_FALSE(is_entangled(sf));
}

TEST_CASE("dissipate") {
    const CovarianceMatrix v0(make_tmsv(0.86).matrix());
    SUBCASE("gamma_t = 0 is the identity") {
        CHECK((dissipate(v0, 0.3, 0.0).mat() - v0.mat()).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("large-time fixed point") {
        const CovarianceMatrix v = dissipate(v0, 0.25, 60.0);
        CHECK((v.mat() - 1.5 * Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("semigroup property") {
        std::mt19937_64 gen(3);
        std::uniform_real_distribution<double> t(0.0, 1.2);
        for (int trial = 0; trial < 20; ++trial) {
            const double t1 = t(gen), t2 = t(gen);
            const Eigen::Matrix4d a = dissipate(dissipate(v0, 0.2, t1), 0.2, t2).mat();
            const Eigen::Matrix4d b = dissipate(v0, 0.2, t1 + t2).mat();
            CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    SUBCASE("bona fide preservation") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const CovarianceMatrix v = random_resource(seed);
            CHECK(dissipate(v, 0.4, 0.7).bona_fide());
        }
    }
    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(dissipate(v0, -0.1, 0.5), ParameterError);
        CHECK_THROWS_AS(dissipate(v0, 0.1, -0.5), ParameterError);
    }
}

TEST_CASE("dissipation thresholds") {
    // closed form as printed; frozen against a 30-digit evaluation
    CHECK(dissipation_threshold(0.86, 0.1) ==
          doctest::Approx(0.52641657548328304).epsilon(1e-12));
    CHECK(dissipation_threshold(1e-9, 0.1) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(std::isinf(dissipation_threshold(0.86, 0.0)));

    // exact separability time: frozen value and bisection cross-check
    CHECK(separability_gamma_t(0.86, 0.1) ==
          doctest::Approx(1.63015566214125120).epsilon(1e-12));
    CHECK(std::isinf(separability_gamma_t(0.5, 0.0)));
    for (auto [zeta, big_n] : {std::pair{0.5, 0.2}, std::pair{1.0, 0.05}}) {
        const CovarianceMatrix v0(make_tmsv(zeta).matrix());
        auto nu_at = [&](double gt) {
            return nu_minus(to_standard_form(dissipate(v0, big_n, gt)).first);
        };
        // bisection oracle for the nu = 1 crossing
        double lo = 0.0, hi = 20.0;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (nu_at(mid) < 1.0 ? lo : hi) = mid;
        }
        const double t_star = separability_gamma_t(zeta, big_n);
        CHECK(t_star == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-8));
        CHECK(nu_at(t_star) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("thermal_threshold") {
    CHECK(thermal_threshold(0.86) == doctest::Approx(2.292).epsilon(5e-4));
    CHECK(thermal_threshold(0.0) == 0.0);
    CHECK(thermal_threshold(0.5) == doctest::Approx(0.85914091422952262).epsilon(1e-14));
}

TEST_CASE("symplectic eigenvalues") {
    CHECK(symplectic_eigenvalues(CovarianceMatrix()).first == doctest::Approx(1.0));
    const auto tm = symplectic_eigenvalues(CovarianceMatrix(make_tmsv(0.9).matrix()));
    CHECK(tm.first == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(tm.second == doctest::Approx(1.0).epsilon(1e-10));
    const auto th = symplectic_eigenvalues(CovarianceMatrix(3.0 * Eigen::Matrix4d::Identity()));
    CHECK(th.first == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(th.second == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("von Neumann entropy") {
    CHECK(von_neumann_entropy(CovarianceMatrix(make_tmsv(0.7).matrix())) ==
          doctest::Approx(0.0).epsilon(1e-9));
    // one thermal pair nu = (3, 1): f(3) = 2 ln 2
    Eigen::Matrix4d v = Eigen::Matrix4d::Identity();
    v(0, 0) = v(1, 1) = 3.0;
    CHECK(von_neumann_entropy(CovarianceMatrix(v)) ==
          doctest::Approx(1.38629436111989062).epsilon(1e-12));
    // additivity over modes: nbar = 1 on both
    CHECK(von_neumann_entropy(CovarianceMatrix(3.0 * Eigen::Matrix4d::Identity())) ==
          doctest::Approx(2.0 * 1.38629436111989062).epsilon(1e-12));
    // nonnegativity on random resources
    for (std::uint64_t seed = 20; seed < 30; ++seed)
        CHECK(von_neumann_entropy(random_resource(seed)) >= 0.0);
}

TEST_CASE("nu_minus invariance under local symplectics") {
    std::mt19937_64 gen(11);
    for (std::uint64_t seed = 40; seed < 45; ++seed) {
        const CovarianceMatrix v = random_resource(seed);
        const double ref = nu_minus(to_standard_form(v).first);
        for (int trial = 0; trial < 4; ++trial) {
            LocalSymplectic s{random_sp2(gen), random_sp2(gen)};
            const Eigen::Matrix4d w = s.matrix() * v.mat() * s.matrix().transpose();
            CHECK(nu_minus(to_standard_form(CovarianceMatrix(w)).first) ==
                  doctest::Approx(ref).epsilon(1e-9));
        }
    }
}

TEST_CASE("random_resource") {
    const CovarianceMatrix a = random_resource(42);
    const CovarianceMatrix b = random_resource(42);
    CHECK((a.mat() - b.mat()).cwiseAbs().maxCoeff() == 0.0);  // determinism
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const CovarianceMatrix v = random_resource(42 + seed);
        REQUIRE(v.bona_fide());
        REQUIRE(is_entangled(to_standard_form(v).first));
    }
}

TEST_CASE("JSON round trips") {
    const CovarianceMatrix v = random_resource(5);
    const CovarianceMatrix v2 = covariance_from_json(to_json(v));
    CHECK((v.mat() - v2.mat()).cwiseAbs().maxCoeff() == 0.0);
    const StandardForm sf = make_tmsv(0.4);
    const StandardForm sf2 = standard_form_from_json(to_json(sf));
    CHECK(sf == sf2);
}
