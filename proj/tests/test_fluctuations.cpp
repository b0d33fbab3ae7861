#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <random>

#include "aqrm/fluctuations.hpp"

using namespace aqrm;

TEST_CASE("np_matrix: decoupled limit and closed-form eigenvalues") {
    auto L0 = np_matrix(0.0, 0.0, 0.5);
    CHECK(std::abs(L0(0, 0) - complexd(-0.5, -1.0)) < 1e-15);
    CHECK(std::abs(L0(1, 1) - complexd(-0.5, 1.0)) < 1e-15);
    CHECK(std::abs(L0(0, 1)) == 0.0);

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 2.5), uk(0.05, 2.0);
    for (int t = 0; t < 300; ++t) {
        const double gr = u(rng), gcr = u(rng), kb = uk(rng);
        if (gr <= 0) continue;
        Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(np_matrix(gr, gcr, kb));
        auto [lp, lm] = np_eigenvalues(gr, gcr / gr, kb);
        const auto ev = es.eigenvalues();
        const double d = std::min(std::abs(ev[0] - lp) + std::abs(ev[1] - lm),
                                  std::abs(ev[0] - lm) + std::abs(ev[1] - lp));
        CHECK(d < 1e-12);
    }
}

TEST_CASE("np_eigenvalues: limits and boundary zeros") {
    auto [lp, lm] = np_eigenvalues(0.0, 0.7, 0.5);
    CHECK(std::abs(lp - complexd(-0.5, 1.0)) < 1e-15);
    CHECK(std::abs(lm - complexd(-0.5, -1.0)) < 1e-15);

    // underdamped far below threshold: decay rate is kappa_bar
    auto [u1, u2] = np_eigenvalues(0.3, 1.0, 0.5);
    CHECK(u1.real() == Catch::Approx(-0.5).margin(1e-15));
    CHECK(std::abs(u1.imag()) > 0.1);

    // Re l+ = 0 exactly at the critical couplings
    auto gc = critical_couplings(0.5, 0.5);
    REQUIRE(gc);
    CHECK(std::abs(np_eigenvalues(gc->g_c_minus, 0.5, 0.5).first.real()) < 1e-12);
    CHECK(std::abs(np_eigenvalues(gc->g_c_plus, 0.5, 0.5).first.real()) < 1e-12);

    // symmetric limit: critical point sqrt(1+kb^2)/2
    for (double kb : {0.1, 0.5, 1.0, 2.0}) {
        const double gc1 = std::sqrt(1.0 + kb * kb) / 2.0;
        CHECK(std::abs(np_eigenvalues(gc1, 1.0, kb).first.real()) < 1e-12);
    }

    // unstable NP point agrees with the A_NP sign
    CHECK(np_eigenvalues(1.0, 0.5, 0.5).first.real() > 0.0);
    CHECK(np_stability_A(1.0, 0.5, 0.5) < 0.0);
}

TEST_CASE("np_excitation: closed form, moment solve, and vacuum limits") {
    CHECK(np_excitation(0.0, 0.7, 0.5) == 0.0);
    CHECK(np_excitation(0.9, 0.0, 0.5) == 0.0);  // open JC stays vacuum

    CHECK(np_excitation(0.3, 1.6279069767441862, 0.5) ==
          Catch::Approx(0.06980249587852266).margin(1e-14));
    CHECK(np_excitation(0.387, 1.6279069767441862, 0.5) ==
          Catch::Approx(0.5460134244668001).margin(1e-13));
    CHECK(np_excitation(0.5, 0.5, 0.5) ==
          Catch::Approx(0.047337278106508875).margin(1e-14));

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0), uk(0.1, 1.5);
    for (int t = 0; t < 300; ++t) {
        const double kb = uk(rng), gr = u(rng), gcr = u(rng);
        if (gr <= 0 || np_stability_A(std::max(gr, gcr),
                                      std::min(gr, gcr) / std::max(gr, gcr),
                                      kb) < 0.05)
            continue;
        const double closed = np_excitation(gr, gcr / gr, kb);
        const auto mom = np_second_moments(gr, gcr, kb);
        CHECK(std::abs(mom[0].imag()) < 1e-12);
        CHECK(std::abs(mom[0].real() - closed) < 1e-10);
    }
}

TEST_CASE("np_excitation denominator roots equal the critical couplings") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> uk(0.05, 2.0), uu(0.05, 0.95);
    for (int t = 0; t < 300; ++t) {
        const double kb = uk(rng);
        auto [emin, emax] = epsilon_bounds(kb);
        const double eps = emin + (emax - emin) * uu(rng);
        if (std::abs(eps - 1.0) < 1e-3) continue;
        auto gc = critical_couplings(eps, kb);
        REQUIRE(gc);
        // stable quadratic solve of the denominator in X = g^2
        const double a = std::pow(1.0 - eps * eps, 2);
        const double b = -2.0 * (1.0 + eps * eps);
        const double cc = 1.0 + kb * kb;
        const double q = -(b - std::sqrt(b * b - 4 * a * cc)) / 2.0;
        const double x_small = cc / q, x_large = q / a;
        CHECK(std::abs(std::sqrt(x_small) - gc->g_c_minus) /
                  std::max(1.0, gc->g_c_minus) <
              1e-10);
        CHECK(std::abs(std::sqrt(x_large) - gc->g_c_plus) /
                  std::max(1.0, gc->g_c_plus) <
              1e-10);
    }
}

TEST_CASE("sp_coefficients: frozen values at (1, 0.5, 0.5)") {
    auto c = sp_coefficients(1.0, 0.5, 0.5);
    CHECK(c.u_bar.real() == Catch::Approx(0.6884021936492745).margin(1e-13));
    CHECK(c.u_bar.imag() == Catch::Approx(0.03992080181449298).margin(1e-13));
    CHECK(c.v_bar.real() == Catch::Approx(0.19617080181449292).margin(1e-13));
    CHECK(c.v_bar.imag() == Catch::Approx(0.07984160362898596).margin(1e-13));
    CHECK(c.P == Catch::Approx(0.7012270409189577).margin(1e-13));
    CHECK(c.Q.real() == Catch::Approx(-0.07936964615813222).margin(1e-13));
    CHECK(c.Q.imag() == Catch::Approx(-0.0270620706445009).margin(1e-13));
    CHECK(c.xi * c.s_z * c.s_z == Catch::Approx(1.0).margin(1e-12));

    auto [lp, lm] = sp_eigenvalues(c, 0.5);
    CHECK(lp.real() == Catch::Approx(-0.5).margin(1e-13));
    CHECK(lp.imag() == Catch::Approx(0.6808757429374447).margin(1e-12));
    CHECK(sp_excitation(c, 0.5) ==
          Catch::Approx(0.019708456914227124).margin(1e-14));
}

TEST_CASE("sp_coefficients: general and simplified routes agree") {
    const double kb = 0.5;
    auto [emin, emax] = epsilon_bounds(kb);
    for (double eps : {emin + 0.02, 0.5, 0.95, 1.002, 1.7, 3.0, emax - 0.02}) {
        auto gc = critical_couplings(eps, kb);
        REQUIRE(gc);
        for (double f : {1.01, 1.6, 4.0}) {
            const double g = gc->g_c_minus * f;
            for (int sign : {+1, -1}) {
                auto a = sp_coefficients(g, eps, kb, sign);
                auto b = sp_coefficients_general(g, eps, kb, sign);
                CHECK(std::abs(a.u_bar - b.u_bar) < 1e-10);
                CHECK(std::abs(a.v_bar - b.v_bar) < 1e-10);
                CHECK(std::abs(a.w_bar - b.w_bar) < 1e-10);
                CHECK(std::abs(a.xi - b.xi) < 1e-10);
            }
        }
    }
}

TEST_CASE("sp spectrum is invariant under the broken-symmetry sign") {
    auto p = sp_coefficients(1.3, 0.7, 0.5, +1);
    auto m = sp_coefficients(1.3, 0.7, 0.5, -1);
    CHECK(p.P == Catch::Approx(m.P).margin(1e-14));
    CHECK(std::abs(p.Q) == Catch::Approx(std::abs(m.Q)).margin(1e-14));
    CHECK(p.w_bar == -m.w_bar);
}

TEST_CASE("sp eigenvalues: stability windows on the dashed line") {
    auto at = [&](double g) {
        const double gcr = 0.05 * (g - 0.5) + 0.5;
        return std::pair{np_eigenvalues(std::max(g, gcr),
                                        std::min(g, gcr) / std::max(g, gcr), 0.5)
                             .first,
                         sp_eigenvalues(sp_coefficients(g, gcr / g, 0.5), 0.5).first};
    };
    // just above g_c^- ~ 0.6137: SP stable, NP unstable
    {
        auto [lnp, lsp] = at(0.70);
        CHECK(lsp.real() < 0.0);
        CHECK(lnp.real() > 0.0);
    }
    // bistable window 1.51 < g < 2.55: both stable
    for (double g : {1.6, 2.0, 2.4}) {
        auto [lnp, lsp] = at(g);
        CHECK(lnp.real() < 0.0);
        CHECK(lsp.real() < 0.0);
    }
    // Re l_sp+ -> 0 from below approaching g_c^- from above
    double prev = -1e9;
    for (double d : {1e-2, 1e-3, 1e-4, 1e-5}) {
        auto [lnp, lsp] = at(0.6136688727369898 + d);
        (void)lnp;
        CHECK(lsp.real() < 0.0);
        CHECK(lsp.real() > prev);
        prev = lsp.real();
    }
    CHECK(prev > -1e-4);
}

TEST_CASE("sp excitation diverges at both boundaries of the dashed line") {
    auto n_sp = [&](double g) {
        const double gcr = 0.05 * (g - 0.5) + 0.5;
        return sp_excitation(sp_coefficients(g, gcr / g, 0.5), 0.5);
    };
    CHECK(n_sp(0.6136688727369898 + 1e-3) > n_sp(0.6136688727369898 + 1e-2));
    CHECK(n_sp(0.6136688727369898 + 1e-4) > n_sp(0.6136688727369898 + 1e-3));
    CHECK(n_sp(2.5528304568180546 - 1e-3) > n_sp(2.5528304568180546 - 1e-2));
    CHECK(n_sp(2.5528304568180546 - 1e-4) > n_sp(2.5528304568180546 - 1e-3));
}

TEST_CASE("eigenvalue-denominator identity in both phases") {
    // den = ADR (2 kb - ADR) in the overdamped regime links the excitation
    // denominator zeros to the vanishing ADR
    const double kb = 0.5;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> uu(0.05, 0.95);
    auto [emin, emax] = epsilon_bounds(kb);
    for (int t = 0; t < 100; ++t) {
        const double eps = emin + (emax - emin) * uu(rng);
        if (std::abs(eps - 1.0) < 1e-3) continue;
        auto gc = critical_couplings(eps, kb);
        REQUIRE(gc);
        const double g = gc->g_c_minus * (1.0 + 1e-5);
        const double a_np = np_stability_A(g, eps, kb);
        const double adr_np = -np_eigenvalues(g, eps, kb).first.real();
        CHECK(std::abs(a_np - adr_np * (2 * kb - adr_np)) < 1e-10);
        auto c = sp_coefficients(g, eps, kb);
        const double den = c.P * c.P - 4.0 * std::norm(c.Q) + kb * kb;
        const double adr_sp = -sp_eigenvalues(c, kb).first.real();
        CHECK(std::abs(den - adr_sp * (2 * kb - adr_sp)) < 1e-10);
    }
}

TEST_CASE("sp excitation: closed form equals the second-moment route") {
    const double kb = 0.5;
    auto [emin, emax] = epsilon_bounds(kb);
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> uu(0.05, 0.95), uf(1.01, 6.0);
    for (int t = 0; t < 200; ++t) {
        const double eps = emin + (emax - emin) * uu(rng);
        if (std::abs(eps - 1.0) < 1e-5) continue;
        auto gc = critical_couplings(eps, kb);
        REQUIRE(gc);
        const double g = gc->g_c_minus * uf(rng);
        auto c = sp_coefficients(g, eps, kb);
        double closed;
        try {
            closed = sp_excitation(c, kb);
        } catch (const BoundaryDivergence&) {
            continue;
        }
        const auto mom = sp_second_moments(c, kb);
        CHECK(std::abs(mom[0].imag()) < 1e-10);
        CHECK(std::abs(mom[0].real() - closed) < 1e-10 * std::max(1.0, closed));
    }
    // the general quadratic system reproduces the published NP matrix route
    const auto a = quadratic_second_moments(1.0 - 0.25 - 0.49, -0.5 * 0.7, kb);
    const auto b = np_second_moments(0.5, 0.7, kb);
    CHECK(std::abs(a[0] - b[0]) < 1e-13);
    CHECK(std::abs(a[1] - b[1]) < 1e-13);
}

TEST_CASE("adr: underdamped plateau, boundary zero, tangent touch") {
    CHECK(adr(0.2, 0.21, 0.5, Phase::np) == Catch::Approx(0.5).margin(1e-14));
    auto gc = critical_couplings(0.5, 0.5);
    REQUIRE(gc);
    CHECK(adr(gc->g_c_minus, 0.5 * gc->g_c_minus, 0.5, Phase::np) <
          1e-12);
    // along the tangent line g_cr = eps_min g_r the ADR touches zero without
    // Re l+ changing sign
    auto [emin, emax] = epsilon_bounds(0.5);
    (void)emax;
    const double gt = std::sqrt(1.0 + emin * emin) / (1.0 - emin * emin);
    double min_adr = 1e300;
    for (int i = 0; i <= 400; ++i) {
        const double g = gt - 0.2 + 0.4 * i / 400;
        const double a = adr(g, emin * g, 0.5, Phase::np);
        CHECK(a > -1e-12);
        min_adr = std::min(min_adr, a);
    }
    CHECK(min_adr < 1e-6);
}

TEST_CASE("fit_exponent recovers synthetic power laws") {
    std::vector<std::pair<double, double>> s;
    const double gc = 1.3;
    for (int i = 0; i < 16; ++i) {
        const double d = 1e-4 * std::pow(100.0, i / 15.0);
        s.push_back({gc + d, 3.7 * std::pow(d, 1.5)});
    }
    auto f = fit_exponent(s, gc, false);
    CHECK(f.nu == Catch::Approx(1.5).margin(1e-10));
    CHECK(f.r_squared == Catch::Approx(1.0).margin(1e-12));

    for (auto& [g, v] : s) v = 0.2 / std::pow(std::abs(g - gc), 0.5);
    auto fd = fit_exponent(s, gc, true);
    CHECK(fd.nu == Catch::Approx(0.5).margin(1e-10));

    std::vector<std::pair<double, double>> few(s.begin(), s.begin() + 5);
    CHECK_THROWS_AS(fit_exponent(few, gc, false), FitDegenerate);

    std::vector<std::pair<double, double>> narrow;
    for (int i = 0; i < 10; ++i)
        narrow.push_back({gc + 1e-4 + i * 1e-6, 1.0});
    CHECK_THROWS_AS(fit_exponent(narrow, gc, false), FitDegenerate);
}

TEST_CASE("nu_ADR equals nu_x at the second-order boundary") {
    // same window, both quantities, NP side of g_c^-
    const double kb = 0.5;
    const double eps = 0.6;
    auto gc = critical_couplings(eps, kb);
    REQUIRE(gc);
    std::vector<std::pair<double, double>> sa, sx;
    for (int i = 0; i < 16; ++i) {
        const double d = 1e-4 * std::pow(100.0, i / 15.0);
        const double g = gc->g_c_minus - d;
        sa.push_back({g, adr(g, eps * g, kb, Phase::np)});
        sx.push_back({g, np_excitation(g, eps, kb)});
    }
    auto fa = fit_exponent(sa, gc->g_c_minus, false);
    auto fx = fit_exponent(sx, gc->g_c_minus, true);
    CHECK(fa.nu == Catch::Approx(1.0).margin(0.05));
    CHECK(fx.nu == Catch::Approx(1.0).margin(0.05));
    CHECK(std::abs(fa.nu - fx.nu) < 0.05);
}

TEST_CASE("E_sp pieces are reported") {
    auto c = sp_coefficients(1.0, 0.5, 0.5);
    // extensive piece |alpha|^2 - 1/(2|s_z|) and the O(1) piece -|s_z||v|^2
    auto sol = sp_solution(1.0, 0.5, 0.5, +1);
    REQUIRE(sol);
    CHECK(c.e_sp_eta_coeff ==
          Catch::Approx(std::norm(sol->alpha_bar) - 1.0 / (2 * std::abs(sol->s_z)))
              .margin(1e-13));
    CHECK(c.e_sp_const ==
          Catch::Approx(-std::abs(sol->s_z) * std::norm(c.v_bar)).margin(1e-13));
    CHECK(c.ground_energy(100.0) ==
          Catch::Approx(100.0 * c.e_sp_eta_coeff + c.e_sp_const).margin(1e-12));
}
