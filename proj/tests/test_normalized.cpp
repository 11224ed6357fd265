#include "degenlab/normalized.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "support/oracles.hpp"

using namespace degenlab;

namespace {

OptimizerParams make_params(double eta, double b1, double b2) {
    OptimizerParams p;
    p.eta = eta;
    p.beta1 = b1;
    p.beta2 = b2;
    return p;
}

// The normalized map in plain (omega, lambda, x) coordinates, for
// finite-difference probes.
std::array<double, 3> norm_map3(const std::array<double, 3>& y, const OptimizerParams& p, int k) {
    NormalizedState s;
    s.omega = y[0];
    s.lambda = y[1];
    s.log_abs_x = std::log(std::fabs(y[2]));
    s.sign_x = y[2] >= 0.0 ? 1 : -1;
    const NormStepResult r = step_normalized(s, p, k);
    return {r.state.omega, r.state.lambda, r.state.sign_x * std::exp(r.state.log_abs_x)};
}

}  // namespace

TEST_CASE("to_normalized: direct values and input validation") {
    OptimizerState s;
    s.x = 1.0;
    s.m = 1.0;
    s.v = 1.0;
    NormalizedState n = to_normalized(s, 4);
    CHECK(n.omega == doctest::Approx(1.0));
    CHECK(n.lambda == doctest::Approx(1.0));
    CHECK(n.log_abs_x == doctest::Approx(0.0));

    s.x = 0.5;
    s.m = 0.125;  // = g = x^3
    s.v = 0.125 * 0.125;
    n = to_normalized(s, 4);
    CHECK(n.omega == doctest::Approx(1.0));
    CHECK(n.lambda == doctest::Approx(2.0));

    s.x = 0.0;
    CHECK_THROWS_AS(to_normalized(s, 4), std::domain_error);
    s.x = 1.0;
    s.v = 0.0;
    CHECK_THROWS_AS(to_normalized(s, 4), std::domain_error);
}

TEST_CASE("normalized chart round-trips to 1e-12") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> xs(-2.0, 2.0);
    std::uniform_real_distribution<double> ms(-1.0, 1.0);
    std::uniform_real_distribution<double> vs(1e-6, 2.0);
    for (int k : {4, 6, 8}) {
        for (int i = 0; i < 500; ++i) {
            OptimizerState s;
            s.x = xs(rng);
            if (std::fabs(s.x) < 1e-3) continue;
            s.m = ms(rng);
            s.v = vs(rng);
            const OptimizerState back = from_normalized(to_normalized(s, k), k);
            CHECK(oracles::rel_err(back.x, s.x) < 1e-12);
            if (std::fabs(s.m) > 1e-12) CHECK(oracles::rel_err(back.m, s.m) < 1e-12);
            CHECK(oracles::rel_err(back.v, s.v) < 1e-12);
        }
    }
}

TEST_CASE("normalized dynamics reproduce the raw adam trajectory") {
    const PolynomialObjective obj(4);
    const OptimizerParams p = make_params(0.001, 0.9, 0.99);
    const Trajectory raw = run(OptimizerKind::Adam, p, obj, 1.0, V0Policy::zero(), 200);

    NormalizedState s = initial_normalized_state(p, obj, 1.0, V0Policy::zero());
    for (const auto& sample : raw.samples) {
        const NormalizedState expect = to_normalized(
            OptimizerState{sample.x, sample.m, sample.v, sample.t}, 4);
        CHECK(oracles::rel_err(s.omega, expect.omega) < 1e-8);
        CHECK(oracles::rel_err(s.lambda, expect.lambda) < 1e-8);
        CHECK(std::fabs(s.log_abs_x - expect.log_abs_x) < 1e-8 * std::max(1.0, std::fabs(expect.log_abs_x)));
        const NormStepResult r = step_normalized(s, p, 4);
        REQUIRE(r.status == NormStatus::Ok);
        s = r.state;
    }
}

TEST_CASE("equivalence oracle holds across random stable settings") {
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> b2s(0.3, 0.99);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_real_distribution<double> x0s(0.3, 1.5);
    for (int k : {4, 6}) {
        const PolynomialObjective obj(k);
        for (int trial = 0; trial < 20; ++trial) {
            const double b2 = b2s(rng);
            const double b1 = 0.9 * b2 * u01(rng);  // inside the stable region
            const double x0 = x0s(rng);
            const OptimizerParams p = make_params(0.001, b1, b2);
            const Trajectory raw = run(OptimizerKind::Adam, p, obj, x0, V0Policy::zero(), 100);
            NormalizedState s = initial_normalized_state(p, obj, x0, V0Policy::zero());
            for (const auto& sample : raw.samples) {
                const NormalizedState expect =
                    to_normalized(OptimizerState{sample.x, sample.m, sample.v, sample.t}, k);
                CHECK(oracles::rel_err(s.omega, expect.omega) < 1e-8);
                CHECK(oracles::rel_err(s.lambda, expect.lambda) < 1e-8);
                const NormStepResult r = step_normalized(s, p, k);
                REQUIRE(r.status == NormStatus::Ok);
                s = r.state;
            }
        }
    }
}

TEST_CASE("non-trivial fixed point: closed form, existence boundary, map residual") {
    // RMSProp closed form
    FixedPointReport fp = nontrivial_fixed_point(make_params(0.01, 0.0, 0.9), 4);
    REQUIRE(fp.kind == FixedPointKind::NonTrivial);
    CHECK(fp.omega_star == doctest::Approx(1.0));
    CHECK(fp.lambda_star == doctest::Approx((1.0 - std::pow(0.9, 0.25)) / 0.01).epsilon(1e-12));
    CHECK(fp.lambda_star == doctest::Approx(2.599625).epsilon(1e-4));

    // 0.9 > 0.5^{3/4} ~= 0.5946: no fixed point
    fp = nontrivial_fixed_point(make_params(0.001, 0.9, 0.5), 4);
    CHECK(fp.kind == FixedPointKind::Nonexistent);

    // k = 2 only has the trivial line
    fp = nontrivial_fixed_point(make_params(0.001, 0.9, 0.99), 2);
    CHECK(fp.kind == FixedPointKind::TrivialLine);

    // residual of the map at the fixed point, x^2 term flushed
    for (auto [b1, b2] : {std::pair{0.9, 0.93}, std::pair{0.0, 0.9}, std::pair{0.5, 0.8}}) {
        const OptimizerParams p = make_params(0.001, b1, b2);
        const FixedPointReport r = nontrivial_fixed_point(p, 4);
        REQUIRE(r.kind == FixedPointKind::NonTrivial);
        NormalizedState s;
        s.omega = r.omega_star;
        s.lambda = r.lambda_star;
        s.log_abs_x = -1e6;
        const NormStepResult n = step_normalized(s, p, 4);
        CHECK(oracles::rel_err(n.state.omega, r.omega_star) < 1e-12);
        CHECK(oracles::rel_err(n.state.lambda, r.lambda_star) < 1e-12);
    }
}

TEST_CASE("trivial fixed line (omega, lambda) = (1, 0) is invariant for any x") {
    for (double x : {2.0, -0.3, 1e-8}) {
        const OptimizerParams p = make_params(0.01, 0.7, 0.95);
        NormalizedState s;
        s.omega = 1.0;
        s.lambda = 0.0;
        s.log_abs_x = std::log(std::fabs(x));
        s.sign_x = x > 0 ? 1 : -1;
        const NormStepResult r = step_normalized(s, p, 4);
        CHECK(r.state.omega == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(r.state.lambda == 0.0);
        CHECK(r.state.log_abs_x == doctest::Approx(s.log_abs_x).epsilon(1e-15));
    }
}

TEST_CASE("fixed point agrees with long normalized iteration (independent route)") {
    const PolynomialObjective obj(4);
    const OptimizerParams p = make_params(0.01, 0.0, 0.9);
    NormalizedState s = initial_normalized_state(p, obj, 1.0, V0Policy::zero());
    for (int t = 0; t < 5000; ++t) {
        const NormStepResult r = step_normalized(s, p, 4);
        REQUIRE(r.status == NormStatus::Ok);
        s = r.state;
    }
    const FixedPointReport fp = nontrivial_fixed_point(p, 4);
    CHECK(oracles::rel_err(s.lambda, fp.lambda_star) < 1e-6);
    CHECK(oracles::rel_err(s.omega, fp.omega_star) < 1e-6);
}

TEST_CASE("jacobian determinant identity over random valid hyperparameters") {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> b2s(0.05, 0.99);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int k : {4, 6, 8}) {
        for (int i = 0; i < 1000; ++i) {
            const double b2 = b2s(rng);
            const double exist = std::pow(b2, (k - 1.0) / (2.0 * (k - 2)));
            const double b1 = 0.98 * exist * u01(rng);
            const OptimizerParams p = make_params(0.001, b1, b2);
            const Mat2 J = jacobian_at_fixed_point(p, k);
            const double want = b1 * std::pow(b2, -k / (2.0 * (k - 2)));
            if (want > 1e-12) CHECK(oracles::rel_err(J.det(), want) < 1e-9);
        }
    }
}

TEST_CASE("jacobian matches finite differences of the x->0 sub-map") {
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> b2s(0.1, 0.98);
    std::uniform_real_distribution<double> u01(0.05, 0.95);
    for (int k : {4, 6, 8}) {
        for (int i = 0; i < 60; ++i) {
            const double b2 = b2s(rng);
            const double exist = std::pow(b2, (k - 1.0) / (2.0 * (k - 2)));
            const double b1 = 0.9 * exist * u01(rng);
            const OptimizerParams p = make_params(0.001, b1, b2);
            const FixedPointReport fp = nontrivial_fixed_point(p, k);
            REQUIRE(fp.kind == FixedPointKind::NonTrivial);

            // sub-map with the x^2 term exactly zero
            auto submap = [&](double w, double l) {
                NormalizedState s;
                s.omega = w;
                s.lambda = l;
                s.log_abs_x = -1e9;
                const NormStepResult r = step_normalized(s, p, k);
                return std::pair{r.state.omega, r.state.lambda};
            };
            const double hw = 1e-6 * std::max(1.0, std::fabs(fp.omega_star));
            const double hl = 1e-6 * std::max(1.0, std::fabs(fp.lambda_star));
            const auto [w_pw, l_pw] = submap(fp.omega_star + hw, fp.lambda_star);
            const auto [w_mw, l_mw] = submap(fp.omega_star - hw, fp.lambda_star);
            const auto [w_pl, l_pl] = submap(fp.omega_star, fp.lambda_star + hl);
            const auto [w_ml, l_ml] = submap(fp.omega_star, fp.lambda_star - hl);
            Mat2 fd;
            fd.a11 = (w_pw - w_mw) / (2 * hw);
            fd.a12 = (w_pl - w_ml) / (2 * hl);
            fd.a21 = (l_pw - l_mw) / (2 * hw);
            fd.a22 = (l_pl - l_ml) / (2 * hl);

            const Mat2 J = jacobian_at_fixed_point(p, k);
            const double num = std::sqrt((fd.a11 - J.a11) * (fd.a11 - J.a11) + (fd.a12 - J.a12) * (fd.a12 - J.a12) +
                                         (fd.a21 - J.a21) * (fd.a21 - J.a21) + (fd.a22 - J.a22) * (fd.a22 - J.a22));
            const double den = std::sqrt(J.a11 * J.a11 + J.a12 * J.a12 + J.a21 * J.a21 + J.a22 * J.a22);
            CHECK(num <= 1e-5 * den);
        }
    }
    CHECK_THROWS_AS(jacobian_at_fixed_point(make_params(0.001, 0.9, 0.5), 4), std::domain_error);
}

TEST_CASE("rmsprop jacobian collapses to the 1-D map derivative") {
    for (int k : {4, 6, 8}) {
        for (double b2 : {0.2, 0.6, 0.9}) {
            const OptimizerParams p = make_params(0.01, 0.0, b2);
            const Mat2 J = jacobian_at_fixed_point(p, k);
            CHECK(J.a11 == doctest::Approx(0.0).epsilon(1e-14));
            CHECK(J.a12 == doctest::Approx(0.0).epsilon(1e-14));
            const double e = 1.0 / (2.0 * (k - 2));
            const double g_prime = 1.0 - (k - 2) * (std::pow(b2, -e) - 1.0);
            CHECK(J.spectral_radius() == doctest::Approx(std::fabs(g_prime)).epsilon(1e-12));
        }
    }
}

TEST_CASE("stability verdict: k = 4 exemplars") {
    // primary condition reduces to beta1 < beta2 at k = 4
    FixedPointReport r = stability_verdict(make_params(0.001, 0.9, 0.93), 4);
    CHECK(r.conditions.primary_bound == doctest::Approx(0.93).epsilon(1e-14));
    CHECK(r.stable);
    CHECK(!r.numeric_analytic_disagree);
    CHECK(r.x_eigenvalue == doctest::Approx(std::pow(0.93, 0.25)).epsilon(1e-14));
    CHECK(r.regime == RegimeLabel::RegimeI_Stable);

    r = stability_verdict(make_params(0.001, 0.9, 0.895), 4);
    CHECK(r.kind == FixedPointKind::NonTrivial);
    CHECK(!r.stable);
    CHECK(r.spectral_radius > 1.0);
    CHECK(r.regime == RegimeLabel::RegimeII_UnstableFP);

    r = stability_verdict(make_params(0.001, 0.9, 0.8), 4);
    CHECK(r.kind == FixedPointKind::Nonexistent);
    CHECK(r.regime == RegimeLabel::RegimeIII_NoFP);
}

TEST_CASE("theoretical regime classifier: exemplars, boundary band, lower-left corner") {
    CHECK(classify_regime_theoretical(make_params(0.001, 0.9, 0.91), 4) == RegimeLabel::RegimeI_Stable);
    CHECK(classify_regime_theoretical(make_params(0.001, 0.9, 0.8), 4) == RegimeLabel::RegimeIII_NoFP);
    CHECK(classify_regime_theoretical(make_params(0.001, 0.001, 0.001), 4) == RegimeLabel::LowerLeftException);
    // within delta of the k=4 primary boundary beta1 = beta2
    CHECK(classify_regime_theoretical(make_params(0.001, 0.930 + 5e-5, 0.93), 4) == RegimeLabel::BoundaryBand);
    CHECK(classify_regime_theoretical(make_params(0.001, 0.9, 0.99), 2) == RegimeLabel::RegimeIII_NoFP);
}

TEST_CASE("numeric spectral radius agrees with the analytic conditions on a grid") {
    int checked = 0;
    for (int i = 0; i < 100; ++i) {
        for (int j = 0; j < 100; ++j) {
            const double b1 = 0.01 + i * (0.98 / 100);
            const double b2 = 0.01 + j * (0.98 / 100);
            const OptimizerParams p = make_params(0.001, b1, b2);
            const FixedPointReport r = stability_verdict(p, 4);
            if (r.kind != FixedPointKind::NonTrivial) continue;
            const double margin = std::min(std::fabs(b1 - r.conditions.primary_bound),
                                           std::fabs(b1 - r.conditions.lower_bound));
            if (margin < 1e-6) continue;
            CHECK(!r.numeric_analytic_disagree);
            ++checked;
        }
    }
    CHECK(checked > 5000);
}

TEST_CASE("stability region expands monotonically with k") {
    for (int i = 0; i < 60; ++i) {
        for (int j = 0; j < 60; ++j) {
            const double b1 = 0.01 + i * (0.97 / 60);
            const double b2 = 0.01 + j * (0.97 / 60);
            const OptimizerParams p = make_params(0.001, b1, b2);
            const FixedPointReport r4 = stability_verdict(p, 4);
            if (r4.kind == FixedPointKind::NonTrivial && r4.stable) {
                const FixedPointReport r6 = stability_verdict(p, 6);
                const FixedPointReport r8 = stability_verdict(p, 8);
                CHECK((r6.kind == FixedPointKind::NonTrivial && r6.stable));
                CHECK((r8.kind == FixedPointKind::NonTrivial && r8.stable));
            }
        }
    }
}

TEST_CASE("trivial line is unstable: dominant eigenvalue 1/sqrt(beta2)") {
    for (double b2 : {0.5, 0.9}) {
        for (double c : {0.7, -1.3}) {
            const OptimizerParams p = make_params(0.01, 0.9, b2);
            const std::array<double, 3> base{1.0, 1e-9, c};
            const double h = 1e-7;
            std::vector<std::vector<double>> M(3, std::vector<double>(3));
            for (int col = 0; col < 3; ++col) {
                std::array<double, 3> up = base, dn = base;
                up[col] += h;
                dn[col] -= h;
                const auto fu = norm_map3(up, p, 4);
                const auto fd = norm_map3(dn, p, 4);
                for (int row = 0; row < 3; ++row) M[row][col] = (fu[row] - fd[row]) / (2 * h);
            }
            const double dom = oracles::dominant_eigenvalue(M);
            CHECK(oracles::rel_err(dom, 1.0 / std::sqrt(b2)) < 1e-5);
        }
    }
}

TEST_CASE("product identity eta*omega*lambda = 1 - beta2^{1/(2(k-2))} in (0, 2)") {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> b2s(0.05, 0.99);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int k : {4, 6}) {
        for (int i = 0; i < 300; ++i) {
            const double b2 = b2s(rng);
            const double b1 = 0.95 * u01(rng) * std::pow(b2, (k - 1.0) / (2.0 * (k - 2)));
            const OptimizerParams p = make_params(0.003, b1, b2);
            const FixedPointReport fp = nontrivial_fixed_point(p, k);
            REQUIRE(fp.kind == FixedPointKind::NonTrivial);
            const double product = p.eta * fp.omega_star * fp.lambda_star;
            CHECK(oracles::rel_err(product, fp.gamma_factor) < 1e-12);
            CHECK(product > 0.0);
            CHECK(product < 2.0);
            CHECK(fp.lambda_star >= 0.0);
            CHECK(fp.x_eigenvalue > 0.0);
            CHECK(fp.x_eigenvalue < 1.0);
        }
    }
}

TEST_CASE("normalized runner survives far below raw underflow") {
    const PolynomialObjective obj(4);
    const OptimizerParams p = make_params(0.001, 0.9, 0.93);
    const NormalizedState init = initial_normalized_state(p, obj, 1.0, V0Policy::zero());
    const NormalizedTrajectory traj = run_normalized(p, 4, init, 400000);
    CHECK(traj.termination == Termination::MaxSteps);
    // ln(loss) = k*log|x| - ln k far below the raw double range
    CHECK(traj.samples.back().log_abs_x * 4 < -3000.0 * std::log(10.0));
    const auto& a = traj.samples[traj.samples.size() - 2];
    const auto& b = traj.samples.back();
    CHECK(std::exp(b.log_abs_x - a.log_abs_x) == doctest::Approx(std::pow(0.93, 0.25)).epsilon(1e-6));
}
