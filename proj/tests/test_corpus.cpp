#include <cmath>

#include "apnum/corpus.hpp"
#include "apnum/errors.hpp"
#include "apnum/metrics.hpp"
#include "doctest.h"

using namespace apnum;

TEST_CASE("scenario registry") {
    CHECK_THROWS_AS(scenario("does_not_exist"), UnknownScenario);

    const auto ou = scenario("ou");
    REQUIRE(!ou.expected.empty());
    CHECK(ou.expected[0].name == "stationary_var");
    // stationaryVar = trQ sigma^2 / (2 delta) with sigma = 1, trQ = 1, delta = 1
    CHECK(ou.expected[0].expected == doctest::Approx(0.5));
    CHECK(ou.problem.trace_q() == 1.0);
    CHECK(ou.problem.min_decay() == 1.0);
    CHECK_NOTHROW(ou.problem.validate());

    const auto lev = scenario("affine_levitan");
    CHECK(lev.deterministic);
    CHECK(lev.delta == 1.0);
    CHECK(lev.expected[0].name == "max_abs_x");
    CHECK(lev.expected[0].expected == 2.0);

    const auto per = scenario("periodic_sde");
    CHECK_NOTHROW(per.problem.validate());
    // recorded contraction constant for K = 0.55, delta = 1, trQ = 1
    CHECK(per.expected[0].expected == doctest::Approx(theta_st(0.55, 1.0, 1.0)).epsilon(1e-12));
    // 2 pi and pi are exact grid multiples by construction
    CHECK(std::abs(2.0 * M_PI / per.config.window.dt - 640.0) < 1e-9);

    const auto pseudo = scenario("pseudo_ap");
    CHECK(pseudo.has_companion);
    CHECK_NOTHROW(pseudo.problem.validate());
    // the companion differs only in the ergodic drift term
    CHECK(eval(pseudo.problem.drift.offset[0], 0.0) ==
          doctest::Approx(eval(pseudo.companion.drift.offset[0], 0.0) + 0.2));
}

TEST_CASE("ou scenario at reduced size") {
    auto s = scenario("ou");
    s.config.ensemble_n = 3000;
    s.config.window = GridWindow(0.0, 12.0, 1e-2);
    // widen the MC tolerances to match the smaller ensemble
    for (auto& c : s.expected) c.tolerance *= std::sqrt(10000.0 / 3000.0);
    const auto run = run_scenario(s);
    for (const auto& c : run.checks) {
        INFO(c.check, " expected ", c.expected, " observed ", c.observed);
        CHECK(c.pass);
    }
    CHECK(run.all_pass());
}

TEST_CASE("spike train defect grows across windows") {
    // one window per n, truncated at that n: the defect is driven by the
    // tallest spike the window contains
    double prev = 0.0;
    for (int n = 3; n <= 5; ++n) {
        const GridWindow w(0.0, 4.0 * n, 1e-4);
        const auto f = sample(spike_train(n), w);
        const double d = mp_prime_defect(f, 1.0, 1e-3);
        CHECK(d > prev);
        prev = d;
    }
}

TEST_CASE("deterministic scenario runs end to end") {
    auto s = scenario("affine_levitan");
    s.config.window = GridWindow(-5.0, 5.0, 1e-3);  // trimmed for test speed
    const auto run = run_scenario(s);
    CHECK(run.path.node_count() == s.config.window.node_count());
    CHECK(run.all_pass());
}
