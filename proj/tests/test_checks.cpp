#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>

#include "rhc/checks.hpp"
#include "rhc/riccati.hpp"

using namespace rhc;

TEST_CASE("the embedded verification suite passes end to end") {
    const std::vector<CheckResult> results = run_checks();
    REQUIRE(results.size() == 8);

    const std::set<std::string> expected_names = {
        "riccati-residual",     "riccati-decay-rate",
        "gradient-finite-differences", "integrator-one-step",
        "integrator-order",     "cubic-term-identity",
        "lq-rhc-exactness",     "closed-loop-decay"};
    std::set<std::string> seen;
    for (const CheckResult& r : results) {
        seen.insert(r.name);
        INFO(r.name, ": measured = ", r.measured, ", bound = ", r.bound, " (",
             r.detail, ")");
        CHECK(r.passed);
        CHECK(!r.detail.empty());
    }
    CHECK(seen == expected_names);
}

TEST_CASE("the suite is deterministic") {
    const std::vector<CheckResult> a = run_checks();
    const std::vector<CheckResult> b = run_checks();
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].name == b[i].name);
        CHECK(a[i].measured == b[i].measured);
        CHECK(a[i].bound == b[i].bound);
    }
}

TEST_CASE("a perturbed Riccati matrix fails exactly the residual check") {
    const RiccatiSolution ric = solve_are(benchmark_system());
    Mat bad = ric.Pi;
    bad(0, 1) += 1e-3;
    bad(1, 0) += 1e-3;

    CheckHooks hooks;
    hooks.pi_override = bad;
    const std::vector<CheckResult> results = run_checks(hooks);
    REQUIRE(results.size() == 8);
    for (const CheckResult& r : results) {
        if (r.name == "riccati-residual") {
            CHECK(!r.passed);
            CHECK(r.measured > r.bound);
        } else {
            INFO(r.name);
            CHECK(r.passed);
        }
    }
}
