#include <random>
#include <sstream>

#include "doctest.h"
#include "mgres/lp/lp_format.hpp"
#include "mgres/lp/solver.hpp"
#include "vertex_oracle.hpp"

using namespace mgres::lp;

TEST_CASE("bound-binding row") {
    LinearProgram lp;
    auto x = lp.add_variable("x", 0, 10);
    lp.set_objective(x, 1.0);
    lp.add_row("lo", {{x, 1.0}}, Relation::GreaterEqual, 2.0);
    auto s = solve(lp);
    REQUIRE(s.optimal());
    CHECK(s.values[0] == doctest::Approx(2.0));
    CHECK(s.objective_value == doctest::Approx(2.0));
}

TEST_CASE("empty feasible set is infeasible") {
    LinearProgram lp;
    auto x = lp.add_variable("x", -kInf, kInf);
    lp.set_objective(x, 1.0);
    lp.add_row("a", {{x, 1.0}}, Relation::LessEqual, 0.0);
    lp.add_row("b", {{x, 1.0}}, Relation::GreaterEqual, 1.0);
    auto s = solve(lp);
    CHECK(s.status == SolveStatus::Infeasible);
    CHECK(s.certificate_rows.size() == 2);
}

TEST_CASE("infeasible coupled rows carry a certificate") {
    LinearProgram lp;
    auto x = lp.add_variable("x", 0, 5);
    auto y = lp.add_variable("y", 0, 5);
    lp.add_row("sum_hi", {{x, 1}, {y, 1}}, Relation::GreaterEqual, 8);
    lp.add_row("diff", {{x, 1}, {y, -1}}, Relation::Equal, 0);
    lp.add_row("cap", {{x, 1}, {y, 2}}, Relation::LessEqual, 9);
    auto s = solve(lp);
    CHECK(s.status == SolveStatus::Infeasible);
    CHECK_FALSE(s.certificate_rows.empty());
}

TEST_CASE("unbounded objective") {
    LinearProgram lp;
    auto x = lp.add_variable("x", 0, kInf);
    auto y = lp.add_variable("y", 0, 1);
    lp.set_objective(x, -1.0);
    lp.add_row("r", {{x, 1}, {y, -1}}, Relation::GreaterEqual, 0);
    CHECK(solve(lp).status == SolveStatus::Unbounded);
}

TEST_CASE("free variables and equality rows") {
    LinearProgram lp;
    auto x = lp.add_variable("x", -kInf, kInf);
    auto y = lp.add_variable("y", -kInf, kInf);
    lp.set_objective(x, 1.0);
    lp.set_objective(y, 1.0);
    lp.add_row("e", {{x, 1}, {y, -1}}, Relation::Equal, 3);
    lp.add_row("g", {{y, 1}, {x, 0.5}}, Relation::GreaterEqual, -6);
    auto s = solve(lp);
    REQUIRE(s.optimal());
    // y = x - 3, 1.5x - 3 >= -6 -> x >= -2, min 2x - 3 at x = -2
    CHECK(s.values[0] == doctest::Approx(-2.0));
    CHECK(s.values[1] == doctest::Approx(-5.0));
    CHECK(s.objective_value == doctest::Approx(-7.0));
}

TEST_CASE("malformed problems are rejected") {
    LinearProgram lp;
    lp.add_variable("x", 0, 1);
    lp.add_row("bad", {{3, 1.0}}, Relation::LessEqual, 1);
    CHECK_THROWS_AS(solve(lp), MalformedProblem);
    LinearProgram nan;
    auto x = nan.add_variable("x", 0, 1);
    nan.add_row("nan", {{x, std::nan("")}}, Relation::LessEqual, 1);
    CHECK_THROWS_AS(solve(nan), MalformedProblem);
    LinearProgram crossed;
    crossed.add_variable("x", 2, 1);
    CHECK_THROWS_AS(solve(crossed), MalformedProblem);
}

TEST_CASE("iteration limit is reported, never a silent optimum") {
    LinearProgram lp;
    std::vector<Term> terms;
    for (int j = 0; j < 6; ++j) {
        auto v = lp.add_variable("x" + std::to_string(j), 0, 1);
        lp.set_objective(v, -1.0 - j);
        terms.push_back({v, 1.0 + j});
    }
    lp.add_row("c", terms, Relation::LessEqual, 4);
    lp.add_row("d", {{0, 1}, {5, 1}}, Relation::GreaterEqual, 0.5);
    SolverOptions opt;
    opt.max_iterations = 0;
    CHECK_THROWS_AS(solve(lp, opt), IterationLimit);
}

TEST_CASE("check_feasibility residuals") {
    LinearProgram lp;
    auto x = lp.add_variable("x", 0, 10);
    lp.add_row("lo", {{x, 1.0}}, Relation::GreaterEqual, 2.0);
    std::vector<double> at{2.0};
    auto r = check_feasibility(lp, at);
    CHECK(r.max_residual == 0.0);
    CHECK(r.violated_rows.empty());
    std::vector<double> below{1.5};
    r = check_feasibility(lp, below);
    REQUIRE(r.violated_rows.size() == 1);
    CHECK(r.violated_rows[0].amount == doctest::Approx(0.5));
    std::vector<double> wrong{1.0, 2.0};
    CHECK_THROWS(check_feasibility(lp, wrong));
}

TEST_CASE("random small LPs agree with vertex enumeration") {
    std::mt19937_64 rng(20240611);
    int optimal = 0, infeasible = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng() % 5;
        const std::size_t m = 1 + rng() % 10;
        auto lp = oracle::random_lp(rng, n, m);
        auto ref = oracle::enumerate_vertices(lp);
        auto s = solve(lp);
        CAPTURE(trial);
        if (!ref.feasible) {
            CHECK(s.status == SolveStatus::Infeasible);
            ++infeasible;
            continue;
        }
        REQUIRE(s.optimal());
        CHECK(std::abs(s.objective_value - ref.objective) <= 1e-6);
        CHECK(check_feasibility(lp, s.values).feasible(1e-7));
        ++optimal;
    }
    CHECK(optimal > 100);
    CHECK(infeasible > 5);
}

TEST_CASE("solve is deterministic") {
    std::mt19937_64 rng(5);
    auto lp = oracle::random_lp(rng, 6, 10);
    auto a = solve(lp);
    auto b = solve(lp);
    CHECK(a.status == b.status);
    CHECK(a.values == b.values);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("no sampled feasible point beats the optimum") {
    std::mt19937_64 rng(77);
    int checked = 0;
    for (int trial = 0; trial < 20; ++trial) {
        auto lp = oracle::random_lp(rng, 4, 6);
        auto s = solve(lp);
        if (!s.optimal()) continue;
        std::uniform_real_distribution<double> u(0, 1);
        for (int k = 0; k < 1000; ++k) {
            std::vector<double> p(lp.num_variables());
            for (std::size_t j = 0; j < p.size(); ++j)
                p[j] = lp.variable(j).lower + u(rng) * (lp.variable(j).upper - lp.variable(j).lower);
            if (!check_feasibility(lp, p).feasible(0.0)) continue;
            CHECK(lp.evaluate_objective(p) >= s.objective_value - 1e-6);
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("degenerate LP with many ties terminates") {
    // Klee-Minty-like stacked degeneracy: many rows through the origin
    LinearProgram lp;
    const int n = 8;
    for (int j = 0; j < n; ++j) lp.set_objective(lp.add_variable("x" + std::to_string(j), 0, 10), -1.0);
    for (int i = 0; i < 30; ++i) {
        std::vector<Term> t;
        for (int j = 0; j < n; ++j) t.push_back({static_cast<std::size_t>(j), ((i * 7 + j * 3) % 5) - 2.0});
        lp.add_row("d" + std::to_string(i), t, Relation::LessEqual, 0.0);
    }
    auto s = solve(lp);
    REQUIRE(s.status != SolveStatus::Infeasible);
    if (s.optimal()) CHECK(check_feasibility(lp, s.values).feasible(1e-7));
}

TEST_CASE("lp format dump") {
    LinearProgram lp;
    auto x = lp.add_variable("P[dg 1,a]", 0, 2);
    auto y = lp.add_variable("3w", -kInf, kInf);
    lp.set_objective(x, 1.5);
    lp.add_row("bal", {{x, 1}, {y, -2}}, Relation::Equal, 0.5);
    std::ostringstream os;
    write_lp_format(lp, os);
    const auto s = os.str();
    CHECK(s.find("Minimize") != std::string::npos);
    CHECK(s.find("P_dg_1_a_") != std::string::npos);
    CHECK(s.find("_3w free") != std::string::npos);
    CHECK(s.find("bal: 1 P_dg_1_a_ - 2 _3w = 0.5") != std::string::npos);
    CHECK(s.find("End") != std::string::npos);
}
