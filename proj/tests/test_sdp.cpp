#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "relq/constellation.hpp"
#include "relq/feasibility.hpp"
#include "relq/sdp.hpp"

using namespace relq;

namespace {

Instance triangle() { return Instance(4, 3, {{0, 1, 2}, {1, 2, 2}, {2, 0, 2}}); }

Assignment random_assignment(const Instance& inst, std::uint64_t seed) {
    CounterRng rng(seed, 31);
    Assignment asg;
    for (int i = 0; i < inst.n(); ++i) asg.positions.push_back(static_cast<int>(rng.uniform_below(inst.p())));
    return asg;
}

// Relabels every u index h -> h + a.
SdpSolutionPPlus relabel(const SdpSolutionPPlus& sol, int a) {
    SdpSolutionPPlus out(sol.p(), sol.n(), sol.dim());
    for (int i = 0; i < sol.n(); ++i)
        for (int h = 0; h < sol.p(); ++h) {
            const auto src = sol.u(i, mod(static_cast<long long>(h) + a, sol.p()));
            std::copy(src.begin(), src.end(), out.vec(i, h).begin());
        }
    return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k) worst = std::max(worst, std::abs(a.data()[k] - b.data()[k]));
    return worst;
}

}  // namespace

TEST(IntegralEmbedding, SingleVariableIsScaledPermutation) {
    const Instance inst(4, 1, {});
    const SdpSolutionPPlus sol = integral_embedding(inst, {{0}});
    EXPECT_EQ(sol.dim(), 4);
    for (int h = 0; h < 4; ++h)
        for (int c = 0; c < 4; ++c) EXPECT_DOUBLE_EQ(sol.u(0, h)[c], c == (4 - h) % 4 ? 0.5 : 0.0);
}

TEST(IntegralEmbedding, ObjectiveMatchesEvaluate) {
    const Instance one(8, 2, {{0, 1, 3}});
    EXPECT_NEAR(objective_p_plus(integral_embedding(one, {{2, 5}}), one), 1.0, 1e-12);
    const BruteForceResult best = brute_force_optimum(triangle());
    EXPECT_NEAR(objective_p_plus(integral_embedding(triangle(), best.assignment), triangle()), 2.0, 1e-12);
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const Instance inst = generate_instance(4, 2 * (1 + seed % 6), 8, seed, false).instance;
        const Assignment asg = random_assignment(inst, seed);
        const SdpSolutionPPlus emb = integral_embedding(inst, asg);
        EXPECT_NEAR(objective_p_plus(emb, inst), evaluate(inst, asg).total(), 1e-9);
        EXPECT_LE(feasibility_report(emb).max_residual(), 1e-12);
    }
}

TEST(ConvertToP, IntegralEmbeddingGivesUnitConstellations) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Instance inst = generate_instance(3, 8, 5, seed, false).instance;
        const Assignment asg = random_assignment(inst, seed);
        const SdpSolutionP v = convert_to_p(integral_embedding(inst, asg));
        for (int i = 0; i < v.n(); ++i) {
            for (int k = 0; k < v.p(); ++k) EXPECT_NEAR(dot(v.v(i, k), v.v(i, k)), 1.0, 1e-14);
            EXPECT_LE(gram_residual(constellation_of(v, i)), 1e-12);
        }
        EXPECT_LE(feasibility_report(v).max_residual(), 1e-12);
        EXPECT_NEAR(objective_p(v, inst), evaluate(inst, asg).total(), 1e-9);
    }
}

TEST(ConvertToP, CommutesWithRelabeling) {
    const Instance inst = generate_instance(3, 6, 4, 5, false).instance;
    const SdpSolutionPPlus u = integral_embedding(inst, random_assignment(inst, 5));
    for (int a : {1, 2, 5}) {
        const SdpSolutionP direct = convert_to_p(relabel(u, a));
        const SdpSolutionP base = convert_to_p(u);
        // relabeling u shifts every constellation label by a
        SdpSolutionP shifted(base.p(), base.n(), base.dim());
        for (int i = 0; i < base.n(); ++i)
            for (int k = 0; k < base.p(); ++k) {
                const auto src = base.v(i, mod(static_cast<long long>(k) + a, base.p()));
                std::copy(src.begin(), src.end(), shifted.vec(i, k).begin());
            }
        EXPECT_LE(max_abs_diff(direct.gram(), shifted.gram()), 1e-12);
    }
}

TEST(ConvertToP, RejectsInfeasibleInput) {
    SdpSolutionPPlus u = integral_embedding(triangle(), {{0, 1, 2}});
    u.vec(1, 2)[0] += 0.3;
    EXPECT_THROW(convert_to_p(u), Error);
}

TEST(ObjectiveP, SingleTermExtremes) {
    const Instance inst(4, 2, {{0, 1, 1}});
    SdpSolutionP sol = replicate_constellation(canonical_constellation(4), 2);
    // v_0^0 . v_1^1 = 0 for identical canonical constellations
    EXPECT_NEAR(objective_p(sol, inst), 0.5, 1e-12);
    const Instance same(4, 2, {{0, 1, 0}});
    EXPECT_NEAR(objective_p(sol, same), 1.0, 1e-12);
    const Instance opposite(4, 2, {{0, 1, 2}});
    EXPECT_NEAR(objective_p(sol, opposite), 0.0, 1e-12);
}

TEST(FeasibilityReport, PerturbationIsReported) {
    SdpSolutionP sol = replicate_constellation(canonical_constellation(8), 2);
    EXPECT_LE(feasibility_report(sol).max_residual(), 1e-12);
    sol.vec(1, 3)[0] += 0.1;
    const FeasibilityReport rep = feasibility_report(sol);
    EXPECT_GT(rep.residual("constellation"), 0.05);
    EXPECT_GT(rep.residual("unit"), 0.05);
    EXPECT_THROW(rep.residual("nonsense"), Error);

    SdpSolutionPPlus u = integral_embedding(triangle(), {{0, 1, 2}});
    u.vec(0, 1)[0] += 0.1;
    EXPECT_GT(feasibility_report(u).max_residual(), 0.01);
}

TEST(SolutionFile, RoundTripIsBitExact) {
    const Instance inst = generate_instance(3, 6, 4, 2, false).instance;
    const SdpSolutionPPlus u = solve_p_plus(inst).solution;
    std::ostringstream os;
    write_solution(os, u, SolutionKind::PPlus);
    std::istringstream is(os.str());
    const LoadedSolution back = read_solution(is);
    EXPECT_EQ(back.kind, SolutionKind::PPlus);
    EXPECT_EQ(back.vectors, static_cast<const VectorFamily&>(u));
}

TEST(SolutionFile, RejectsMalformed) {
    auto parse = [](const std::string& text) {
        std::istringstream is(text);
        return read_solution(is);
    };
    EXPECT_THROW(parse(""), Error);
    EXPECT_THROW(parse("relqsol 2\n2 1 1 p\n1\n-1\n"), Error);
    EXPECT_THROW(parse("relqsol 1\n2 1 1 q\n1\n-1\n"), Error);
    EXPECT_THROW(parse("relqsol 1\n2 1 1 p\n1\n"), Error);
    EXPECT_THROW(parse("relqsol 1\n2 1 1 p\n1 2\n-1\n"), Error);
    EXPECT_THROW(parse("relqsol 1\n2 1 1 p\n1\nabc\n"), Error);
    EXPECT_THROW(parse("relqsol 1\n2 1 1 p\n1\n-1\n5\n"), Error);
    EXPECT_NO_THROW(parse("relqsol 1\n2 1 1 p\n1\n-1\n"));
}

TEST(SolveP, PlantedInstanceReachesEquationCount) {
    const GeneratedInstance g = generate_instance(3, 4, 3, 11, true);
    const PPlusSolveResult res = solve_p_plus(g.instance);
    EXPECT_GE(res.report.objective, 3.0 - 1e-3);
    EXPECT_LE(res.report.max_residual(), 1e-6);
}

TEST(SolveP, AntipodalTriangleDominatesOptimum) {
    const PPlusSolveResult res = solve_p_plus(triangle());
    EXPECT_GE(res.report.objective, 2.0 - 1e-9);
    EXPECT_LE(res.report.max_residual(), 1e-6);
    EXPECT_TRUE(res.report.converged);
}

TEST(SolveP, DominatesBruteForceAndStaysFeasible) {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const int p = seed % 2 ? 4 : 6;
        const Instance inst = generate_instance(4, p, 7, seed, false).instance;
        const PPlusSolveResult res = solve_p_plus(inst);
        const double opt = brute_force_optimum(inst).value();
        EXPECT_GE(res.report.objective, opt - 1e-3) << "seed " << seed;
        EXPECT_LE(res.report.max_residual(), 1e-6) << "seed " << seed;
        EXPECT_NEAR(res.report.objective, objective_p_plus(res.solution, inst), 1e-12);

        const SdpSolutionP v = convert_to_p(res.solution);
        EXPECT_NEAR(objective_p(v, inst), res.report.objective, 1e-8);
        EXPECT_LE(feasibility_report(v).max_residual(), 1e-6);
        for (int i = 0; i < v.n(); ++i) {
            const auto steps = difference_vectors(constellation_of(v, i), 1e-6);
            for (std::size_t a = 0; a < steps.size(); ++a) {
                EXPECT_NEAR(dot(steps[a], steps[a]), 2.0 / p, 1e-6);
                for (std::size_t b = a + 1; b < steps.size(); ++b) EXPECT_NEAR(dot(steps[a], steps[b]), 0.0, 1e-9);
            }
        }
    }
}

TEST(SolveP, ObjectiveHistoryIsNondecreasing) {
    const Instance inst = generate_instance(5, 6, 10, 4, false).instance;
    const PPlusSolveResult res = solve_p_plus(inst);
    ASSERT_FALSE(res.objective_history.empty());
    for (std::size_t k = 1; k < res.objective_history.size(); ++k)
        EXPECT_GE(res.objective_history[k], res.objective_history[k - 1] - 1e-10);
    EXPECT_NEAR(res.objective_history.back(), res.report.objective, 1e-9);
}

TEST(SolveP, SeededStartReachesSameValue) {
    const Instance inst = generate_instance(4, 4, 6, 9, false).instance;
    SolverConfig cfg;
    const double a = solve_p_plus(inst, cfg).report.objective;
    cfg.seed = 77;
    const PPlusSolveResult b = solve_p_plus(inst, cfg);
    EXPECT_NEAR(a, b.report.objective, 1e-6);
    EXPECT_LE(b.report.max_residual(), 1e-6);
}

TEST(SolveP, IterationLimitIsFlaggedNotThrown) {
    const Instance inst = generate_instance(5, 8, 12, 6, false).instance;
    SolverConfig cfg;
    cfg.max_iterations = 3;
    const PPlusSolveResult res = solve_p_plus(inst, cfg);
    EXPECT_FALSE(res.report.converged);
    EXPECT_EQ(res.report.iterations, 3);
    EXPECT_LE(res.report.max_residual(), 1e-6);
}

TEST(SolveP, SizeGuard) {
    const Instance big(100, 11, {{0, 1, 2}});
    EXPECT_THROW(solve_p_plus(big), Error);
}
