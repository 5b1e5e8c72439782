#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "relq/harness.hpp"

using namespace relq;

namespace {

Instance triangle() { return Instance(4, 3, {{0, 1, 2}, {1, 2, 2}, {2, 0, 2}}); }

Report sample_report() {
    Report rep;
    rep.experiment = "sample";
    rep.seed = 7;
    rep.param("s", 100);
    rep.param("alpha", 0.5);
    rep.cells = {{"a", {{"mean", 0.1}, {"stderr", 1e-17}, {"reference", std::numeric_limits<double>::quiet_NaN()}}},
                 {"b", {{"mean", -3.25}, {"stderr", 0.0}, {"reference", 1.0 / 3.0}}}};
    rep.notes.push_back("note");
    return rep;
}

}  // namespace

TEST(RunningStats, MeanAndStandardError) {
    RunningStats st;
    for (double x : {1.0, 2.0, 3.0, 4.0}) st.add(x);
    EXPECT_EQ(st.count(), 4);
    EXPECT_DOUBLE_EQ(st.mean(), 2.5);
    EXPECT_NEAR(st.stderr_(), std::sqrt((5.0 / 3.0) / 4.0), 1e-15);
    RunningStats single;
    single.add(3.0);
    EXPECT_EQ(single.stderr_(), 0.0);
}

TEST(CompensatedSum, RecoversSmallTerms) {
    CompensatedSum s;
    s.add(1e16);
    for (int k = 0; k < 1000; ++k) s.add(1.0);
    s.add(-1e16);
    EXPECT_DOUBLE_EQ(s.value(), 1000.0);
}

TEST(ReportCsv, RoundTrip) {
    const Report rep = sample_report();
    std::ostringstream os;
    write_csv(os, rep);
    EXPECT_EQ(os.str(), "name,mean,stderr,reference\na,0.1,1e-17,nan\nb,-3.25,0,0.3333333333333333\n");
    std::istringstream is(os.str());
    const auto cells = read_csv(is);
    ASSERT_EQ(cells.size(), 2u);
    EXPECT_EQ(cells[1].name, "b");
    EXPECT_DOUBLE_EQ(cells[1].get("reference"), 1.0 / 3.0);
    EXPECT_TRUE(std::isnan(cells[0].get("reference")));
    EXPECT_DOUBLE_EQ(cells[0].get("stderr"), 1e-17);
    EXPECT_THROW(cells[0].get("missing"), Error);
}

TEST(ReportCsv, RejectsMalformed) {
    std::istringstream empty("");
    EXPECT_THROW(read_csv(empty), Error);
    std::istringstream header("label,mean\nx,1\n");
    EXPECT_THROW(read_csv(header), Error);
    std::istringstream width("name,mean\nx,1,2\n");
    EXPECT_THROW(read_csv(width), Error);
    std::istringstream number("name,mean\nx,abc\n");
    EXPECT_THROW(read_csv(number), Error);
}

TEST(ReportJson, StructureAndDeterminism) {
    const Report rep = sample_report();
    std::ostringstream a, b;
    write_json(a, rep);
    write_json(b, rep);
    EXPECT_EQ(a.str(), b.str());
    const auto j = nlohmann::json::parse(a.str());
    EXPECT_EQ(j["experiment"], "sample");
    EXPECT_EQ(j["parameters"]["alpha"], "0.5");
    EXPECT_TRUE(j["cells"][0]["reference"].is_null());
    EXPECT_DOUBLE_EQ(j["cells"][1]["reference"].get<double>(), 1.0 / 3.0);
    EXPECT_EQ(j["provenance"]["seed"], 7);
    EXPECT_EQ(j["provenance"]["version"], kVersion);
    EXPECT_EQ(j["provenance"]["generator"], "philox4x32-10");
    EXPECT_TRUE(j["passed"].get<bool>());
}

TEST(AlternatingRuns, HalfWalkOnly) {
    const std::vector<double> v{0, 2, -2, 2, 0, -2, 2, -2};
    EXPECT_EQ(alternating_barrier_runs(v, 1.0), 3);
    const std::vector<double> flat(8, 0.5);
    EXPECT_EQ(alternating_barrier_runs(flat, 1.0), 0);
    const std::vector<double> rep{1, 1, 1, -1, -1, 0};
    EXPECT_EQ(alternating_barrier_runs(rep, 1.0), 2);
}

TEST(McSignChange, ProbabilitiesPartitionAndRepeat) {
    const Report a = mc_sign_change(200, 3000, 4);
    const Report b = mc_sign_change(200, 3000, 4);
    std::ostringstream sa, sb;
    write_csv(sa, a);
    write_csv(sb, b);
    EXPECT_EQ(sa.str(), sb.str());
    const double total = a.cell("p_none").get("mean") + a.cell("p_one").get("mean") + a.cell("p_two_or_more").get("mean");
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_NEAR(a.cell("p_threshold_reached").get("reference"), prob_at_least_one(), 1e-15);
    EXPECT_LE(a.cell("p_three_or_more_barriers").get("mean"), a.cell("p_threshold_reached").get("mean"));
    EXPECT_THROW(mc_sign_change(50, 10, 1), Error);
    EXPECT_THROW(mc_sign_change(201, 10, 1), Error);
}

TEST(McCorrelation, ZeroAngleAndHalfTurn) {
    const Report rep = mc_correlation_gap({0.0, std::numbers::pi / 2}, 100000, 3);
    EXPECT_EQ(rep.cells[0].get("mean"), 0.0);
    EXPECT_EQ(rep.cells[0].get("stderr"), 0.0);
    const ReportCell& quarter = rep.cells[1];
    EXPECT_NEAR(quarter.get("reference"), 2.0 / std::sqrt(std::numbers::pi), 1e-15);
    EXPECT_NEAR(quarter.get("mean"), quarter.get("reference"), 4.0 * quarter.get("stderr"));
    EXPECT_THROW(mc_correlation_gap({4.0}, 10, 1), Error);
}

TEST(CorrelatedPair, FeasibleWithAnchorCosine) {
    for (double theta : {0.0, 0.4, std::numbers::pi / 2, 3.0}) {
        const SdpSolutionP pair = correlated_pair(16, theta);
        EXPECT_LE(feasibility_report(pair).max_residual(), 1e-12);
        EXPECT_NEAR(dot(pair.v(0, 0), pair.v(1, 0)), std::cos(theta), 1e-12);
    }
}

TEST(Conjecture, ZeroAngleGivesZeroDistance) {
    ConjectureConfig cfg;
    cfg.thetas = {0.0};
    cfg.s = 200;
    cfg.trials = 4000;
    cfg.seed = 6;
    const Report rep = conjecture_experiment(cfg);
    ASSERT_EQ(rep.cells.size(), 1u);
    EXPECT_EQ(rep.cells[0].get("mean"), 0.0);
    // identical walks: the conditioning event is exactly the one-crossing event
    const Report sc = mc_sign_change(200, 4000, 6);
    EXPECT_DOUBLE_EQ(rep.cells[0].get("conditioning_rate"), sc.cell("p_one").get("mean"));
}

TEST(Conjecture, FastPathMatchesFullRounding) {
    const int s = 16;
    const double theta = 0.7;
    const long long trials = 3000;
    ConjectureConfig cfg;
    cfg.thetas = {theta};
    cfg.s = s;
    cfg.trials = trials;
    cfg.seed = 12;
    const Report rep = conjecture_experiment(cfg);

    const SdpSolutionP pair = correlated_pair(s, theta);
    RunningStats distance, conditioned;
    for (long long t = 0; t < trials; ++t) {
        const RoundingOutcome out = round_solution(pair, 1.0, {12, static_cast<std::uint64_t>(t)});
        const bool both = out.placements[0].status == CrossingStatus::OneCrossing &&
                          out.placements[1].status == CrossingStatus::OneCrossing;
        conditioned.add(both);
        if (both)
            distance.add(static_cast<double>(circular_distance(out.placements[0].position, out.placements[1].position, s)) /
                         s);
    }
    EXPECT_EQ(rep.cells[0].get("count"), static_cast<double>(distance.count()));
    EXPECT_NEAR(rep.cells[0].get("mean"), distance.mean(), 1e-12);
    EXPECT_NEAR(rep.cells[0].get("conditioning_rate"), conditioned.mean(), 1e-12);
    EXPECT_NEAR(rep.cells[0].get("reference"), theta / (2.0 * std::numbers::pi), 1e-15);
}

TEST(Conjecture, RejectsBadInput) {
    ConjectureConfig cfg;
    cfg.thetas = {0.1};
    cfg.s = 7;
    EXPECT_THROW(conjecture_experiment(cfg), Error);
    cfg.s = 8;
    cfg.thetas = {-0.1};
    EXPECT_THROW(conjecture_experiment(cfg), Error);
}

TEST(EndToEnd, TriangleSandwich) {
    EndToEndConfig cfg;
    cfg.trials = 400;
    const Report rep = end_to_end_ratio(triangle(), cfg);
    EXPECT_TRUE(rep.passed);
    EXPECT_DOUBLE_EQ(rep.cell("optimum").get("mean"), 2.0);
    EXPECT_GE(rep.cell("relaxation_value").get("mean"), 2.0 - 1e-3);
    EXPECT_NEAR(rep.cell("relaxation_value").get("mean"), rep.cell("relaxation_value_converted").get("mean"), 1e-8);
    EXPECT_LE(rep.cell("rounded_value").get("mean"), 2.0);
    EXPECT_GE(rep.cell("rounded_value").get("mean"), 0.0);
    EXPECT_EQ(rep.cell("rounded_value").get("count"), 400.0);
}

TEST(EndToEnd, PlantedWithLift) {
    const GeneratedInstance g = generate_instance(3, 4, 3, 11, true);
    EndToEndConfig cfg;
    cfg.trials = 300;
    cfg.ell = 3;
    const Report rep = end_to_end_ratio(g.instance, cfg);
    EXPECT_TRUE(rep.passed);
    EXPECT_DOUBLE_EQ(rep.cell("optimum").get("mean"), 3.0);
    EXPECT_LE(rep.cell("rounded_value").get("mean"), 3.0);
    EXPECT_GT(rep.cell("one_crossing_rate").get("mean"), 0.5);
    cfg.ell = 0;
    EXPECT_THROW(end_to_end_ratio(g.instance, cfg), Error);
}

TEST(ReproduceConstants, PassesAndListsNotes) {
    const Report rep = reproduce_constants();
    EXPECT_TRUE(rep.passed);
    EXPECT_EQ(rep.cells.size(), constants_table().size());
    EXPECT_EQ(rep.cell("at_least_one_total").get("checked"), 1.0);
    EXPECT_EQ(rep.cell("three_barrier_naive_sum").get("checked"), 0.0);
    EXPECT_FALSE(rep.notes.empty());
}
