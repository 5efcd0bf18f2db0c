#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>

#include "dse/vehicle_model.hpp"
#include "test_util.hpp"

using namespace dse;

namespace {

const VehicleModel& model() {
    static VehicleModel m(test::calibration());
    return m;
}

Metrics evaluate(const DesignPoint& p, std::uint64_t seed = 1) {
    auto sim = model().simulate(p, test::robotaxi_scenario(), seed);
    return analyze_output(sim, p, test::robotaxi_scenario()).metrics;
}

} // namespace

TEST_CASE("amdahl speedup base case and asymptote") {
    CHECK(amdahl_speedup(1, 0.9) == doctest::Approx(1.0));
    CHECK(amdahl_speedup(1000000000, 0.9) == doctest::Approx(10.0).epsilon(1e-6));
    CHECK(amdahl_speedup(1000000000, 0.5) == doctest::Approx(2.0).epsilon(1e-6));

    // With one core the processing time is exactly workload / frequency.
    const auto& cal = test::calibration();
    auto rates = stage_rates({1, 1.5, 7}, cal);
    for (int i = 0; i < kStageCount; ++i)
        CHECK(rates[static_cast<std::size_t>(i)].processing_time_s ==
              doctest::Approx(cal.stages[static_cast<std::size_t>(i)].workload_gcycles / 1.5)
                  .epsilon(1e-12));
}

TEST_CASE("stage cascade is monotone non-increasing and lidar-capped") {
    const auto& cal = test::calibration();
    auto rates = stage_rates({10, 1.5, 7}, cal);
    CHECK(rates[0].output_rate_hz <= 7.0);
    for (int i = 1; i < kStageCount; ++i)
        CHECK(rates[static_cast<std::size_t>(i)].output_rate_hz <=
              rates[static_cast<std::size_t>(i - 1)].output_rate_hz);
}

TEST_CASE("calibrated anchor: (18, 1.8, 7) lands between 6 and 9 Hz") {
    auto rates = stage_rates({18, 1.8, 7}, test::calibration());
    double final_rate = rates[kStageCount - 1].output_rate_hz;
    CHECK(final_rate >= 6.0);
    CHECK(final_rate <= 9.0);

    // The effective (capacity-throttled) rate stays in the band too.
    auto er = effective_rates({18, 1.8, 7}, test::calibration());
    CHECK(er.ctrl_rate_hz >= 6.0);
    CHECK(er.ctrl_rate_hz <= 9.0);
}

TEST_CASE("calibrated anchor: (4, 1.2, 14) is starved") {
    auto metrics = evaluate({4, 1.2, 14});
    CHECK(metrics.ctrl_rate_hz < 1.0);
    CHECK(metrics.nav_time_s > 400.0);
}

TEST_CASE("simulation is deterministic for a fixed seed") {
    const DesignPoint p{12, 1.5, 14};
    auto a = model().simulate(p, test::robotaxi_scenario(), 42);
    auto b = model().simulate(p, test::robotaxi_scenario(), 42);
    CHECK(a.trace == b.trace);
    CHECK(a.actual_trajectory == b.actual_trajectory);
    CHECK(a.completed == b.completed);
    CHECK(a.wall_time_s == b.wall_time_s);
}

TEST_CASE("the seed moves jitter and dither but not rates or completion") {
    const DesignPoint p{12, 1.5, 14};
    auto m1 = evaluate(p, 1);
    auto m2 = evaluate(p, 2);
    CHECK(m1.ctrl_rate_hz == m2.ctrl_rate_hz);
    CHECK(m1.nav_time_s == m2.nav_time_s);
    CHECK(m1.goal_reached == m2.goal_reached);
    // The trajectories differ in phase.
    auto s1 = model().simulate(p, test::robotaxi_scenario(), 1);
    auto s2 = model().simulate(p, test::robotaxi_scenario(), 2);
    CHECK(s1.actual_trajectory != s2.actual_trajectory);
}

TEST_CASE("more compute never hurts: top corner vs the mid anchor") {
    auto low = evaluate({18, 1.8, 7});
    auto high = evaluate({28, 2.1, 7});
    CHECK(high.ctrl_rate_hz >= low.ctrl_rate_hz);
    CHECK(high.nav_time_s <= low.nav_time_s);
}

TEST_CASE("control rate never exceeds the LiDAR rate") {
    for (const auto& p : {DesignPoint{28, 2.1, 7}, DesignPoint{28, 2.1, 14},
                          DesignPoint{1, 1.0, 7}, DesignPoint{14, 1.5, 14}}) {
        auto er = effective_rates(p, test::calibration());
        CHECK(er.ctrl_rate_hz <= p.lidar_hz + 1e-12);
    }
}

TEST_CASE("emitted publish rates track the model rates within 2%") {
    for (const auto& p : {DesignPoint{18, 1.8, 7}, DesignPoint{5, 1.2, 14}}) {
        auto sim = model().simulate(p, test::robotaxi_scenario(), 9);
        auto er = effective_rates(p, test::calibration());
        auto rates = topic_publish_rates(sim.trace);
        const auto& topics = stage_topics();
        for (int i = 0; i < kStageCount; ++i) {
            double expected = er.topic_rates_hz[static_cast<std::size_t>(i)];
            double measured = rates.at(topics[static_cast<std::size_t>(i)]);
            CHECK(std::abs(measured - expected) / expected < 0.02);
        }
    }
}

TEST_CASE("extracted control rate equals the model's final-stage rate") {
    const DesignPoint p{18, 1.8, 7};
    auto sim = model().simulate(p, test::robotaxi_scenario(), 9);
    auto er = effective_rates(p, test::calibration());
    double measured = extract_ctrl_rate(sim.trace);
    CHECK(std::abs(measured - er.ctrl_rate_hz) / er.ctrl_rate_hz < 0.02);
}

TEST_CASE("trace invariants: order and nav events") {
    const DesignPoint p{18, 1.8, 7};
    auto sim = model().simulate(p, test::robotaxi_scenario(), 5);
    REQUIRE(sim.completed);
    int nav_starts = 0, nav_goals = 0;
    std::int64_t last_t = -1;
    for (const auto& e : sim.trace) {
        CHECK(e.t_ns >= last_t);
        last_t = e.t_ns;
        if (e.kind == EventKind::nav_start) ++nav_starts;
        if (e.kind == EventKind::nav_goal_reached) ++nav_goals;
    }
    CHECK(nav_starts == 1);
    CHECK(nav_goals == 1);
}

TEST_CASE("trajectory endpoints: exact start, goal within tolerance") {
    const auto& scenario = test::robotaxi_scenario();
    SUBCASE("completed run") {
        const DesignPoint p{18, 1.8, 7};
        auto sim = model().simulate(p, scenario, 3);
        REQUIRE(sim.completed);
        CHECK(sim.actual_trajectory.points.front() == scenario.start);
        CHECK(distance(sim.actual_trajectory.points.back(), scenario.goal) <= 2.0);
    }
    SUBCASE("timeout run ends short of the goal") {
        const DesignPoint p{2, 1.0, 7};
        auto sim = model().simulate(p, scenario, 3);
        REQUIRE_FALSE(sim.completed);
        CHECK(sim.actual_trajectory.points.front() == scenario.start);
        CHECK(distance(sim.actual_trajectory.points.back(), scenario.goal) > 2.0);
    }
}

TEST_CASE("ground truth covers the space in enumeration order") {
    auto space = DesignSpace::default_space();
    auto truth = ground_truth(model(), space, test::robotaxi_scenario(), 1);
    REQUIRE(truth.size() == 280);
    auto points = enumerate(space);
    for (std::size_t i = 0; i < truth.size(); ++i) CHECK(truth[i].first == points[i]);
}

TEST_CASE("parallel and serial ground truth agree exactly") {
    DesignSpace space{{2, 6, 12, 20}, {1.0, 1.8}, {7, 14}};
    auto a = ground_truth(model(), space, test::robotaxi_scenario(), 7);
    auto b = ground_truth_serial(model(), space, test::robotaxi_scenario(), 7);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].first == b[i].first);
        CHECK(a[i].second == b[i].second);
    }
}

TEST_CASE("a one-point space reduces to a direct evaluation") {
    DesignSpace space{{18}, {1.8}, {7}};
    auto truth = ground_truth(model(), space, test::robotaxi_scenario(), 1);
    REQUIRE(truth.size() == 1);
    CHECK(truth[0].second == evaluate({18, 1.8, 7}, 1));
}

TEST_CASE("control rate is non-decreasing along the cores axis") {
    auto space = DesignSpace::default_space();
    auto truth = ground_truth(model(), space, test::robotaxi_scenario(), 1);
    std::map<std::pair<double, int>, std::vector<std::pair<int, double>>> by_axis;
    for (const auto& [p, m] : truth)
        by_axis[{p.core_frequency_ghz, p.lidar_hz}].push_back({p.cores, m.ctrl_rate_hz});
    for (auto& [key, rows] : by_axis) {
        std::sort(rows.begin(), rows.end());
        for (std::size_t i = 1; i < rows.size(); ++i)
            CHECK(rows[i].second >= rows[i - 1].second - 1e-9);
    }
}
