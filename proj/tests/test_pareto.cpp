#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "dse/pareto.hpp"

using namespace dse;

namespace {

// Independent O(n^2) dominance filter; the oracle the implementation is
// checked against.
std::vector<ObjectivePoint> brute_force_front(const std::vector<ObjectivePoint>& pts) {
    std::vector<ObjectivePoint> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < pts.size() && !dominated; ++j)
            if (j != i && dominates(pts[j], pts[i])) dominated = true;
        if (!dominated) out.push_back(pts[i]);
    }
    return out;
}

std::vector<ObjectivePoint> sorted_copy(std::vector<ObjectivePoint> v) {
    std::sort(v.begin(), v.end(), [](const ObjectivePoint& a, const ObjectivePoint& b) {
        if (a.nav_time_s != b.nav_time_s) return a.nav_time_s < b.nav_time_s;
        if (a.hw_cost != b.hw_cost) return a.hw_cost < b.hw_cost;
        return a.source < b.source;
    });
    return v;
}

ObjectivePoint op(double nav, double cost, int tag = 0) {
    return ObjectivePoint{nav, cost, DesignPoint{tag, 1.0, 7}};
}

} // namespace

TEST_CASE("a single point is its own front") {
    std::vector<ObjectivePoint> pts{op(165.04, 32.4)};
    CHECK(pareto_front(pts) == pts);
}

TEST_CASE("pairwise dominance on the reference values") {
    std::vector<ObjectivePoint> pts{op(171.13, 34.5, 1), op(165.04, 32.4, 2)};
    auto front = pareto_front(pts);
    REQUIRE(front.size() == 1);
    CHECK(front[0].nav_time_s == doctest::Approx(165.04));
    CHECK(front[0].hw_cost == doctest::Approx(32.4));
}

TEST_CASE("duplicates in objective space are all retained") {
    std::vector<ObjectivePoint> pts{op(100, 10, 1), op(100, 10, 2), op(100, 12, 3)};
    auto front = pareto_front(pts);
    REQUIRE(front.size() == 2);
    CHECK(front[0].source.cores == 1);
    CHECK(front[1].source.cores == 2);
}

TEST_CASE("random instances match the brute-force oracle") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> size_dist(1, 400);
    std::uniform_real_distribution<double> value(1.0, 100.0);
    std::uniform_int_distribution<int> grid(1, 12);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<ObjectivePoint> pts;
        int n = size_dist(rng);
        bool gridded = trial % 3 == 0;  // coarse grids exercise ties
        for (int i = 0; i < n; ++i) {
            double nav = gridded ? grid(rng) : value(rng);
            double cost = gridded ? grid(rng) : value(rng);
            pts.push_back(op(nav, cost, i));
        }
        CHECK(sorted_copy(pareto_front(pts)) == sorted_copy(brute_force_front(pts)));
    }
}

TEST_CASE("idempotence and order-invariance") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> value(1.0, 50.0);
    std::vector<ObjectivePoint> pts;
    for (int i = 0; i < 200; ++i) pts.push_back(op(value(rng), value(rng), i));

    auto front = pareto_front(pts);
    CHECK(sorted_copy(pareto_front(front)) == sorted_copy(front));

    auto shuffled = pts;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(sorted_copy(pareto_front(shuffled)) == sorted_copy(front));
}

TEST_CASE("adding a point never resurrects a dominated one") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> value(1.0, 50.0);
    std::vector<ObjectivePoint> pts;
    for (int i = 0; i < 100; ++i) pts.push_back(op(value(rng), value(rng), i));
    auto base = pareto_front(pts);

    for (int trial = 0; trial < 20; ++trial) {
        auto extended = pts;
        extended.push_back(op(value(rng), value(rng), 1000 + trial));
        auto front = pareto_front(extended);
        // Every front member either was on the base front or is the new point.
        for (const auto& p : front) {
            bool was_base = std::find(base.begin(), base.end(), p) != base.end();
            CHECK((was_base || p.source.cores == 1000 + trial));
        }
    }
}

TEST_CASE("front_hits counts by source identity") {
    std::vector<ObjectivePoint> truth{op(100, 10, 1), op(90, 20, 2), op(80, 30, 3)};
    CHECK(front_hits(truth, truth) == 3);
    std::vector<ObjectivePoint> disjoint{op(100, 10, 7)};
    CHECK(front_hits(disjoint, truth) == 0);
    // Same source, different recorded objectives: still a hit.
    std::vector<ObjectivePoint> one{op(999, 999, 2)};
    CHECK(front_hits(one, truth) == 1);
    // Repeated finds of one source count once.
    std::vector<ObjectivePoint> repeated{op(90, 20, 2), op(90, 20, 2)};
    CHECK(front_hits(repeated, truth) == 1);
}

TEST_CASE("plot CSV shape and feasibility column") {
    Constraints c{400.0, 1.0};
    SUBCASE("empty input emits only the header") {
        auto csv = emit_plot_data({}, {}, {}, c);
        CHECK(csv ==
              "cores,freq_ghz,lidar_hz,nav_time_s,hw_cost,feasible,on_truth_front,found_by\n");
    }
    SUBCASE("rows carry feasibility and front membership") {
        std::vector<std::pair<DesignPoint, Metrics>> evals;
        Metrics fast{165.04, 0.002, 7.8, 32.4, true};
        Metrics slow{505.43, 0.003, 2.0, 9.0, true};
        evals.push_back({{18, 1.8, 7}, fast});
        evals.push_back({{6, 1.5, 7}, slow});
        std::vector<ObjectivePoint> front{{165.04, 32.4, {18, 1.8, 7}}};
        std::map<DesignPoint, std::string> found{{{18, 1.8, 7}, "guided"}};
        auto csv = emit_plot_data(evals, front, found, c);
        CHECK(csv.find("18,1.8,7,165.04,32.4,true,true,guided") != std::string::npos);
        CHECK(csv.find("6,1.5,7,505.43,9,false,false,") != std::string::npos);
    }
}
