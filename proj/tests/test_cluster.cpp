#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "doctest.h"
#include "zenopt/cluster.hpp"
#include "zenopt/stats.hpp"
#include "zenopt/synth.hpp"

using namespace zenopt;

namespace {

std::vector<Building> one_building() {
    Building b;
    b.id = "B1";
    return {b};
}

// A synthetic year whose days repeat a fixed set of archetypes.
ScenarioYear archetype_year(const std::vector<double>& day_temp_levels) {
    ScenarioYear s;
    s.year = 2016;
    s.spot.assign(kHoursPerYear, 0.04);
    s.co2_el.assign(kHoursPerYear, 20.0);
    s.temperature.resize(kHoursPerYear);
    s.irradiance.assign(kHoursPerYear, 0.0);
    s.loads.resize(1);
    s.loads[0].electric.assign(kHoursPerYear, 1.0);
    s.loads[0].space_heat.assign(kHoursPerYear, 2.0);
    s.loads[0].dhw.assign(kHoursPerYear, 0.5);
    for (int t = 0; t < kHoursPerYear; ++t) {
        int d = t / 24;
        double level = day_temp_levels[d % day_temp_levels.size()];
        s.temperature[t] = level + 0.5 * std::sin(2.0 * M_PI * (t % 24) / 24.0);
    }
    return s;
}

}  // namespace

TEST_CASE("degenerate clustering: identical days, k=1") {
    ScenarioYear s = archetype_year({5.0});
    auto cs = cluster_days(s, one_building(), 1, 42);
    REQUIRE(cs.k == 1);
    CHECK(cs.sigma == std::vector<int>{365});
    int role = cs.role_index("temperature");
    REQUIRE(role >= 0);
    for (int h = 0; h < 24; ++h)
        CHECK(cs.value(role, 0, h) == doctest::Approx(s.temperature[h]).epsilon(1e-12));
}

TEST_CASE("two alternating archetypes separate exactly") {
    ScenarioYear s = archetype_year({-5.0, 15.0});
    auto cs = cluster_days(s, one_building(), 2, 7);
    REQUIRE(cs.k == 2);
    // every even day in one cluster, every odd day in the other
    int c0 = cs.day_assignment[0];
    int c1 = cs.day_assignment[1];
    CHECK(c0 != c1);
    for (int d = 0; d < 365; ++d) CHECK(cs.day_assignment[d] == (d % 2 ? c1 : c0));
    CHECK(cs.sigma[c0] == 183);
    CHECK(cs.sigma[c1] == 182);
}

TEST_CASE("kmeans matches brute-force optimal 2-partition") {
    // 8 points in 2D; enumerate all 2^8 assignments for the optimal WCSS.
    std::vector<std::vector<double>> pts = {{0.0, 0.1}, {0.2, -0.1}, {0.1, 0.0}, {-0.1, 0.2},
                                            {5.0, 5.1}, {5.2, 4.9}, {4.9, 5.0}, {5.1, 5.2}};
    double best = 1e18;
    for (int mask = 1; mask < 255; ++mask) {
        std::vector<std::vector<double>> sum(2, std::vector<double>(2, 0.0));
        int cnt[2] = {0, 0};
        for (int i = 0; i < 8; ++i) {
            int c = (mask >> i) & 1;
            ++cnt[c];
            sum[c][0] += pts[i][0];
            sum[c][1] += pts[i][1];
        }
        if (!cnt[0] || !cnt[1]) continue;
        double w = 0.0;
        for (int i = 0; i < 8; ++i) {
            int c = (mask >> i) & 1;
            double dx = pts[i][0] - sum[c][0] / cnt[c];
            double dy = pts[i][1] - sum[c][1] / cnt[c];
            w += dx * dx + dy * dy;
        }
        best = std::min(best, w);
    }
    auto km = kmeans(pts, 2, 123, 10);
    CHECK(km.wcss == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("kmeans is deterministic for a fixed seed") {
    auto buildings = one_building();
    ScenarioYear s = synth_scenario(2016, buildings, 5);
    auto a = cluster_days(s, buildings, 12, 99);
    auto b = cluster_days(s, buildings, 12, 99);
    CHECK(a.day_assignment == b.day_assignment);
    CHECK(a.sigma == b.sigma);
    CHECK(a.centroids == b.centroids);
}

TEST_CASE("sigma sums to the clustered day count; k=50 synthetic year") {
    auto buildings = one_building();
    ScenarioYear s = synth_scenario(2016, buildings, 5);
    auto cs = cluster_days(s, buildings, 50, 11);
    CHECK(std::accumulate(cs.sigma.begin(), cs.sigma.end(), 0) == 365);
    for (int d = 0; d < 365; ++d) {
        REQUIRE(cs.day_assignment[d] >= 0);
        REQUIRE(cs.day_assignment[d] < 50);
    }
}

TEST_CASE("errors on bad k") {
    auto buildings = one_building();
    ScenarioYear s = archetype_year({5.0});
    CHECK_THROWS(cluster_days(s, buildings, 0, 1));
    CHECK_THROWS(cluster_days(s, buildings, 400, 1));
}

TEST_CASE("recluster_remainder") {
    auto buildings = one_building();
    ScenarioYear s = synth_scenario(2016, buildings, 77);

    SUBCASE("start_day 0 equals cluster_days for the same seed") {
        auto a = recluster_remainder(s, buildings, 0, 30, 13);
        auto b = cluster_days(s, buildings, 30, 13);
        CHECK(a.day_assignment == b.day_assignment);
        CHECK(a.centroids == b.centroids);
    }
    SUBCASE("single remaining day") {
        auto cs = recluster_remainder(s, buildings, 364, 30, 13);
        CHECK(cs.k == 1);
        CHECK(cs.sigma == std::vector<int>{1});
    }
    SUBCASE("k equal to remaining days forces singletons") {
        auto cs = recluster_remainder(s, buildings, 335, 30, 13);
        CHECK(cs.k == 30);
        CHECK(cs.days() == 30);
        for (int sig : cs.sigma) CHECK(sig == 1);
    }
    SUBCASE("empty remainder") {
        auto cs = recluster_remainder(s, buildings, 365, 30, 13);
        CHECK(cs.empty());
    }
}

TEST_CASE("local optimality against the converged centroids") {
    auto buildings = one_building();
    ScenarioYear s = synth_scenario(2016, buildings, 3);
    auto feats = cluster_features(s, buildings, 300);  // small tail fixture
    auto km = kmeans(feats, 5, 21, 10);
    auto dist = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double w = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) w += (a[i] - b[i]) * (a[i] - b[i]);
        return w;
    };
    for (std::size_t d = 0; d < feats.size(); ++d)
        for (std::size_t c = 0; c < km.centroids.size(); ++c)
            CHECK(dist(feats[d], km.centroids[km.assignment[d]]) <=
                  dist(feats[d], km.centroids[c]) + 1e-9);
}

TEST_CASE("weighted annual sums are approximately conserved") {
    auto buildings = one_building();
    ScenarioYear s = synth_scenario(2016, buildings, 5);
    auto cs = cluster_days(s, buildings, 50, 11);
    auto weighted_sum = [&](const std::string& role) {
        int r = cs.role_index(role);
        double w = 0.0;
        for (int c = 0; c < cs.k; ++c)
            for (int h = 0; h < 24; ++h) w += cs.sigma[c] * cs.value(r, c, h);
        return w;
    };
    auto true_sum = [&](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0);
    };
    CHECK(std::abs(weighted_sum("spot") - true_sum(s.spot)) / true_sum(s.spot) < 0.05);
    CHECK(std::abs(weighted_sum("co2_el") - true_sum(s.co2_el)) / true_sum(s.co2_el) < 0.05);
    double temp_shift = 0.0;  // temperatures can be negative; shift for a sane denominator
    for (double v : s.temperature) temp_shift = std::min(temp_shift, v);
    double denom = true_sum(s.temperature) - temp_shift * kHoursPerYear;
    CHECK(std::abs(weighted_sum("temperature") - true_sum(s.temperature)) / denom < 0.05);
    double irr_rel = std::abs(weighted_sum("irradiance") - true_sum(s.irradiance)) /
                     true_sum(s.irradiance);
    MESSAGE("irradiance clustering fidelity (reported, not asserted): ", irr_rel);
}

TEST_CASE("cluster set JSON round-trip") {
    auto buildings = one_building();
    ScenarioYear s = synth_scenario(2016, buildings, 5);
    auto cs = cluster_days(s, buildings, 8, 4);
    namespace fs = std::filesystem;
    auto path = fs::temp_directory_path() / "zenopt_cs.json";
    save_cluster_set(cs, path.string());
    auto back = load_cluster_set(path.string());
    CHECK(back.k == cs.k);
    CHECK(back.sigma == cs.sigma);
    CHECK(back.day_assignment == cs.day_assignment);
    CHECK(back.centroids == cs.centroids);
    fs::remove(path);
}

TEST_CASE("year_stats on a constant series") {
    auto st = series_stats("x", std::vector<double>(100, 3.25));
    CHECK(st.boxplot.q1 == 3.25);
    CHECK(st.boxplot.median == 3.25);
    CHECK(st.boxplot.q3 == 3.25);
    CHECK(st.boxplot.outliers.empty());
    for (double v : st.duration_curve) CHECK(v == 3.25);
    double integral = 0.0;
    for (std::size_t i = 0; i < st.histogram.density.size(); ++i)
        integral += st.histogram.density[i] * (st.histogram.edges[i + 1] - st.histogram.edges[i]);
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("year_stats on the 1..8760 ramp matches order statistics") {
    std::vector<double> v(8760);
    std::iota(v.begin(), v.end(), 1.0);
    auto st = series_stats("ramp", v);
    CHECK(st.boxplot.median == doctest::Approx(4380.5).epsilon(1e-12));
    for (std::size_t i = 1; i < st.duration_curve.size(); ++i)
        CHECK(st.duration_curve[i] < st.duration_curve[i - 1]);
    // duration curve is a permutation of the input
    auto sorted_input = v;
    std::sort(sorted_input.begin(), sorted_input.end(), std::greater<double>());
    CHECK(st.duration_curve == sorted_input);
    double integral = 0.0;
    for (std::size_t i = 0; i < st.histogram.density.size(); ++i)
        integral += st.histogram.density[i] * (st.histogram.edges[i + 1] - st.histogram.edges[i]);
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("synthetic reference year has a plausible temperature median") {
    auto buildings = one_building();
    ScenarioYear s = synth_scenario(2016, buildings, 20250811);
    auto st = series_stats("temperature", s.temperature);
    CHECK(st.boxplot.median > 3.0);
    CHECK(st.boxplot.median < 7.0);
}
