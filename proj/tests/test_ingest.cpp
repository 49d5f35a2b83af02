#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "zenopt/ingest.hpp"
#include "zenopt/synth.hpp"

using namespace zenopt;

namespace {

std::string csv_for_year(int year, double (*f)(int), int skip_hour = -1) {
    std::ostringstream os;
    os << "timestamp,value\n";
    int hours = is_leap_year(year) ? 8784 : 8760;
    std::int64_t start = epoch_hour(year, 1, 1, 0);
    for (int h = 0; h < hours; ++h) {
        if (h == skip_hour) continue;
        os << hour_to_iso(start + h) << "," << f(h) << "\n";
    }
    return os.str();
}

double ramp(int h) { return 1.0 + h * 0.001; }
double flat(int h) {
    (void)h;
    return 7.5;
}

}  // namespace

TEST_CASE("well-formed leap-year file reads all rows") {
    std::istringstream in(csv_for_year(2016, ramp));
    RawSeries raw = parse_series_csv(in, SeriesKind::Temperature, "mem");
    CHECK(raw.hours.size() == 8784);
    CHECK(raw.values.front() == doctest::Approx(1.0));
}

TEST_CASE("shuffled rows sort to the same series") {
    std::string body = csv_for_year(2017, ramp);
    std::vector<std::string> lines;
    std::istringstream split(body);
    std::string line;
    std::getline(split, line);  // header
    while (std::getline(split, line)) lines.push_back(line);
    std::shuffle(lines.begin(), lines.end(), std::mt19937_64(7));
    std::ostringstream shuffled;
    for (const auto& l : lines) shuffled << l << "\n";

    std::istringstream in1(body), in2(shuffled.str());
    RawSeries sorted_ref = parse_series_csv(in1, SeriesKind::Spot, "a");
    RawSeries sorted_shuf = parse_series_csv(in2, SeriesKind::Spot, "b");
    CHECK(sorted_ref.hours == sorted_shuf.hours);
    CHECK(sorted_ref.values == sorted_shuf.values);
}

TEST_CASE("duplicate timestamps are rejected") {
    std::istringstream in("2017-01-01T00:00,1\n2017-01-01T00:00,2\n");
    CHECK_THROWS_WITH_AS(parse_series_csv(in, SeriesKind::Spot, "dup"),
                         doctest::Contains("duplicate"), std::runtime_error);
}

TEST_CASE("parse errors carry the line number") {
    std::istringstream in("2017-01-01T00:00,1\n2017-01-01T01:00,abc\n");
    CHECK_THROWS_WITH_AS(parse_series_csv(in, SeriesKind::Spot, "bad"),
                         doctest::Contains(":2:"), std::runtime_error);
}

TEST_CASE("align drops Feb 29 and keeps 8760 hours") {
    std::istringstream in(csv_for_year(2016, ramp));
    RawSeries raw = parse_series_csv(in, SeriesKind::Temperature, "mem");
    auto aligned = align_year(raw, 2016);
    REQUIRE(aligned.size() == 8760);
    // Feb 28 ends at index 59*24-1; the next index must hold Mar 1 data,
    // which in the raw file sits 24 hours later.
    int feb28_end = 59 * 24 - 1;
    CHECK(aligned[feb28_end] == doctest::Approx(ramp(feb28_end)));
    CHECK(aligned[feb28_end + 1] == doctest::Approx(ramp(feb28_end + 1 + 24)));
    CHECK(aligned.back() == doctest::Approx(ramp(8783)));
}

TEST_CASE("short gaps fill linearly, collinear with neighbours") {
    std::string body = csv_for_year(2017, ramp);
    // Remove a 3-hour block around hour 1000.
    std::istringstream split(body);
    std::ostringstream keep;
    std::string line;
    int n = -1;
    while (std::getline(split, line)) {
        if (n >= 1000 && n <= 1002) {
            ++n;
            continue;
        }
        keep << line << "\n";
        ++n;
    }
    std::istringstream in(keep.str());
    RawSeries raw = parse_series_csv(in, SeriesKind::Spot, "gap");
    auto aligned = align_year(raw, 2017);
    for (int h = 999; h <= 1004; ++h)
        CHECK(aligned[h] == doctest::Approx(ramp(h)).epsilon(1e-9));
}

TEST_CASE("constant series is an interpolation fixed point") {
    std::string body = csv_for_year(2017, flat, /*skip_hour=*/5000);
    std::istringstream in(body);
    RawSeries raw = parse_series_csv(in, SeriesKind::Temperature, "const");
    auto aligned = align_year(raw, 2017);
    for (double v : aligned) CHECK(v == doctest::Approx(7.5));
}

TEST_CASE("align is idempotent on aligned input") {
    std::istringstream in(csv_for_year(2017, ramp));
    RawSeries raw = parse_series_csv(in, SeriesKind::Spot, "mem");
    auto once = align_year(raw, 2017);
    RawSeries again;
    again.kind = SeriesKind::Spot;
    again.source = "aligned";
    std::int64_t start = epoch_hour(2017, 1, 1, 0);
    for (int h = 0; h < 8760; ++h) {
        again.hours.push_back(start + h);
        again.values.push_back(once[h]);
    }
    auto twice = align_year(again, 2017);
    CHECK(once == twice);
}

TEST_CASE("insufficient coverage is rejected") {
    RawSeries raw;
    raw.kind = SeriesKind::Spot;
    raw.source = "thin";
    std::int64_t start = epoch_hour(2017, 1, 1, 0);
    for (int h = 0; h < 8000; ++h) {
        raw.hours.push_back(start + h);
        raw.values.push_back(1.0);
    }
    CHECK_THROWS_WITH_AS(align_year(raw, 2017), doctest::Contains("99%"), std::runtime_error);
}

TEST_CASE("gaps beyond the limit are rejected") {
    std::string body = csv_for_year(2017, ramp);
    std::istringstream split(body);
    std::ostringstream keep;
    std::string line;
    int n = -1;
    while (std::getline(split, line)) {
        if (n >= 2000 && n <= 2007) {  // 8-hour hole
            ++n;
            continue;
        }
        keep << line << "\n";
        ++n;
    }
    std::istringstream in(keep.str());
    RawSeries raw = parse_series_csv(in, SeriesKind::Spot, "hole");
    CHECK_THROWS_WITH_AS(align_year(raw, 2017), doctest::Contains("gap"), std::runtime_error);
}

namespace {
std::vector<Building> two_buildings() {
    Building b1;
    b1.id = "B1";
    Building b2;
    b2.id = "B2";
    return {b1, b2};
}
}  // namespace

TEST_CASE("build_scenario assembles and validates") {
    auto buildings = two_buildings();
    std::map<std::string, std::vector<double>> series;
    std::vector<double> ones(kHoursPerYear, 1.0);
    series["spot"] = ones;
    series["co2_el"] = ones;
    series["temperature"] = ones;
    series["irradiance"] = ones;
    series["load:B1:electric"] = ones;

    SUBCASE("happy path with defaulted loads") {
        ScenarioYear s = build_scenario(2016, series, buildings, true);
        CHECK(s.reference);
        CHECK(s.loads.size() == 2);
        CHECK(s.loads[0].electric[0] == 1.0);
        CHECK(s.loads[1].electric[0] == 0.0);  // unlisted building defaults to zero
    }
    SUBCASE("missing co2_el is an error naming the role") {
        series.erase("co2_el");
        CHECK_THROWS_WITH_AS(build_scenario(2016, series, buildings, false),
                             doctest::Contains("co2_el"), std::runtime_error);
    }
    SUBCASE("negative irradiance rejected") {
        series["irradiance"][100] = -5.0;
        CHECK_THROWS(build_scenario(2016, series, buildings, false));
    }
}

TEST_CASE("series CSV round-trip is value-stable") {
    auto buildings = two_buildings();
    ScenarioYear s = synth_scenario(2016, buildings, 1234);
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "zenopt_ingest_rt";
    fs::create_directories(dir);
    write_series_csv(s.temperature, 2016, (dir / "t.csv").string());
    RawSeries raw = load_series_csv((dir / "t.csv").string(), SeriesKind::Temperature);
    auto aligned = align_year(raw, 2016);
    REQUIRE(aligned.size() == s.temperature.size());
    for (int h = 0; h < kHoursPerYear; h += 97)
        CHECK(aligned[h] == doctest::Approx(s.temperature[h]).epsilon(1e-9));
    fs::remove_all(dir);
}

TEST_CASE("scenario manifest loads a full synthetic year") {
    auto buildings = two_buildings();
    ScenarioYear s = synth_scenario(2016, buildings, 99);
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "zenopt_manifest";
    fs::create_directories(dir);
    auto mapping = write_synth_csvs(s, buildings, dir.string());
    std::ostringstream manifest;
    manifest << "{\n  \"years\": {\n    \"2016\": {\n      \"reference\": true";
    for (const auto& [role, file] : mapping) {
        if (role.rfind("load:", 0) == 0) continue;
        manifest << ",\n      \"" << role << "\": \"" << file << "\"";
    }
    manifest << ",\n      \"loads\": {\n";
    bool firstb = true;
    for (const auto& b : buildings) {
        if (!firstb) manifest << ",\n";
        firstb = false;
        manifest << "        \"" << b.id << "\": {"
                 << "\"electric\": \"2016_load_" << b.id << "_electric.csv\", "
                 << "\"space_heat\": \"2016_load_" << b.id << "_space_heat.csv\", "
                 << "\"dhw\": \"2016_load_" << b.id << "_dhw.csv\"}";
    }
    manifest << "\n      }\n    }\n  }\n}\n";
    std::ofstream((dir / "scenarios.json").string()) << manifest.str();

    ScenarioManifest m = load_scenario_manifest((dir / "scenarios.json").string());
    ScenarioYear back = load_scenario(m, 2016, buildings);
    CHECK(back.reference);
    CHECK(back.spot.size() == 8760);
    for (int h = 0; h < kHoursPerYear; h += 501)
        CHECK(back.loads[1].space_heat[h] ==
              doctest::Approx(s.loads[1].space_heat[h]).epsilon(1e-9));
    fs::remove_all(dir);
}
