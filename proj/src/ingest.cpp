#include "zenopt/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace zenopt {

using nlohmann::json;

namespace {
[[noreturn]] void fail(const std::string& what) { throw std::runtime_error(what); }

// Days since 1970-01-01 (Howard Hinnant's civil-days algorithm).
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<int>(yoe) + static_cast<int>(era) * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}
}  // namespace

bool is_leap_year(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

std::int64_t epoch_hour(int year, int month, int day, int hour) {
    return days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day)) * 24 +
           hour;
}

std::string hour_to_iso(std::int64_t hour) {
    std::int64_t days = hour >= 0 ? hour / 24 : (hour - 23) / 24;
    int h = static_cast<int>(hour - days * 24);
    int y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:00", y, m, d, h);
    return buf;
}

const char* series_kind_name(SeriesKind k) {
    switch (k) {
        case SeriesKind::Spot: return "spot";
        case SeriesKind::Co2El: return "co2_el";
        case SeriesKind::Temperature: return "temperature";
        case SeriesKind::Irradiance: return "irradiance";
        case SeriesKind::LoadElectric: return "load_electric";
        case SeriesKind::LoadSh: return "load_space_heat";
        case SeriesKind::LoadDhw: return "load_dhw";
    }
    return "?";
}

namespace {

// Accepts "YYYY-MM-DDTHH:MM[:SS][Z]" and "YYYY-MM-DD HH:MM[:SS]".
bool parse_timestamp(const std::string& s, std::int64_t& hour_out) {
    int y, mo, d, h, mi = 0;
    char sep;
    if (std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d", &y, &mo, &d, &sep, &h, &mi) < 5) return false;
    if (sep != 'T' && sep != ' ' && sep != 't') return false;
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi != 0) return false;
    hour_out = epoch_hour(y, mo, d, h);
    return true;
}

void unit_sanity(SeriesKind kind, double v, int line, const std::string& source, int& warnings) {
    bool odd = false;
    switch (kind) {
        case SeriesKind::Spot: odd = v < -0.5 || v > 5.0; break;
        case SeriesKind::Co2El: odd = v < 0.0 || v > 1500.0; break;
        case SeriesKind::Irradiance: odd = v < 0.0 || v > 1500.0; break;
        case SeriesKind::Temperature: odd = v < -60.0 || v > 60.0; break;
        default: odd = v < 0.0; break;
    }
    if (odd) {
        if (warnings == 0)
            std::cerr << "warning: " << source << ":" << line << ": " << series_kind_name(kind)
                      << " value " << v << " outside the expected range\n";
        ++warnings;
    }
}

}  // namespace

RawSeries parse_series_csv(std::istream& in, SeriesKind kind, const std::string& source) {
    RawSeries out;
    out.kind = kind;
    out.source = source;
    std::vector<std::pair<std::int64_t, double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            fail(source + ":" + std::to_string(lineno) + ": expected 'timestamp,value'");
        std::string ts = line.substr(0, comma);
        std::string val = line.substr(comma + 1);
        std::int64_t hour;
        if (!parse_timestamp(ts, hour)) {
            if (lineno == 1) continue;  // header row
            fail(source + ":" + std::to_string(lineno) + ": bad timestamp '" + ts + "'");
        }
        char* end = nullptr;
        double v = std::strtod(val.c_str(), &end);
        if (end == val.c_str() || !std::isfinite(v))
            fail(source + ":" + std::to_string(lineno) + ": bad value '" + val + "'");
        unit_sanity(kind, v, lineno, source, out.warnings);
        rows.emplace_back(hour, v);
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].first == rows[i - 1].first)
            fail(source + ": duplicate timestamp " + hour_to_iso(rows[i].first));
    out.hours.reserve(rows.size());
    out.values.reserve(rows.size());
    for (const auto& [h, v] : rows) {
        out.hours.push_back(h);
        out.values.push_back(v);
    }
    return out;
}

RawSeries load_series_csv(const std::string& path, SeriesKind kind) {
    std::ifstream in(path);
    if (!in) fail("cannot open series file '" + path + "'");
    return parse_series_csv(in, kind, path);
}

std::vector<double> align_year(const RawSeries& raw, int year, int max_gap) {
    std::int64_t start = epoch_hour(year, 1, 1, 0);
    std::int64_t end = epoch_hour(year + 1, 1, 1, 0);
    std::int64_t feb29 = is_leap_year(year) ? epoch_hour(year, 2, 29, 0) : -1;

    std::vector<double> values(kHoursPerYear, std::nan(""));
    std::size_t present = 0;
    for (std::size_t i = 0; i < raw.hours.size(); ++i) {
        std::int64_t h = raw.hours[i];
        if (h < start || h >= end) continue;
        if (feb29 >= 0) {
            if (h >= feb29 && h < feb29 + 24) continue;  // drop the leap day
            if (h >= feb29 + 24) h -= 24;
        }
        std::size_t idx = static_cast<std::size_t>(h - start);
        if (std::isnan(values[idx])) ++present;
        values[idx] = raw.values[i];
    }
    if (present < static_cast<std::size_t>(0.99 * kHoursPerYear))
        fail(raw.source + ": year " + std::to_string(year) + " covers only " +
             std::to_string(present) + "/8760 hours (below 99%)");

    // Fill gaps: linear interpolation inside, flat fill at the boundaries.
    int i = 0;
    while (i < kHoursPerYear) {
        if (!std::isnan(values[i])) {
            ++i;
            continue;
        }
        int gap_start = i;
        while (i < kHoursPerYear && std::isnan(values[i])) ++i;
        int gap_len = i - gap_start;
        if (gap_len > max_gap)
            fail(raw.source + ": gap of " + std::to_string(gap_len) + " hours starting " +
                 hour_to_iso(start + gap_start) + " exceeds the " + std::to_string(max_gap) +
                 "-hour fill limit");
        double left = gap_start > 0 ? values[gap_start - 1] : std::nan("");
        double right = i < kHoursPerYear ? values[i] : std::nan("");
        for (int k = 0; k < gap_len; ++k) {
            double v;
            if (std::isnan(left))
                v = right;
            else if (std::isnan(right))
                v = left;
            else
                v = left + (right - left) * (k + 1) / (gap_len + 1);
            values[gap_start + k] = v;
        }
    }
    return values;
}

ScenarioYear build_scenario(int year, const std::map<std::string, std::vector<double>>& series,
                            const std::vector<Building>& buildings, bool reference) {
    ScenarioYear s;
    s.year = year;
    s.reference = reference;
    std::vector<std::string> missing;
    auto take = [&](const std::string& role) -> std::vector<double> {
        auto it = series.find(role);
        if (it == series.end()) {
            missing.push_back(role);
            return {};
        }
        return it->second;
    };
    s.spot = take("spot");
    s.co2_el = take("co2_el");
    s.temperature = take("temperature");
    s.irradiance = take("irradiance");
    s.loads.resize(buildings.size());
    for (std::size_t b = 0; b < buildings.size(); ++b) {
        const std::string base = "load:" + buildings[b].id + ":";
        for (const char* part : {"electric", "space_heat", "dhw"}) {
            auto it = series.find(base + part);
            std::vector<double> v =
                it == series.end() ? std::vector<double>(kHoursPerYear, 0.0) : it->second;
            if (part == std::string("electric"))
                s.loads[b].electric = std::move(v);
            else if (part == std::string("space_heat"))
                s.loads[b].space_heat = std::move(v);
            else
                s.loads[b].dhw = std::move(v);
        }
    }
    if (!missing.empty()) {
        std::string what = "scenario " + std::to_string(year) + " is missing series:";
        for (const auto& r : missing) what += " " + r;
        fail(what);
    }
    validate(s);
    return s;
}

void validate(const ScenarioYear& s) {
    auto check_len = [&](const std::vector<double>& v, const std::string& role) {
        if (static_cast<int>(v.size()) != kHoursPerYear)
            fail("scenario " + std::to_string(s.year) + ": series '" + role + "' has " +
                 std::to_string(v.size()) + " entries, expected 8760");
        for (double x : v)
            if (!std::isfinite(x))
                fail("scenario " + std::to_string(s.year) + ": series '" + role +
                     "' contains a non-finite value");
    };
    check_len(s.spot, "spot");
    check_len(s.co2_el, "co2_el");
    check_len(s.temperature, "temperature");
    check_len(s.irradiance, "irradiance");
    for (double v : s.irradiance)
        if (v < 0) fail("scenario: negative irradiance");
    for (double v : s.co2_el)
        if (v < 0) fail("scenario: negative electricity CO2 factor");
    for (std::size_t b = 0; b < s.loads.size(); ++b) {
        check_len(s.loads[b].electric, "load electric");
        check_len(s.loads[b].space_heat, "load space_heat");
        check_len(s.loads[b].dhw, "load dhw");
        for (const auto* v : {&s.loads[b].electric, &s.loads[b].space_heat, &s.loads[b].dhw})
            for (double x : *v)
                if (x < 0) fail("scenario: negative building load");
    }
}

std::vector<int> ScenarioManifest::list_years() const {
    std::vector<int> out;
    for (const auto& [y, e] : years) out.push_back(y);
    return out;
}

ScenarioManifest load_scenario_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open scenario manifest '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        fail(path + ": invalid JSON: " + e.what());
    }
    ScenarioManifest m;
    auto slash = path.find_last_of('/');
    m.base_dir = slash == std::string::npos ? "." : path.substr(0, slash);
    for (const auto& [key, jy] : j.at("years").items()) {
        ScenarioManifest::YearEntry e;
        e.reference = jy.value("reference", false);
        for (const char* role : {"spot", "co2_el", "temperature", "irradiance"})
            e.paths[role] = jy.at(role).get<std::string>();
        const json loads = jy.value("loads", json::object());
        for (const auto& [bid, jl] : loads.items())
            for (const auto& [part, p] : jl.items())
                e.paths["load:" + bid + ":" + part] = p.get<std::string>();
        m.years[std::stoi(key)] = std::move(e);
    }
    return m;
}

ScenarioYear load_scenario(const ScenarioManifest& manifest, int year,
                           const std::vector<Building>& buildings) {
    auto it = manifest.years.find(year);
    if (it == manifest.years.end())
        fail("scenario manifest has no entry for year " + std::to_string(year));
    std::map<std::string, std::vector<double>> series;
    for (const auto& [role, rel] : it->second.paths) {
        SeriesKind kind = SeriesKind::Spot;
        if (role == "spot") kind = SeriesKind::Spot;
        else if (role == "co2_el") kind = SeriesKind::Co2El;
        else if (role == "temperature") kind = SeriesKind::Temperature;
        else if (role == "irradiance") kind = SeriesKind::Irradiance;
        else if (role.find(":electric") != std::string::npos) kind = SeriesKind::LoadElectric;
        else if (role.find(":space_heat") != std::string::npos) kind = SeriesKind::LoadSh;
        else kind = SeriesKind::LoadDhw;
        std::string path = rel;
        if (!rel.empty() && rel[0] != '/') path = manifest.base_dir + "/" + rel;
        series[role] = align_year(load_series_csv(path, kind), year);
    }
    return build_scenario(year, series, buildings, it->second.reference);
}

void write_series_csv(const std::vector<double>& values, int year, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail("cannot write '" + path + "'");
    out << "timestamp,value\n";
    std::int64_t start = epoch_hour(year, 1, 1, 0);
    std::int64_t feb29 = is_leap_year(year) ? epoch_hour(year, 2, 29, 0) : -1;
    std::int64_t h = start;
    for (double v : values) {
        if (feb29 >= 0 && h == feb29) h += 24;  // mirror the leap-day drop
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s,%.10g\n", hour_to_iso(h).c_str(), v);
        out << buf;
        ++h;
    }
}

}  // namespace zenopt
