#ifndef ZENOPT_INGEST_HPP
#define ZENOPT_INGEST_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "zenopt/domain.hpp"

namespace zenopt {

enum class SeriesKind { Spot, Co2El, Temperature, Irradiance, LoadElectric, LoadSh, LoadDhw };
const char* series_kind_name(SeriesKind k);

// Hours since the Unix epoch; series timestamps are treated as UTC wall
// clock, which keeps a year at exactly 8760/8784 rows.
std::int64_t epoch_hour(int year, int month, int day, int hour);
bool is_leap_year(int year);
std::string hour_to_iso(std::int64_t hour);

struct RawSeries {
    SeriesKind kind = SeriesKind::Spot;
    std::string source;
    std::vector<std::int64_t> hours;  // sorted, unique
    std::vector<double> values;
    int warnings = 0;  // unit sanity flags raised during parsing
};

// Two-column CSV (ISO-8601 hour timestamp, value). Throws on parse errors
// (with line number) and duplicate timestamps; sorts rows chronologically.
RawSeries load_series_csv(const std::string& path, SeriesKind kind);
RawSeries parse_series_csv(std::istream& in, SeriesKind kind, const std::string& source);

// Restrict to the given year, drop Feb 29 on leap years, linearly fill gaps
// of at most `max_gap` hours. Throws when coverage is below 99%.
std::vector<double> align_year(const RawSeries& raw, int year, int max_gap = 6);

struct BuildingLoads {
    std::vector<double> electric;    // E_{b,t}
    std::vector<double> space_heat;  // H^SH_{b,t}
    std::vector<double> dhw;         // H^DHW_{b,t}
};

struct ScenarioYear {
    int year = 0;
    bool reference = false;
    std::vector<double> spot;         // EUR/kWh
    std::vector<double> co2_el;       // g/kWh
    std::vector<double> temperature;  // C
    std::vector<double> irradiance;   // W/m2
    std::vector<BuildingLoads> loads;  // aligned with the site building list
};

// Assembles and validates a ScenarioYear. `series` maps role names
// ("spot", "co2_el", "temperature", "irradiance", "load:<building>:<electric|
// space_heat|dhw>") to aligned 8760-value vectors. Buildings without load
// entries get zero loads (the heating-grid plant carries none by design).
ScenarioYear build_scenario(int year, const std::map<std::string, std::vector<double>>& series,
                            const std::vector<Building>& buildings, bool reference = false);

void validate(const ScenarioYear& s);

// Scenario manifest: maps roles to CSV paths per year.
struct ScenarioManifest {
    struct YearEntry {
        std::map<std::string, std::string> paths;  // role -> csv path
        bool reference = false;
    };
    std::map<int, YearEntry> years;
    std::string base_dir;  // paths resolve relative to the manifest file

    std::vector<int> list_years() const;
};

ScenarioManifest load_scenario_manifest(const std::string& path);
ScenarioYear load_scenario(const ScenarioManifest& manifest, int year,
                           const std::vector<Building>& buildings);

// Writes an aligned series back out as CSV with hourly ISO timestamps.
void write_series_csv(const std::vector<double>& values, int year, const std::string& path);

}  // namespace zenopt

#endif
