#include "zenopt/synth.hpp"

#include <cmath>
#include <random>

namespace zenopt {

namespace {
constexpr double kTau = 6.283185307179586;

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
}  // namespace

ScenarioYear synth_scenario(int year, const std::vector<Building>& buildings,
                            std::uint64_t seed) {
    ScenarioYear s;
    s.year = year;
    std::mt19937_64 rng(seed ^ (static_cast<std::uint64_t>(year) * 0x9E3779B97F4A7C15ULL));

    s.spot.resize(kHoursPerYear);
    s.co2_el.resize(kHoursPerYear);
    s.temperature.resize(kHoursPerYear);
    s.irradiance.resize(kHoursPerYear);

    std::vector<double> day_cloud(kDaysPerYear);
    for (double& c : day_cloud) c = 0.15 + 0.75 * uniform01(rng);

    for (int t = 0; t < kHoursPerYear; ++t) {
        int d = t / kHoursPerDay;
        int hod = t % kHoursPerDay;
        double season = -std::cos(kTau * (d - 15) / 365.0);  // -1 mid-January, +1 mid-July

        double temp = 4.5 + 11.0 * season + 3.0 * std::sin(kTau * (hod - 8) / 24.0) +
                      3.0 * (uniform01(rng) - 0.5);
        s.temperature[t] = temp;

        double daylen = 12.0 + 6.5 * season;
        double sunrise = 12.0 - daylen / 2.0;
        double sunset = 12.0 + daylen / 2.0;
        double irr = 0.0;
        if (hod + 0.5 > sunrise && hod + 0.5 < sunset) {
            double x = (hod + 0.5 - sunrise) / daylen;
            double smax = 420.0 + 380.0 * season;
            irr = std::max(0.0, smax * std::sin(M_PI * x) * (1.0 - 0.8 * day_cloud[d]));
        }
        s.irradiance[t] = irr;

        bool workhour = hod >= 7 && hod <= 20;
        double peak = (hod >= 7 && hod <= 9) || (hod >= 17 && hod <= 19) ? 1.0 : 0.0;
        double spot = 0.034 - 0.010 * season + 0.006 * (workhour ? 1.0 : 0.0) + 0.008 * peak +
                      0.006 * (uniform01(rng) - 0.5);
        s.spot[t] = std::max(0.005, spot);

        double co2 = 18.0 - 7.0 * season + 6.0 * peak + 4.0 * uniform01(rng);
        if (uniform01(rng) < 0.10 - 0.06 * season)  // winter import spikes
            co2 += 60.0 + 160.0 * uniform01(rng);
        s.co2_el[t] = std::max(2.0, co2);
    }

    s.loads.resize(buildings.size());
    for (std::size_t b = 0; b < buildings.size(); ++b) {
        BuildingLoads& L = s.loads[b];
        L.electric.assign(kHoursPerYear, 0.0);
        L.space_heat.assign(kHoursPerYear, 0.0);
        L.dhw.assign(kHoursPerYear, 0.0);
        double scale = 0.6 + 0.5 * static_cast<double>(b % 3);
        for (int t = 0; t < kHoursPerYear; ++t) {
            int hod = t % kHoursPerDay;
            bool workhour = hod >= 7 && hod <= 20;
            L.electric[t] = scale * (6.0 + 5.0 * (workhour ? 1.0 : 0.0) + 2.0 * uniform01(rng));
            double hdd = std::max(0.0, 15.0 - s.temperature[t]);
            L.space_heat[t] = scale * 1.1 * hdd * (0.85 + 0.3 * uniform01(rng));
            double dhw_peak =
                (hod >= 6 && hod <= 8) || (hod >= 18 && hod <= 21) ? 6.0 : (workhour ? 2.0 : 0.7);
            L.dhw[t] = scale * dhw_peak * (0.8 + 0.4 * uniform01(rng));
        }
    }
    return s;
}

std::vector<std::pair<std::string, std::string>> write_synth_csvs(
    const ScenarioYear& scenario, const std::vector<Building>& buildings,
    const std::string& dir) {
    std::vector<std::pair<std::string, std::string>> mapping;
    auto emit = [&](const std::string& role, const std::string& name,
                    const std::vector<double>& values) {
        write_series_csv(values, scenario.year, dir + "/" + name);
        mapping.emplace_back(role, name);
    };
    std::string y = std::to_string(scenario.year);
    emit("spot", y + "_spot.csv", scenario.spot);
    emit("co2_el", y + "_co2_el.csv", scenario.co2_el);
    emit("temperature", y + "_temperature.csv", scenario.temperature);
    emit("irradiance", y + "_irradiance.csv", scenario.irradiance);
    for (std::size_t b = 0; b < buildings.size(); ++b) {
        const std::string& id = buildings[b].id;
        emit("load:" + id + ":electric", y + "_load_" + id + "_electric.csv",
             scenario.loads[b].electric);
        emit("load:" + id + ":space_heat", y + "_load_" + id + "_space_heat.csv",
             scenario.loads[b].space_heat);
        emit("load:" + id + ":dhw", y + "_load_" + id + "_dhw.csv", scenario.loads[b].dhw);
    }
    return mapping;
}

}  // namespace zenopt
