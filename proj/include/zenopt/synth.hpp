#ifndef ZENOPT_SYNTH_HPP
#define ZENOPT_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "zenopt/ingest.hpp"

namespace zenopt {

// Deterministic synthetic stand-ins for the unpublished site data: Nordic
// temperature/irradiance shapes, spot prices with daily peaks, an
// electricity CO2 factor with winter import spikes, and per-building loads
// coupled to temperature. Same seed+year -> identical series.
ScenarioYear synth_scenario(int year, const std::vector<Building>& buildings,
                            std::uint64_t seed);

// Writes the scenario's series as CSV files under dir, named
// <year>_<role>.csv (load roles use <year>_load_<building>_<part>.csv).
// Returns the role -> filename mapping used.
std::vector<std::pair<std::string, std::string>> write_synth_csvs(
    const ScenarioYear& scenario, const std::vector<Building>& buildings,
    const std::string& dir);

}  // namespace zenopt

#endif
