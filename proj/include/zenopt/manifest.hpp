#ifndef ZENOPT_MANIFEST_HPP
#define ZENOPT_MANIFEST_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "zenopt/catalog_io.hpp"
#include "zenopt/ingest.hpp"
#include "zenopt/strategies.hpp"

namespace zenopt {

// Top-level run manifest: one file that pins every input, parameter and seed
// of a reproducible run.
struct RunManifest {
    std::string path;      // manifest file location
    std::string base_dir;  // directory the relative paths resolve against

    std::string catalog_path;
    std::string site_path;
    std::string scenarios_path;
    std::string output_dir;
    int reference_year = 0;
    std::uint64_t seed = 0;
    int invest_clusters = 50;
    strategy::StrategyConfig strategy;
    int rh_implement_hours = 6;
    std::map<std::string, double> reference_lines;  // report annotations

    std::string resolve(const std::string& rel) const;
};

// Parses and validates; every referenced file must exist and the seed must
// be explicit (reproducibility by construction).
RunManifest load_run_manifest(const std::string& path);

struct LoadedInputs {
    Catalog catalog;
    Site site;
    ScenarioManifest scenarios;
};

LoadedInputs load_inputs(const RunManifest& manifest);

}  // namespace zenopt

#endif
