#include "zenopt/manifest.hpp"

#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace zenopt {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {
[[noreturn]] void fail(const std::string& what) { throw std::runtime_error(what); }
}  // namespace

std::string RunManifest::resolve(const std::string& rel) const {
    if (rel.empty() || rel[0] == '/') return rel;
    return base_dir + "/" + rel;
}

RunManifest load_run_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open manifest '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        fail(path + ": invalid JSON: " + e.what());
    }
    RunManifest m;
    m.path = path;
    auto slash = path.find_last_of('/');
    m.base_dir = slash == std::string::npos ? "." : path.substr(0, slash);
    m.catalog_path = j.at("catalog").get<std::string>();
    m.site_path = j.at("site").get<std::string>();
    m.scenarios_path = j.at("scenarios").get<std::string>();
    m.output_dir = j.value("output_dir", "out");
    m.reference_year = j.at("reference_year").get<int>();
    if (!j.contains("seed")) fail(path + ": manifest must pin an explicit seed");
    m.seed = j.at("seed").get<std::uint64_t>();
    m.invest_clusters = j.value("invest_clusters", 50);

    if (j.contains("strategy")) {
        const auto& js = j["strategy"];
        m.strategy.t_mpc = js.value("t_mpc", 24);
        m.strategy.implement_hours = js.value("implement_hours", 1);
        m.rh_implement_hours = js.value("rh_implement_hours", 6);
        m.strategy.pf_clusters = js.value("pf_clusters", 50);
        m.strategy.rh_tail_clusters = js.value("rh_tail_clusters", 30);
        m.strategy.mipgap = js.value("mipgap", 0.01);
        m.strategy.time_limit_s = js.value("time_limit_s", 600.0);
        if (js.contains("deltas")) {
            const auto& d = js["deltas"];
            m.strategy.deltas.d1 = d.at(0).get<double>();
            m.strategy.deltas.d2 = d.at(1).get<double>();
            m.strategy.deltas.d3 = d.at(2).get<double>();
        }
    }
    m.strategy.seed = m.seed;
    const json reference_lines = j.value("reference_lines", json::object());
    for (const auto& [k, v] : reference_lines.items()) m.reference_lines[k] = v.get<double>();

    for (const std::string& p :
         {m.resolve(m.catalog_path), m.resolve(m.site_path), m.resolve(m.scenarios_path)})
        if (!fs::exists(p)) fail(path + ": referenced file does not exist: " + p);
    m.strategy.check();
    return m;
}

LoadedInputs load_inputs(const RunManifest& manifest) {
    LoadedInputs in;
    in.catalog = load_catalog(manifest.resolve(manifest.catalog_path));
    in.site = load_site(manifest.resolve(manifest.site_path));
    in.scenarios = load_scenario_manifest(manifest.resolve(manifest.scenarios_path));
    return in;
}

}  // namespace zenopt
