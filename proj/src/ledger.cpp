#include "zenopt/ledger.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace zenopt {

double EmissionLedger::total_emissions() const {
    double s = 0.0;
    for (std::size_t i = 0; i < emissions_g.size(); ++i) s += weight[i] * emissions_g[i];
    return s;
}

double EmissionLedger::total_compensations() const {
    double s = 0.0;
    for (std::size_t i = 0; i < compensations_g.size(); ++i)
        s += weight[i] * compensations_g[i];
    return s;
}

HourEmissions hour_emissions(const model::DispatchHour& h,
                             const std::vector<model::TechUnit>& tech_units,
                             const std::vector<model::StorUnit>& stor_units,
                             const Catalog& catalog) {
    HourEmissions out;
    double em = h.co2_el * h.import_kwh;
    for (std::size_t u = 0; u < stor_units.size(); ++u)
        em += h.co2_el * h.stor_grid_import[u];
    for (std::size_t u = 0; u < tech_units.size(); ++u) {
        if (h.fuel[u] <= 0.0) continue;
        const TechnologySpec& t = catalog.technologies[tech_units[u].tech];
        const FuelSpec* f = catalog.find_fuel(t.fuel_id);
        if (!f)
            throw std::runtime_error("ledger: dispatched fuel '" + t.fuel_id +
                                     "' missing from the catalog");
        em += (f->co2_hourly ? h.co2_el : f->co2_factor) * h.fuel[u];
    }
    double comp = 0.0;
    for (std::size_t u = 0; u < stor_units.size(); ++u) {
        const StorageSpec& st = catalog.storages[stor_units[u].storage];
        comp += h.co2_el * st.eta_oneway * h.stor_export[u];
    }
    for (std::size_t u = 0; u < tech_units.size(); ++u) comp += h.co2_el * h.gen_export[u];
    out.emissions_g = em;
    out.compensations_g = comp;
    return out;
}

EmissionLedger account(const model::DispatchRecord& dispatch, const Catalog& catalog) {
    EmissionLedger led;
    double cum_em = 0.0, cum_comp = 0.0;
    for (const auto& h : dispatch.hours) {
        HourEmissions he = hour_emissions(h, dispatch.tech_units, dispatch.stor_units, catalog);
        led.weight.push_back(h.weight);
        led.hour_index.push_back(h.hour_index);
        led.emissions_g.push_back(he.emissions_g);
        led.compensations_g.push_back(he.compensations_g);
        cum_em += h.weight * he.emissions_g;
        cum_comp += h.weight * he.compensations_g;
        led.cum_emissions_g.push_back(cum_em);
        led.cum_compensations_g.push_back(cum_comp);
    }
    return led;
}

double zeb_gap(const EmissionLedger& ledger) {
    return ledger.total_emissions() - ledger.total_compensations();
}

void write_ledger_csv(const EmissionLedger& ledger, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "hour,weight,emissions_g,compensations_g,cum_emissions_g,cum_compensations_g\n";
    for (std::size_t i = 0; i < ledger.emissions_g.size(); ++i)
        out << ledger.hour_index[i] << "," << ledger.weight[i] << "," << ledger.emissions_g[i]
            << "," << ledger.compensations_g[i] << "," << ledger.cum_emissions_g[i] << ","
            << ledger.cum_compensations_g[i] << "\n";
}

void write_report_csv(const std::vector<RunSummary>& runs, const std::string& path,
                      const std::vector<std::pair<std::string, double>>& reference_lines) {
    if (runs.empty()) throw std::invalid_argument("report: no runs");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "label,strategy,year,total_cost_eur,disc_operation_cost_eur,emissions_t,"
           "compensations_t,zeb_gap_t,slack_g,penalty_cost_eur,wall_time_s,mipgap\n";
    for (const auto& r : runs)
        out << r.label << "," << r.strategy << "," << r.year << "," << r.total_cost << ","
            << r.disc_operation_cost << "," << r.emissions_g / 1e6 << ","
            << r.compensations_g / 1e6 << "," << r.zeb_gap_g / 1e6 << "," << r.slack_g << ","
            << r.penalty_cost << "," << r.wall_time_s << "," << r.mipgap << "\n";
    for (const auto& [name, value] : reference_lines)
        out << "# reference," << name << "," << value << "\n";
}

void save_summary(const RunSummary& s, const std::string& path) {
    nlohmann::json j;
    j["label"] = s.label;
    j["strategy"] = s.strategy;
    j["year"] = s.year;
    j["total_cost_eur"] = s.total_cost;
    j["disc_operation_cost_eur"] = s.disc_operation_cost;
    j["emissions_g"] = s.emissions_g;
    j["compensations_g"] = s.compensations_g;
    j["zeb_gap_g"] = s.zeb_gap_g;
    j["slack_g"] = s.slack_g;
    j["penalty_cost_eur"] = s.penalty_cost;
    j["wall_time_s"] = s.wall_time_s;
    j["mipgap"] = s.mipgap;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

RunSummary load_summary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    nlohmann::json j = nlohmann::json::parse(in);
    RunSummary s;
    s.label = j.value("label", "");
    s.strategy = j.value("strategy", "");
    s.year = j.value("year", 0);
    s.total_cost = j.value("total_cost_eur", 0.0);
    s.disc_operation_cost = j.value("disc_operation_cost_eur", 0.0);
    s.emissions_g = j.value("emissions_g", 0.0);
    s.compensations_g = j.value("compensations_g", 0.0);
    s.zeb_gap_g = j.value("zeb_gap_g", 0.0);
    s.slack_g = j.value("slack_g", 0.0);
    s.penalty_cost = j.value("penalty_cost_eur", 0.0);
    s.wall_time_s = j.value("wall_time_s", 0.0);
    s.mipgap = j.value("mipgap", 0.0);
    return s;
}

}  // namespace zenopt
