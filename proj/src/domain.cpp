#include "zenopt/domain.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace zenopt {

namespace {
[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }
}  // namespace

const char* tech_kind_name(TechKind k) {
    switch (k) {
        case TechKind::FuelBurner: return "fuel_burner";
        case TechKind::ElectricHeater: return "electric_heater";
        case TechKind::Chp: return "chp";
        case TechKind::Pv: return "pv";
        case TechKind::SolarThermal: return "solar_thermal";
        case TechKind::HeatPump: return "heat_pump";
    }
    return "?";
}

const char* tech_scope_name(TechScope s) {
    return s == TechScope::Building ? "building" : "neighborhood";
}

const char* storage_medium_name(StorageMedium m) {
    return m == StorageMedium::Heat ? "heat" : "electric";
}

double PiecewiseLinear::at(double temp) const {
    if (t.empty()) fail("piecewise-linear map has no breakpoints");
    if (temp <= t.front()) return v.front();
    if (temp >= t.back()) return v.back();
    auto it = std::upper_bound(t.begin(), t.end(), temp);
    std::size_t hi = static_cast<std::size_t>(it - t.begin());
    std::size_t lo = hi - 1;
    double w = (temp - t[lo]) / (t[hi] - t[lo]);
    return v[lo] + w * (v[hi] - v[lo]);
}

const TechnologySpec* Catalog::find_tech(const std::string& id) const {
    for (const auto& t : technologies)
        if (t.id == id) return &t;
    return nullptr;
}

const FuelSpec* Catalog::find_fuel(const std::string& id) const {
    for (const auto& f : fuels)
        if (f.id == id) return &f;
    return nullptr;
}

const StorageSpec* Catalog::find_storage(const std::string& id) const {
    for (const auto& s : storages)
        if (s.id == id) return &s;
    return nullptr;
}

const CopModel* Catalog::find_cop(const std::string& tech_id) const {
    for (const auto& c : cop_models)
        if (c.tech_id == tech_id) return &c;
    return nullptr;
}

int Catalog::tech_index(const std::string& id) const {
    for (std::size_t i = 0; i < technologies.size(); ++i)
        if (technologies[i].id == id) return static_cast<int>(i);
    return -1;
}

int Catalog::storage_index(const std::string& id) const {
    for (std::size_t i = 0; i < storages.size(); ++i)
        if (storages[i].id == id) return static_cast<int>(i);
    return -1;
}

void validate(const TechnologySpec& t) {
    auto ctx = [&](const std::string& msg) { fail("technology '" + t.id + "': " + msg); };
    if (t.id.empty()) fail("technology with empty id");
    if (!(t.eta > 0.0 && t.eta <= 1.15)) ctx("eta must be in (0, 1.15]");
    if (t.alpha_partload < 0.0 || t.alpha_partload > 1.0) ctx("alpha_partload outside [0, 1]");
    if (t.x_min > t.x_max) ctx("x_min exceeds x_max");
    if ((t.kind == TechKind::Chp) != (t.alpha_chp > 0.0))
        ctx("alpha_chp must be positive exactly for CHP technologies");
    if (t.is_solar() != (t.area_coeff > 0.0))
        ctx("area_coeff must be positive exactly for PV/solar-thermal");
    if (t.consumes_fuel() && t.fuel_id.empty()) ctx("fuel-consuming technology without fuel_id");
    if (t.consumes_electricity() && t.fuel_id != "electricity")
        ctx("electric technology must reference fuel 'electricity'");
    if (t.is_solar() && !t.fuel_id.empty()) ctx("solar technology cannot consume fuel");
    if (t.kind == TechKind::Chp && !(t.produces_heat && t.produces_electricity))
        ctx("CHP must produce both heat and electricity");
    if (t.kind == TechKind::Pv && t.produces_heat) ctx("PV cannot produce heat");
    if (t.lifetime < 1) ctx("lifetime must be at least one year");
    if (t.cost_fix < 0 || t.cost_var < 0 || t.om_frac < 0) ctx("negative cost entry");
}

void validate(const FuelSpec& f) {
    if (f.id.empty()) fail("fuel with empty id");
    if (!f.price_hourly && f.price < 0) fail("fuel '" + f.id + "': negative price");
    if (!f.co2_hourly && f.co2_factor < 0) fail("fuel '" + f.id + "': negative co2_factor");
}

void validate(const StorageSpec& s) {
    auto ctx = [&](const std::string& msg) { fail("storage '" + s.id + "': " + msg); };
    if (s.id.empty()) fail("storage with empty id");
    if (!(s.eta_oneway > 0.0 && s.eta_oneway <= 1.0)) ctx("eta_oneway must be in (0, 1]");
    if (!(s.rate_frac > 0.0 && s.rate_frac <= 1.0)) ctx("rate_frac must be in (0, 1]");
    if (s.cap_min < 0 || s.cap_max < s.cap_min) ctx("bad capacity range");
    if (s.lifetime < 1) ctx("lifetime must be at least one year");
    if (s.cost_per_kwh < 0 || s.om_frac < 0) ctx("negative cost entry");
}

void validate(const EconomicParams& e) {
    if (!(e.discount_rate > 0.0 && e.discount_rate < 1.0))
        fail("economics: discount_rate must be in (0, 1)");
    if (e.study_years < 1) fail("economics: study_years must be at least 1");
    if (!(e.grid_connection > 0.0)) fail("economics: grid_connection must be positive");
    if (!(e.big_m > 0.0)) fail("economics: big_m must be positive");
    if (e.grid_tariff < 0 || e.retail_tariff < 0) fail("economics: negative tariff");
}

void validate(const Catalog& c) {
    std::set<std::string> ids;
    for (const auto& t : c.technologies) {
        validate(t);
        if (!ids.insert(t.id).second) fail("duplicate technology id '" + t.id + "'");
        if (t.consumes_fuel() || t.consumes_electricity())
            if (!c.find_fuel(t.fuel_id))
                fail("technology '" + t.id + "' references unknown fuel '" + t.fuel_id + "'");
        if (t.kind == TechKind::HeatPump && !c.find_cop(t.id))
            fail("heat pump '" + t.id + "' lacks a COP model");
    }
    ids.clear();
    for (const auto& f : c.fuels) {
        validate(f);
        if (!ids.insert(f.id).second) fail("duplicate fuel id '" + f.id + "'");
    }
    ids.clear();
    for (const auto& s : c.storages) {
        validate(s);
        if (!ids.insert(s.id).second) fail("duplicate storage id '" + s.id + "'");
    }
    for (const auto& cm : c.cop_models) {
        if (cm.sh.cop.t.empty() || cm.dhw.cop.t.empty())
            fail("cop model '" + cm.tech_id + "' has empty breakpoint tables");
        for (double v : cm.sh.cop.v)
            if (v <= 1.0) fail("cop model '" + cm.tech_id + "': COP must exceed 1");
        for (double v : cm.dhw.cop.v)
            if (v <= 1.0) fail("cop model '" + cm.tech_id + "': COP must exceed 1");
        auto check_input = [&](const PiecewiseLinear& p) {
            for (double v : p.v)
                if (!(v > 0.0 && v <= 1.0))
                    fail("cop model '" + cm.tech_id + "': input_max must be in (0, 1]");
        };
        check_input(cm.sh.input_max);
        check_input(cm.dhw.input_max);
    }
}

void validate(const HeatingGridTopology& topo, const std::vector<Building>& buildings) {
    auto known = [&](const std::string& id) {
        for (const auto& b : buildings)
            if (b.id == id) return true;
        return false;
    };
    if (!topo.pipes.empty() && topo.plant_id.empty())
        fail("heating grid has pipes but no plant node");
    if (!topo.plant_id.empty() && !known(topo.plant_id))
        fail("heating grid plant node '" + topo.plant_id + "' is not a declared building");
    for (const auto& p : topo.pipes) {
        if (p.loss < 0) fail("pipe " + p.from + "->" + p.to + ": negative loss");
        if (!(p.max_flow > 0)) fail("pipe " + p.from + "->" + p.to + ": max_flow must be positive");
        if (!known(p.from)) fail("pipe references unknown node '" + p.from + "'");
        if (!known(p.to)) fail("pipe references unknown node '" + p.to + "'");
    }
    if (topo.hg_cost < 0) fail("heating grid cost must be nonnegative");
}

double annuity_factor(double discount_rate, int study_years) {
    if (!(discount_rate > 0.0 && discount_rate < 1.0))
        throw std::domain_error("annuity_factor: discount rate must be in (0, 1)");
    if (study_years < 1) throw std::domain_error("annuity_factor: study_years must be >= 1");
    return (1.0 - std::pow(1.0 + discount_rate, -study_years)) / discount_rate;
}

namespace {
double discounted_unit_cost(double cost, int lifetime, const EconomicParams& econ) {
    double r = econ.discount_rate;
    int D = econ.study_years;
    double total = 0.0;
    int last_start = 0;
    for (int start = 0; start < D; start += lifetime) {
        total += cost * std::pow(1.0 + r, -start);
        last_start = start;
    }
    int used = D - last_start;  // years of the final unit actually used
    double salvage_frac = 1.0 - static_cast<double>(used) / lifetime;
    total -= salvage_frac * cost * std::pow(1.0 + r, -D);
    return total;
}
}  // namespace

DiscountedCost discounted_investment_cost(const TechnologySpec& tech,
                                          const EconomicParams& econ) {
    if (tech.lifetime < 1)
        throw std::invalid_argument("discounted_investment_cost: lifetime must be >= 1");
    DiscountedCost out;
    out.var_disc = discounted_unit_cost(tech.cost_var, tech.lifetime, econ);
    out.fix_disc = discounted_unit_cost(tech.cost_fix, tech.lifetime, econ);
    return out;
}

double discounted_storage_cost(const StorageSpec& st, const EconomicParams& econ) {
    return discounted_unit_cost(st.cost_per_kwh, st.lifetime, econ);
}

double pv_efficiency(const PvPanelParams& panel, double temperature, double irradiance) {
    double t_cell = temperature + (panel.t_noct - 20.0) * irradiance / 800.0;
    double e = panel.eta_inv / panel.g_stc * (1.0 - panel.t_coef * (t_cell - panel.t_stc));
    return e < 0.0 ? 0.0 : e;
}

std::vector<double> pv_efficiency_profile(const std::vector<double>& temperature,
                                          const std::vector<double>& irradiance,
                                          const PvPanelParams& panel, int* clamped) {
    if (temperature.size() != irradiance.size())
        throw std::invalid_argument("pv_efficiency_profile: series lengths differ");
    std::vector<double> eta(temperature.size());
    int clamps = 0;
    for (std::size_t i = 0; i < eta.size(); ++i) {
        if (irradiance[i] < 0)
            throw std::invalid_argument("pv_efficiency_profile: negative irradiance");
        double t_cell = temperature[i] + (panel.t_noct - 20.0) * irradiance[i] / 800.0;
        double raw = panel.eta_inv / panel.g_stc *
                     (1.0 - panel.t_coef * (t_cell - panel.t_stc));
        if (raw < 0.0) ++clamps;
        eta[i] = pv_efficiency(panel, temperature[i], irradiance[i]);
    }
    if (clamped) *clamped = clamps;
    return eta;
}

CopProfiles cop_profiles(const Catalog& catalog, const std::string& tech_id,
                         const std::vector<double>& temperature) {
    const CopModel* model = catalog.find_cop(tech_id);
    if (!model)
        throw std::invalid_argument("cop_profiles: no COP model for heat pump '" + tech_id + "'");
    CopProfiles out;
    out.cop_sh.reserve(temperature.size());
    out.cop_dhw.reserve(temperature.size());
    out.input_max_sh.reserve(temperature.size());
    out.input_max_dhw.reserve(temperature.size());
    for (double t : temperature) {
        out.cop_sh.push_back(model->sh.cop.at(t));
        out.cop_dhw.push_back(model->dhw.cop.at(t));
        out.input_max_sh.push_back(model->sh.input_max.at(t));
        out.input_max_dhw.push_back(model->dhw.input_max.at(t));
    }
    return out;
}

}  // namespace zenopt
