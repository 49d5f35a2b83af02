#ifndef ZENOPT_TEST_FIXTURES_HPP
#define ZENOPT_TEST_FIXTURES_HPP

#include <string>
#include <vector>

#include "zenopt/catalog_io.hpp"
#include "zenopt/dispatch.hpp"
#include "zenopt/domain.hpp"
#include "zenopt/ingest.hpp"
#include "zenopt/model_build.hpp"

namespace zenopt::testfix {

// Small catalog used across the model/strategy tests: a biomethane boiler,
// an electric heater, a biogas CHP, PV, one heat storage and one battery.
inline Catalog small_catalog() {
    Catalog c;
    {
        TechnologySpec t;
        t.id = "boiler";
        t.kind = TechKind::FuelBurner;
        t.produces_heat = true;
        t.can_serve_dhw = true;
        t.eta = 0.85;
        t.x_max = 1000;
        t.cost_var = 52;
        t.lifetime = 25;
        t.fuel_id = "biomethane";
        c.technologies.push_back(t);
    }
    {
        TechnologySpec t;
        t.id = "heater";
        t.kind = TechKind::ElectricHeater;
        t.produces_heat = true;
        t.can_serve_dhw = true;
        t.eta = 1.0;
        t.x_max = 1000;
        t.cost_var = 451;
        t.lifetime = 30;
        t.fuel_id = "electricity";
        c.technologies.push_back(t);
    }
    {
        TechnologySpec t;
        t.id = "chp";
        t.kind = TechKind::Chp;
        t.produces_heat = true;
        t.produces_electricity = true;
        t.can_serve_dhw = true;
        t.eta = 0.47;
        t.alpha_chp = 1.09;
        t.x_max = 2000;
        t.cost_var = 1035;
        t.lifetime = 25;
        t.fuel_id = "biomethane";
        c.technologies.push_back(t);
    }
    {
        TechnologySpec t;
        t.id = "pv";
        t.kind = TechKind::Pv;
        t.produces_electricity = true;
        t.area_coeff = 5.3;
        t.x_max = 5000;
        t.cost_var = 730;
        t.lifetime = 35;
        c.technologies.push_back(t);
    }
    {
        FuelSpec f;
        f.id = "electricity";
        f.price_hourly = true;
        f.co2_hourly = true;
        c.fuels.push_back(f);
    }
    {
        FuelSpec f;
        f.id = "biomethane";
        f.price = 0.07;
        f.co2_factor = 100.0;
        c.fuels.push_back(f);
    }
    {
        StorageSpec s;
        s.id = "hst";
        s.medium = StorageMedium::Heat;
        s.eta_oneway = 0.95;
        s.cost_per_kwh = 75;
        s.lifetime = 20;
        s.cap_max = 1e5;
        s.rate_frac = 0.2;
        c.storages.push_back(s);
    }
    {
        StorageSpec s;
        s.id = "batt";
        s.medium = StorageMedium::Electric;
        s.eta_oneway = 1.0;
        s.cost_per_kwh = 577;
        s.lifetime = 10;
        s.cap_max = 1e4;
        s.rate_frac = 0.5;
        c.storages.push_back(s);
    }
    return c;
}

inline Site one_building_site(std::vector<std::string> techs,
                              std::vector<std::string> storages, double gc = 1e5) {
    Site s;
    Building b;
    b.id = "B1";
    b.roof_area = 500;
    b.allowed_techs = std::move(techs);
    b.allowed_storages = std::move(storages);
    s.buildings.push_back(b);
    s.economics.discount_rate = 0.04;
    s.economics.study_years = 60;
    s.economics.grid_tariff = 0.0;
    s.economics.retail_tariff = 0.0;
    s.economics.grid_connection = gc;
    return s;
}

// A design with everything built at the given capacities (0 = absent).
inline model::SystemDesign fixed_design(const Catalog& cat, const Site& site,
                                        const std::vector<std::pair<std::string, double>>& techs,
                                        const std::vector<std::pair<std::string, double>>& stors,
                                        bool hg = false) {
    model::SystemDesign d;
    d.tech_units = model::tech_units_for(cat, site);
    d.stor_units = model::stor_units_for(cat, site);
    d.tech_capacity.assign(d.tech_units.size(), 0.0);
    d.stor_capacity.assign(d.stor_units.size(), 0.0);
    d.tech_built.assign(d.tech_units.size(), 0);
    d.stor_built.assign(d.stor_units.size(), 0);
    d.hg_built = hg;
    for (auto& [id, cap] : techs)
        for (std::size_t u = 0; u < d.tech_units.size(); ++u)
            if (cat.technologies[d.tech_units[u].tech].id == id) {
                d.tech_capacity[u] = cap;
                d.tech_built[u] = cap > 0;
            }
    for (auto& [id, cap] : stors)
        for (std::size_t u = 0; u < d.stor_units.size(); ++u)
            if (cat.storages[d.stor_units[u].storage].id == id) {
                d.stor_capacity[u] = cap;
                d.stor_built[u] = cap > 0;
            }
    return d;
}

// Constant-profile scenario for a 1..n-building site.
inline ScenarioYear flat_scenario(int nbuildings, double spot, double co2, double temp,
                                  double irr, double load_e, double load_sh, double load_dhw) {
    ScenarioYear s;
    s.year = 2016;
    s.spot.assign(kHoursPerYear, spot);
    s.co2_el.assign(kHoursPerYear, co2);
    s.temperature.assign(kHoursPerYear, temp);
    s.irradiance.assign(kHoursPerYear, irr);
    s.loads.resize(nbuildings);
    for (auto& L : s.loads) {
        L.electric.assign(kHoursPerYear, load_e);
        L.space_heat.assign(kHoursPerYear, load_sh);
        L.dhw.assign(kHoursPerYear, load_dhw);
    }
    return s;
}

// Single-cluster ClusterSet with a hand-written 24-hour profile.
inline ClusterSet single_cluster(const std::vector<Building>& buildings,
                                 const std::vector<double>& spot,
                                 const std::vector<double>& co2,
                                 const std::vector<double>& irr,
                                 const std::vector<double>& load_e,
                                 const std::vector<double>& load_sh,
                                 const std::vector<double>& load_dhw, int sigma = 365) {
    ClusterSet cs;
    cs.k = 1;
    cs.year = 2016;
    cs.roles = scenario_roles(buildings);
    cs.sigma = {sigma};
    cs.day_assignment.assign(sigma, 0);
    std::vector<std::vector<double>> roles;
    roles.push_back(spot);
    roles.push_back(co2);
    roles.push_back(std::vector<double>(24, 5.0));  // temperature
    roles.push_back(irr);
    for (std::size_t b = 0; b < buildings.size(); ++b) {
        roles.push_back(load_e);
        roles.push_back(load_sh);
        roles.push_back(load_dhw);
    }
    cs.centroids = {roles};
    return cs;
}

}  // namespace zenopt::testfix

namespace zenopt::testfix {

// Unit lookups in dispatch records by catalog id.
inline int tech_idx(const model::DispatchRecord& rec, const std::string& id) {
    for (std::size_t u = 0; u < rec.tech_names.size(); ++u)
        if (rec.tech_names[u] == id) return static_cast<int>(u);
    return -1;
}

inline int stor_idx(const model::DispatchRecord& rec, const std::string& id) {
    for (std::size_t u = 0; u < rec.stor_names.size(); ++u)
        if (rec.stor_names[u] == id) return static_cast<int>(u);
    return -1;
}

}  // namespace zenopt::testfix

#endif
