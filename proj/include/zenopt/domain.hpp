#ifndef ZENOPT_DOMAIN_HPP
#define ZENOPT_DOMAIN_HPP

#include <optional>
#include <string>
#include <vector>

namespace zenopt {

constexpr int kHoursPerYear = 8760;
constexpr int kHoursPerDay = 24;
constexpr int kDaysPerYear = 365;

enum class TechKind { FuelBurner, ElectricHeater, Chp, Pv, SolarThermal, HeatPump };
enum class TechScope { Building, Neighborhood };
enum class StorageMedium { Heat, Electric };
enum class GcMode { SumAsPrinted, Separate };

const char* tech_kind_name(TechKind k);
const char* tech_scope_name(TechScope s);
const char* storage_medium_name(StorageMedium m);

struct TechnologySpec {
    std::string id;
    TechKind kind = TechKind::FuelBurner;
    TechScope scope = TechScope::Building;
    bool produces_heat = false;
    bool produces_electricity = false;
    bool can_serve_dhw = false;    // B^DHW
    double eta = 1.0;              // thermal efficiency (LHV basis, may exceed 1)
    double alpha_chp = 0.0;        // heat-to-power ratio, CHP only
    double alpha_partload = 0.0;   // minimum output as fraction of capacity
    double x_min = 0.0;            // kW
    double x_max = 0.0;            // kW
    double cost_fix = 0.0;         // EUR
    double cost_var = 0.0;         // EUR/kW
    double om_frac = 0.0;          // annual O&M as fraction of cost_var
    int lifetime = 1;              // years
    std::string fuel_id;           // empty for solar techs
    double area_coeff = 0.0;       // m2/kW, PV and solar thermal only

    bool consumes_fuel() const { return kind == TechKind::FuelBurner || kind == TechKind::Chp; }
    bool consumes_electricity() const {
        return kind == TechKind::ElectricHeater || kind == TechKind::HeatPump;
    }
    bool is_solar() const { return kind == TechKind::Pv || kind == TechKind::SolarThermal; }
};

struct FuelSpec {
    std::string id;
    double price = 0.0;       // EUR/kWh, ignored when price_hourly
    bool price_hourly = false;  // electricity: P^spot_t + P^grid + P^ret
    double co2_factor = 0.0;  // gCO2/kWh, ignored when co2_hourly
    bool co2_hourly = false;  // electricity: phi^CO2,el_t
};

struct StorageSpec {
    std::string id;
    StorageMedium medium = StorageMedium::Heat;
    double eta_oneway = 1.0;   // charge efficiency = discharge efficiency
    double cost_per_kwh = 0.0;
    double om_frac = 0.0;
    int lifetime = 1;
    double cap_min = 0.0;      // kWh
    double cap_max = 1e6;      // kWh, search-space cap
    double rate_frac = 1.0;    // max hourly charge/discharge as fraction of capacity
};

struct Building {
    std::string id;
    double roof_area = 0.0;  // m2
    std::vector<std::string> allowed_techs;
    std::vector<std::string> allowed_storages;
};

struct HeatingPipe {
    std::string from;   // sending node
    std::string to;     // receiving node
    double loss = 0.0;  // kWh standing loss per hour while the grid is built
    double max_flow = 0.0;  // kWh/h
};

struct HeatingGridTopology {
    std::vector<HeatingPipe> pipes;
    double hg_cost = 0.0;  // EUR, C^HG
    std::string plant_id;  // virtual production-plant node
};

struct EconomicParams {
    double discount_rate = 0.04;   // r
    int study_years = 60;          // D
    double grid_tariff = 0.0;      // P^grid, EUR/kWh
    double retail_tariff = 0.0;    // P^ret, EUR/kWh
    double grid_connection = 0.0;  // GC, kW
    double big_m = 1e5;            // kWh
    GcMode gc_mode = GcMode::SumAsPrinted;
};

// Piecewise-linear map temperature -> value; breakpoints sorted by T.
struct PiecewiseLinear {
    std::vector<double> t;
    std::vector<double> v;

    double at(double temp) const;  // clamps outside the breakpoint range
};

struct CopServiceModel {
    PiecewiseLinear cop;        // T -> COP
    PiecewiseLinear input_max;  // T -> max electric input for a 1 kW unit
};

struct CopModel {
    std::string tech_id;
    CopServiceModel sh;   // space heating, 35 C supply
    CopServiceModel dhw;  // domestic hot water, 65 C supply
};

struct PvPanelParams {
    double t_noct = 45.0;   // C
    double t_coef = 0.004;  // 1/K
    double t_stc = 25.0;    // C
    double eta_inv = 0.97;
    double g_stc = 1000.0;  // W/m2
};

struct Catalog {
    std::vector<TechnologySpec> technologies;
    std::vector<FuelSpec> fuels;
    std::vector<StorageSpec> storages;
    std::vector<CopModel> cop_models;
    PvPanelParams pv_panel;

    const TechnologySpec* find_tech(const std::string& id) const;
    const FuelSpec* find_fuel(const std::string& id) const;
    const StorageSpec* find_storage(const std::string& id) const;
    const CopModel* find_cop(const std::string& tech_id) const;
    int tech_index(const std::string& id) const;
    int storage_index(const std::string& id) const;
};

// Throws std::invalid_argument naming the entry on any violated invariant.
void validate(const TechnologySpec& t);
void validate(const FuelSpec& f);
void validate(const StorageSpec& s);
void validate(const EconomicParams& e);
void validate(const Catalog& c);
void validate(const HeatingGridTopology& topo, const std::vector<Building>& buildings);

// Sum over y=1..D of (1+r)^-y. Domain error outside 0 < r < 1.
double annuity_factor(double discount_rate, int study_years);

struct DiscountedCost {
    double var_disc = 0.0;  // EUR/kW
    double fix_disc = 0.0;  // EUR
};

// Re-investment every `lifetime` years over the study horizon, minus a
// straight-line salvage credit for the final partially used unit.
DiscountedCost discounted_investment_cost(const TechnologySpec& tech, const EconomicParams& econ);
double discounted_storage_cost(const StorageSpec& st, const EconomicParams& econ);

// eta_PV,t for one hour; negative results clamp to zero.
double pv_efficiency(const PvPanelParams& panel, double temperature, double irradiance);

// eta_PV,t from ambient temperature and irradiance; negative values clamp to
// zero (counted in *clamped when provided).
std::vector<double> pv_efficiency_profile(const std::vector<double>& temperature,
                                          const std::vector<double>& irradiance,
                                          const PvPanelParams& panel, int* clamped = nullptr);

struct CopProfiles {
    std::vector<double> cop_sh;
    std::vector<double> cop_dhw;
    std::vector<double> input_max_sh;
    std::vector<double> input_max_dhw;
};

// Hourly COP and max-input profiles for one heat-pump technology. Throws if
// the catalog lacks a CopModel for the technology.
CopProfiles cop_profiles(const Catalog& catalog, const std::string& tech_id,
                         const std::vector<double>& temperature);

}  // namespace zenopt

#endif
