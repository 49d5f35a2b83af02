#ifndef ZENOPT_DISPATCH_HPP
#define ZENOPT_DISPATCH_HPP

#include <string>
#include <vector>

#include "zenopt/lp.hpp"
#include "zenopt/model_build.hpp"

namespace zenopt::model {

// Realized operation values for one hour (or one weighted cluster hour).
struct DispatchHour {
    double weight = 1.0;
    int hour_index = -1;  // chronological hour in [0, 8759], -1 for cluster hours
    int cluster = -1;
    int cluster_hour = -1;
    double spot = 0.0;
    double co2_el = 0.0;
    double import_kwh = 0.0;
    double export_kwh = 0.0;
    // per tech unit
    std::vector<double> heat_sh, heat_dhw, fuel, elec_in, gen, gen_export, gen_self,
        gen_charge, gen_dump, curtail;
    std::vector<double> onoff;
    // per storage unit
    std::vector<double> stor_charge, stor_discharge, stor_level, stor_grid_import, stor_export;
    std::vector<double> stor_charge_sh, stor_charge_dhw, stor_discharge_sh, stor_discharge_dhw;
    // per building
    std::vector<double> heat_dump, hg_used_sh, hg_used_dhw;
    double cost = 0.0;  // ledger-style recomputed operation cost of the hour
};

struct DispatchRecord {
    std::vector<TechUnit> tech_units;
    std::vector<StorUnit> stor_units;
    std::vector<std::string> tech_names, stor_names, building_names;
    std::vector<DispatchHour> hours;

    double total_cost() const;
    bool chronological() const {
        return !hours.empty() && hours.front().hour_index >= 0;
    }
};

// Pulls realized values out of a solved model. Hour costs are recomputed
// from the flows and prices, never read from the solver objective.
DispatchRecord extract_dispatch(const ModelInstance& mi, const lp::SolveResult& r);

// Appends the hours of `src` to `dst` (same units); used by the MPC loops.
void append_hours(DispatchRecord& dst, const DispatchRecord& src, int from_hour, int count);

void write_dispatch_csv(const DispatchRecord& rec, const std::string& path);

}  // namespace zenopt::model

#endif
