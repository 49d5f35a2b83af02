#ifndef ZENOPT_LEDGER_HPP
#define ZENOPT_LEDGER_HPP

#include <string>
#include <vector>

#include "zenopt/dispatch.hpp"

namespace zenopt {

// Solver-independent emission accounting (Eq. 2 sides, per hour).
struct EmissionLedger {
    std::vector<double> weight;
    std::vector<int> hour_index;
    std::vector<double> emissions_g;      // phi_el*(imports + battery grid imports) + fuel CO2
    std::vector<double> compensations_g;  // phi_el*(eta_est*battery exports + gen exports)
    std::vector<double> cum_emissions_g;  // weighted running sums
    std::vector<double> cum_compensations_g;

    double total_emissions() const;
    double total_compensations() const;
};

// Emissions and compensations of a single dispatch hour (Eq. 2 sides).
struct HourEmissions {
    double emissions_g = 0.0;
    double compensations_g = 0.0;
};
HourEmissions hour_emissions(const model::DispatchHour& hour,
                             const std::vector<model::TechUnit>& tech_units,
                             const std::vector<model::StorUnit>& stor_units,
                             const Catalog& catalog);

// Deterministic recomputation from realized flows; never trusts the solver's
// internal expressions.
EmissionLedger account(const model::DispatchRecord& dispatch, const Catalog& catalog);

// Emissions minus compensations over the ledger; <= 0 means net zero reached.
double zeb_gap(const EmissionLedger& ledger);

void write_ledger_csv(const EmissionLedger& ledger, const std::string& path);

struct RunSummary {
    std::string label;
    std::string strategy;
    int year = 0;
    double total_cost = 0.0;            // annual operation cost, EUR
    double disc_operation_cost = 0.0;   // annuity-discounted, EUR
    double emissions_g = 0.0;
    double compensations_g = 0.0;
    double zeb_gap_g = 0.0;
    double slack_g = 0.0;
    double penalty_cost = 0.0;  // EmE-MPC fictitious penalties (excluded from cost)
    double wall_time_s = 0.0;
    double mipgap = 0.0;
};

// Cross-run comparison table (CSV). Reference lines, when provided, are
// appended as annotation rows (e.g. published yearly emission levels).
void write_report_csv(const std::vector<RunSummary>& runs, const std::string& path,
                      const std::vector<std::pair<std::string, double>>& reference_lines = {});

void save_summary(const RunSummary& s, const std::string& path);
RunSummary load_summary(const std::string& path);

}  // namespace zenopt

#endif
