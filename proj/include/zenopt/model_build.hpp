#ifndef ZENOPT_MODEL_BUILD_HPP
#define ZENOPT_MODEL_BUILD_HPP

#include <string>
#include <vector>

#include "zenopt/catalog_io.hpp"
#include "zenopt/cluster.hpp"
#include "zenopt/domain.hpp"
#include "zenopt/ingest.hpp"
#include "zenopt/lp.hpp"

namespace zenopt::model {

// Instantiable (technology, building) and (storage, building) pairs, indices
// into the catalog and site building lists.
struct TechUnit {
    int tech = -1;
    int building = -1;
};
struct StorUnit {
    int storage = -1;
    int building = -1;
};

std::vector<TechUnit> tech_units_for(const Catalog& catalog, const Site& site);
std::vector<StorUnit> stor_units_for(const Catalog& catalog, const Site& site);

struct SystemDesign {
    std::vector<TechUnit> tech_units;
    std::vector<StorUnit> stor_units;
    std::vector<double> tech_capacity;  // kW, aligned with tech_units
    std::vector<double> stor_capacity;  // kWh
    std::vector<char> tech_built;
    std::vector<char> stor_built;
    bool hg_built = false;
    double objective = 0.0;  // investment-run objective, for reporting
    double invest_cost = 0.0;
    double operation_cost = 0.0;  // discounted, as in the objective
};

void save_design(const SystemDesign& d, const Catalog& catalog, const Site& site,
                 const std::string& path);
SystemDesign load_design(const std::string& path, const Catalog& catalog, const Site& site);

// One hour of driving data; loads are per site building.
struct HourData {
    double spot = 0.0;
    double co2_el = 0.0;
    double temperature = 0.0;
    double irradiance = 0.0;
    std::vector<double> load_e, load_sh, load_dhw;
};

// A run of hours: either chronologically linked storage (MPC windows) or a
// cyclic representative day (clusters), weighted in objective and emissions.
struct Segment {
    std::vector<HourData> hours;
    bool cyclic = false;
    double weight = 1.0;
    int cluster_index = -1;  // metadata
    int start_hour = -1;     // chronological index of hours[0], when applicable
};

Segment segment_from_scenario(const ScenarioYear& scenario, int t0, int t1);
void append_scenario_hours(Segment& seg, const ScenarioYear& scenario, int t0, int t1);
std::vector<Segment> segments_from_clusters(const ClusterSet& clusters);

// Column handles for one built hour; -1 marks variables that do not exist
// for the unit/building in question.
struct HourVars {
    int y_imp = -1;
    int y_exp = -1;
    std::vector<int> heat_sh, heat_dhw;       // per tech unit
    std::vector<int> fuel, elec_sh, elec_dhw;  // per tech unit
    std::vector<int> gen, gen_self, gen_charge, gen_dump, gen_export, curtail;
    std::vector<int> onoff, prodcap;
    std::vector<int> stor_ch_sh, stor_ch_dhw, stor_dch_sh, stor_dch_dhw;  // heat, buildings
    std::vector<int> stor_ch, stor_dch;                                   // plant heat storage
    std::vector<int> stor_grid_imp, stor_export, stor_charge_gen, stor_dch_self;  // batteries
    std::vector<int> stor_level;  // all storages
    std::vector<int> heat_dump;   // per building
    std::vector<int> hg_used, hg_used_sh, hg_used_dhw;  // per building
    std::vector<int> hg_trans;                          // per pipe
};

struct SegmentVars {
    std::vector<HourVars> hours;
};

struct PenaltyVars {
    bool attached = false;
    int em_within = -1, em_11 = -1, em_15 = -1, em_sup = -1;
    int comp_0 = -1, comp_05 = -1, comp_09 = -1;
    int b0 = -1, b05 = -1, b09 = -1, bsup = -1;
    double em_target = 0.0, comp_target = 0.0;
};

struct ModelInstance {
    lp::Model lp;
    const Catalog* catalog = nullptr;
    const Site* site = nullptr;
    std::vector<TechUnit> tech_units;
    std::vector<StorUnit> stor_units;
    std::vector<Segment> segments;  // driving data (copied)
    std::vector<SegmentVars> vars;

    bool invest = false;
    std::vector<int> x_tech, b_tech, x_stor, b_stor;  // investment columns
    int b_hg = -1;

    // Fixed design for operation models.
    SystemDesign design;

    // Weighted emission/compensation expressions (Eq. 2 sides) over all
    // segment hours; used by the ZEB, the penalty block and cross-checks.
    std::vector<std::pair<int, double>> em_terms, comp_terms;

    PenaltyVars penalty;
    int zeb_slack = -1;

    double evaluate(const std::vector<std::pair<int, double>>& terms,
                    const std::vector<double>& x) const {
        double s = 0.0;
        for (auto [j, c] : terms) s += c * x[j];
        return s;
    }
};

struct InvestOptions {
    bool include_zeb = true;
    bool pvlim = false;  // roof-area constraint on solar technologies
};

// Eqs. 1-19 over representative days, sigma-weighted, annualized via the
// annuity factor; investment variables and bounds included.
ModelInstance build_investment_model(const ClusterSet& clusters, const Catalog& catalog,
                                     const Site& site, const InvestOptions& opts = {});

// Same constraint families with capacities fixed to the design and the
// investment terms dropped (Eqs. 20/21). Chronological segments link storage
// from initial_storage; cyclic segments close each day on itself.
ModelInstance build_operation_model(const SystemDesign& design,
                                    const std::vector<Segment>& segments,
                                    const Catalog& catalog, const Site& site,
                                    const std::vector<double>& initial_storage = {});

struct PenaltyDeltas {
    double d1 = 0.03;  // EUR/g, within 10% over the emission target
    double d2 = 3.0;   // 10-50% over
    double d3 = 300.0; // beyond
};

// Tiered deviation costs (Eqs. 22-24): convex bands on the emission side,
// binary-gated shortfall bands on the compensation side.
void attach_emission_penalty(ModelInstance& mi, double em_target, double comp_target,
                             const PenaltyDeltas& deltas = {});

// Receding annual balance (Eq. 26) with running accumulators and a slack
// penalized at 10*d3 per gram.
void attach_receding_zeb(ModelInstance& mi, double em_so_far, double comp_so_far,
                         double delta3 = 300.0);

lp::SolveResult solve(const ModelInstance& mi, double mipgap = 0.01,
                      double time_limit_s = 600.0);

SystemDesign design_from_solution(const ModelInstance& mi, const lp::SolveResult& r);

}  // namespace zenopt::model

#endif
