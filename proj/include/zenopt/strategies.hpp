#ifndef ZENOPT_STRATEGIES_HPP
#define ZENOPT_STRATEGIES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "zenopt/catalog_io.hpp"
#include "zenopt/cluster.hpp"
#include "zenopt/dispatch.hpp"
#include "zenopt/ledger.hpp"
#include "zenopt/model_build.hpp"

namespace zenopt::strategy {

struct StrategyConfig {
    int t_mpc = 24;              // horizon length, hours
    int implement_hours = 1;     // 1 for E/EmE-MPC, 6 for RH-MPC
    int pf_clusters = 50;
    int rh_tail_clusters = 30;
    model::PenaltyDeltas deltas; // (0.03, 3, 300) EUR/g
    double mipgap = 0.01;
    double time_limit_s = 600.0;
    std::uint64_t seed = 1;
    std::vector<double> initial_storage;  // per storage unit, kWh; default 0

    void check() const;
};

struct PenaltyStep {
    int t0 = 0;
    double cost = 0.0;   // c_Em + c_Comp at the solution
    int active_tier = -1;  // 0: b0, 1: b05, 2: b09, 3: bsup
};

struct RunResult {
    model::DispatchRecord dispatch;  // chronological for MPC runs; cluster-shaped for PF
    EmissionLedger ledger;
    RunSummary summary;
    std::vector<PenaltyStep> penalty_trace;  // EmE-MPC
    std::vector<double> slack_trace;         // RH-MPC, grams per iteration
    ClusterSet clusters;                     // PF: the representative days used
};

// Per-horizon emission and compensation targets, indexed by t0.
struct HorizonTargets {
    std::vector<double> em;    // gCO2
    std::vector<double> comp;  // gCO2
};

// One clustered full-year solve with daily-cyclic storage (Eq. 20).
RunResult run_perfect_foresight(const model::SystemDesign& design, const ScenarioYear& scenario,
                                const Catalog& catalog, const Site& site,
                                const StrategyConfig& config);

// Rolling 24-hour cost-only dispatch, first hour implemented (Eq. 21).
RunResult run_empc(const model::SystemDesign& design, const ScenarioYear& scenario,
                   const Catalog& catalog, const Site& site, const StrategyConfig& config);

// Hour (d, h) takes the centroid values of day d's cluster.
model::DispatchRecord expand_clustered_dispatch(const model::DispatchRecord& cluster_dispatch,
                                                const ClusterSet& clusters);

// Window sums of the expanded reference dispatch's hourly emission ledger.
HorizonTargets compute_horizon_targets(const model::DispatchRecord& expanded_reference,
                                       const Catalog& catalog, int t_mpc);

// E-MPC plus the tiered deviation penalties of Eqs. 22-24.
RunResult run_eme_mpc(const model::SystemDesign& design, const ScenarioYear& scenario,
                      const HorizonTargets& targets, const Catalog& catalog, const Site& site,
                      const StrategyConfig& config);

// Receding-horizon MPC: actual-year window, reference-year bridge to the next
// midnight, reclustered reference tail, annual ZEB with running accumulators.
RunResult run_rh_mpc(const model::SystemDesign& design, const ScenarioYear& scenario,
                     const ScenarioYear& reference, const Catalog& catalog, const Site& site,
                     const StrategyConfig& config);

}  // namespace zenopt::strategy

#endif
