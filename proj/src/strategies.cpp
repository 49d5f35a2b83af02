#include "zenopt/strategies.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>

namespace zenopt::strategy {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::runtime_error(what); }

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

RunSummary summarize(const std::string& strategy, int year,
                     const model::DispatchRecord& dispatch, const EmissionLedger& ledger,
                     const Site& site, const StrategyConfig& cfg) {
    RunSummary s;
    s.strategy = strategy;
    s.year = year;
    s.total_cost = dispatch.total_cost();
    s.disc_operation_cost =
        annuity_factor(site.economics.discount_rate, site.economics.study_years) * s.total_cost;
    s.emissions_g = ledger.total_emissions();
    s.compensations_g = ledger.total_compensations();
    s.zeb_gap_g = zeb_gap(ledger);
    s.mipgap = cfg.mipgap;
    return s;
}

std::vector<double> end_levels(const model::DispatchRecord& rec, std::size_t hour_idx) {
    return rec.hours[hour_idx].stor_level;
}

}  // namespace

void StrategyConfig::check() const {
    if (t_mpc < 1) fail("strategy config: t_mpc must be at least 1 hour");
    if (implement_hours < 1 || implement_hours > t_mpc)
        fail("strategy config: implement_hours must be in [1, t_mpc]");
    if (pf_clusters < 1 || rh_tail_clusters < 1)
        fail("strategy config: cluster counts must be at least 1");
}

RunResult run_perfect_foresight(const model::SystemDesign& design, const ScenarioYear& scenario,
                                const Catalog& catalog, const Site& site,
                                const StrategyConfig& config) {
    config.check();
    auto start = std::chrono::steady_clock::now();
    RunResult out;
    out.clusters = cluster_days(scenario, site.buildings, config.pf_clusters, config.seed);
    auto segments = model::segments_from_clusters(out.clusters);
    auto mi = model::build_operation_model(design, segments, catalog, site);
    auto r = model::solve(mi, config.mipgap, config.time_limit_s);
    if (!r.feasible())
        fail("perfect foresight: solve failed (" +
             (r.infeasible_hint.empty() ? std::string("status") : r.infeasible_hint) + ")");
    out.dispatch = model::extract_dispatch(mi, r);
    out.ledger = account(out.dispatch, catalog);
    out.summary = summarize("pf", scenario.year, out.dispatch, out.ledger, site, config);
    out.summary.mipgap = r.gap;
    out.summary.wall_time_s = elapsed_s(start);
    return out;
}

model::DispatchRecord expand_clustered_dispatch(const model::DispatchRecord& cluster_dispatch,
                                                const ClusterSet& clusters) {
    if (clusters.empty()) fail("expand_clustered_dispatch: empty cluster set");
    // locate each (cluster, hour) record
    std::map<std::pair<int, int>, std::size_t> at;
    for (std::size_t i = 0; i < cluster_dispatch.hours.size(); ++i) {
        const auto& h = cluster_dispatch.hours[i];
        if (h.cluster >= 0) at[{h.cluster, h.cluster_hour}] = i;
    }
    model::DispatchRecord out;
    out.tech_units = cluster_dispatch.tech_units;
    out.stor_units = cluster_dispatch.stor_units;
    out.tech_names = cluster_dispatch.tech_names;
    out.stor_names = cluster_dispatch.stor_names;
    out.building_names = cluster_dispatch.building_names;
    for (int d = 0; d < clusters.days(); ++d) {
        int c = clusters.day_assignment[d];
        for (int h = 0; h < kHoursPerDay; ++h) {
            auto it = at.find({c, h});
            if (it == at.end()) fail("expand_clustered_dispatch: missing cluster hour");
            model::DispatchHour hour = cluster_dispatch.hours[it->second];
            hour.weight = 1.0;
            hour.cluster = -1;
            hour.cluster_hour = -1;
            hour.hour_index = (clusters.start_day + d) * kHoursPerDay + h;
            out.hours.push_back(std::move(hour));
        }
    }
    return out;
}

HorizonTargets compute_horizon_targets(const model::DispatchRecord& expanded_reference,
                                       const Catalog& catalog, int t_mpc) {
    EmissionLedger led = account(expanded_reference, catalog);
    int n = static_cast<int>(led.emissions_g.size());
    HorizonTargets targets;
    targets.em.resize(n);
    targets.comp.resize(n);
    // sliding-window sums over [t0, t0 + t_mpc)
    double em = 0.0, comp = 0.0;
    int hi = 0;
    for (int t0 = 0; t0 < n; ++t0) {
        while (hi < std::min(n, t0 + t_mpc)) {
            em += led.emissions_g[hi];
            comp += led.compensations_g[hi];
            ++hi;
        }
        targets.em[t0] = em;
        targets.comp[t0] = comp;
        em -= led.emissions_g[t0];
        comp -= led.compensations_g[t0];
    }
    return targets;
}

namespace {

// Shared E-MPC/EmE-MPC loop; `targets` may be null (pure economic mode).
RunResult mpc_loop(const std::string& label, const model::SystemDesign& design,
                   const ScenarioYear& scenario, const HorizonTargets* targets,
                   const Catalog& catalog, const Site& site, const StrategyConfig& config) {
    config.check();
    auto start = std::chrono::steady_clock::now();
    RunResult out;
    std::vector<double> state = config.initial_storage;
    state.resize(design.stor_units.size(), 0.0);
    double penalty_total = 0.0;

    for (int t0 = 0; t0 < kHoursPerYear; t0 += config.implement_hours) {
        int end = std::min(t0 + config.t_mpc, kHoursPerYear);
        auto seg = model::segment_from_scenario(scenario, t0, end);
        auto mi = model::build_operation_model(design, {seg}, catalog, site, state);
        if (targets) {
            double em_t = targets->em.empty() ? 0.0 : targets->em[t0];
            double comp_t = targets->comp.empty() ? 0.0 : targets->comp[t0];
            model::attach_emission_penalty(mi, em_t, comp_t, config.deltas);
        }
        auto r = model::solve(mi, config.mipgap, config.time_limit_s);
        if (!r.feasible())
            fail(label + ": iteration t0=" + std::to_string(t0) + " failed (" +
                 (r.infeasible_hint.empty() ? "solver" : r.infeasible_hint) + ")");
        auto rec = model::extract_dispatch(mi, r);
        int implement = std::min(config.implement_hours, kHoursPerYear - t0);
        model::append_hours(out.dispatch, rec, 0, implement);
        state = end_levels(rec, implement - 1);
        if (targets) {
            const auto& p = mi.penalty;
            PenaltyStep step;
            step.t0 = t0;
            step.cost = config.deltas.d1 * r.x[p.em_11] + config.deltas.d2 * r.x[p.em_15] +
                        config.deltas.d3 * r.x[p.em_sup] + config.deltas.d3 * r.x[p.comp_0] +
                        config.deltas.d2 * r.x[p.comp_05] + config.deltas.d1 * r.x[p.comp_09];
            for (int tier = 0; tier < 4; ++tier) {
                int col = tier == 0 ? p.b0 : tier == 1 ? p.b05 : tier == 2 ? p.b09 : p.bsup;
                if (r.x[col] > 0.5) step.active_tier = tier;
            }
            penalty_total += step.cost;
            out.penalty_trace.push_back(step);
        }
    }
    out.ledger = account(out.dispatch, catalog);
    out.summary = summarize(label, scenario.year, out.dispatch, out.ledger, site, config);
    out.summary.penalty_cost = penalty_total;
    out.summary.wall_time_s = elapsed_s(start);
    return out;
}

}  // namespace

RunResult run_empc(const model::SystemDesign& design, const ScenarioYear& scenario,
                   const Catalog& catalog, const Site& site, const StrategyConfig& config) {
    return mpc_loop("empc", design, scenario, nullptr, catalog, site, config);
}

RunResult run_eme_mpc(const model::SystemDesign& design, const ScenarioYear& scenario,
                      const HorizonTargets& targets, const Catalog& catalog, const Site& site,
                      const StrategyConfig& config) {
    if (static_cast<int>(targets.em.size()) < kHoursPerYear ||
        static_cast<int>(targets.comp.size()) < kHoursPerYear)
        fail("eme-mpc: targets must cover every horizon start");
    return mpc_loop("eme-mpc", design, scenario, &targets, catalog, site, config);
}

RunResult run_rh_mpc(const model::SystemDesign& design, const ScenarioYear& scenario,
                     const ScenarioYear& reference, const Catalog& catalog, const Site& site,
                     const StrategyConfig& config) {
    config.check();
    auto start = std::chrono::steady_clock::now();
    RunResult out;
    std::vector<double> state = config.initial_storage;
    state.resize(design.stor_units.size(), 0.0);
    double em_so_far = 0.0, comp_so_far = 0.0;
    std::map<int, ClusterSet> tail_cache;  // keyed by start day

    for (int t0 = 0; t0 < kHoursPerYear; t0 += config.implement_hours) {
        int window_end = std::min(t0 + config.t_mpc, kHoursPerYear);
        // actual-year window
        auto seg = model::segment_from_scenario(scenario, t0, window_end);
        // reference-year bridge to the next midnight
        int bridge_end = std::min(((window_end + 23) / 24) * 24, kHoursPerYear);
        if (bridge_end > window_end)
            model::append_scenario_hours(seg, reference, window_end, bridge_end);
        std::vector<model::Segment> segments{seg};
        // reclustered remainder of the reference year
        int start_day = bridge_end / 24;
        if (start_day < kDaysPerYear) {
            auto it = tail_cache.find(start_day);
            if (it == tail_cache.end()) {
                std::uint64_t tail_seed =
                    config.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(start_day);
                ClusterSet tail = recluster_remainder(reference, site.buildings, start_day,
                                                      config.rh_tail_clusters, tail_seed);
                it = tail_cache.emplace(start_day, std::move(tail)).first;
            }
            for (auto& s : model::segments_from_clusters(it->second))
                segments.push_back(std::move(s));
        }
        auto mi = model::build_operation_model(design, segments, catalog, site, state);
        model::attach_receding_zeb(mi, em_so_far, comp_so_far, config.deltas.d3);
        auto r = model::solve(mi, config.mipgap, config.time_limit_s);
        if (!r.feasible())
            fail("rh-mpc: iteration t0=" + std::to_string(t0) + " failed (" +
                 (r.infeasible_hint.empty() ? "solver" : r.infeasible_hint) + ")");
        auto rec = model::extract_dispatch(mi, r);
        int implement = std::min(config.implement_hours, kHoursPerYear - t0);
        model::append_hours(out.dispatch, rec, 0, implement);
        state = end_levels(rec, implement - 1);
        for (int i = 0; i < implement; ++i) {
            HourEmissions he = hour_emissions(rec.hours[i], rec.tech_units, rec.stor_units,
                                              catalog);
            em_so_far += he.emissions_g;
            comp_so_far += he.compensations_g;
        }
        out.slack_trace.push_back(mi.zeb_slack >= 0 ? r.x[mi.zeb_slack] : 0.0);
    }
    out.ledger = account(out.dispatch, catalog);
    out.summary = summarize("rh-mpc", scenario.year, out.dispatch, out.ledger, site, config);
    out.summary.slack_g = out.slack_trace.empty() ? 0.0 : out.slack_trace.back();
    out.summary.wall_time_s = elapsed_s(start);
    return out;
}

}  // namespace zenopt::strategy
