#include "zenopt/commands.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "zenopt/cluster.hpp"
#include "zenopt/dispatch.hpp"
#include "zenopt/ledger.hpp"
#include "zenopt/manifest.hpp"
#include "zenopt/model_build.hpp"
#include "zenopt/stats.hpp"
#include "zenopt/strategies.hpp"
#include "zenopt/synth.hpp"

namespace zenopt::cli {

namespace fs = std::filesystem;

namespace {

struct Context {
    RunManifest manifest;
    LoadedInputs inputs;
    std::string out_dir;
    bool quiet = false;
};

Context make_context(const GlobalOptions& g) {
    if (g.manifest_path.empty())
        throw std::runtime_error("a manifest is required (--manifest <path>)");
    Context ctx{load_run_manifest(g.manifest_path), {}, {}, g.log_level == "quiet"};
    if (g.mipgap >= 0) ctx.manifest.strategy.mipgap = g.mipgap;
    if (g.seed >= 0) {
        ctx.manifest.seed = static_cast<std::uint64_t>(g.seed);
        ctx.manifest.strategy.seed = ctx.manifest.seed;
    }
    ctx.inputs = load_inputs(ctx.manifest);
    ctx.out_dir = g.out_dir.empty() ? ctx.manifest.resolve(ctx.manifest.output_dir) : g.out_dir;
    fs::create_directories(ctx.out_dir);
    return ctx;
}

void info(const Context& ctx, const std::string& msg) {
    if (!ctx.quiet) std::cerr << msg << "\n";
}

void write_targets_csv(const strategy::HorizonTargets& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "t0,em_target_g,comp_target_g\n";
    for (std::size_t i = 0; i < t.em.size(); ++i)
        out << i << "," << t.em[i] << "," << t.comp[i] << "\n";
}

strategy::HorizonTargets load_targets_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open targets file '" + path + "'");
    strategy::HorizonTargets t;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string f0, f1, f2;
        std::getline(row, f0, ',');
        std::getline(row, f1, ',');
        std::getline(row, f2, ',');
        t.em.push_back(std::stod(f1));
        t.comp.push_back(std::stod(f2));
    }
    return t;
}

}  // namespace

int cmd_stats(const GlobalOptions& g, int year, const std::vector<std::string>& roles) {
    try {
        Context ctx = make_context(g);
        ScenarioYear s = load_scenario(ctx.inputs.scenarios, year, ctx.inputs.site.buildings);
        YearStats stats = year_stats(s);
        auto written = write_year_stats(stats, ctx.out_dir, roles);
        info(ctx, "stats: wrote " + std::to_string(written.size()) + " files to " + ctx.out_dir);
        std::cout << written.size() << " files\n";
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "stats: " << e.what() << "\n";
        return kUsageError;
    }
}

int cmd_ingest(const GlobalOptions& g, int year) {
    try {
        Context ctx = make_context(g);
        ScenarioYear s = load_scenario(ctx.inputs.scenarios, year, ctx.inputs.site.buildings);
        double e_sum = 0, sh_sum = 0, dhw_sum = 0;
        for (const auto& L : s.loads) {
            for (double v : L.electric) e_sum += v;
            for (double v : L.space_heat) sh_sum += v;
            for (double v : L.dhw) dhw_sum += v;
        }
        std::cout << "year " << year << (s.reference ? " (reference)" : "") << ": 8760 hours, "
                  << s.loads.size() << " buildings, electric " << e_sum / 1e3 << " MWh, SH "
                  << sh_sum / 1e3 << " MWh, DHW " << dhw_sum / 1e3 << " MWh\n";
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "ingest: " << e.what() << "\n";
        return kUsageError;
    }
}

int cmd_invest(const GlobalOptions& g, const std::string& casename, int clusters,
               const std::string& dump_model_path) {
    Context ctx;
    try {
        ctx = make_context(g);
    } catch (const std::exception& e) {
        std::cerr << "invest: " << e.what() << "\n";
        return kUsageError;
    }
    try {
        if (casename != "base" && casename != "pvlim")
            throw std::invalid_argument("case must be 'base' or 'pvlim'");
        int year = ctx.manifest.reference_year;
        ScenarioYear ref = load_scenario(ctx.inputs.scenarios, year, ctx.inputs.site.buildings);
        int k = clusters > 0 ? clusters : ctx.manifest.invest_clusters;
        info(ctx, "invest: clustering reference year " + std::to_string(year) + " into " +
                      std::to_string(k) + " representative days");
        ClusterSet cs = cluster_days(ref, ctx.inputs.site.buildings, k, ctx.manifest.seed);
        model::InvestOptions opts;
        opts.pvlim = casename == "pvlim";
        auto mi = model::build_investment_model(cs, ctx.inputs.catalog, ctx.inputs.site, opts);
        if (!dump_model_path.empty()) {
            std::ofstream dump(dump_model_path);
            lp::write_lp_format(mi.lp, dump);
        }
        info(ctx, "invest: solving MILP (" + std::to_string(mi.lp.num_cols()) + " cols, " +
                      std::to_string(mi.lp.num_rows()) + " rows, mipgap " +
                      std::to_string(ctx.manifest.strategy.mipgap) + ")");
        auto r = model::solve(mi, ctx.manifest.strategy.mipgap,
                              ctx.manifest.strategy.time_limit_s);
        if (!r.feasible()) {
            std::cerr << "invest: infeasible"
                      << (r.infeasible_hint.empty() ? "" : " (" + r.infeasible_hint + ")")
                      << "\n";
            return kInfeasible;
        }
        auto design = model::design_from_solution(mi, r);
        std::string design_path = ctx.out_dir + "/design_" + casename + ".json";
        model::save_design(design, ctx.inputs.catalog, ctx.inputs.site, design_path);
        save_cluster_set(cs, ctx.out_dir + "/clusters_" + casename + ".json");

        auto rec = model::extract_dispatch(mi, r);
        model::write_dispatch_csv(rec, ctx.out_dir + "/invest_dispatch_" + casename + ".csv");
        auto led = account(rec, ctx.inputs.catalog);
        write_ledger_csv(led, ctx.out_dir + "/invest_ledger_" + casename + ".csv");
        auto expanded = strategy::expand_clustered_dispatch(rec, cs);
        auto targets = strategy::compute_horizon_targets(expanded, ctx.inputs.catalog,
                                                         ctx.manifest.strategy.t_mpc);
        write_targets_csv(targets, ctx.out_dir + "/targets_" + casename + ".csv");

        RunSummary sum;
        sum.label = "invest_" + casename;
        sum.strategy = "invest";
        sum.year = year;
        sum.total_cost = r.objective;
        sum.disc_operation_cost = design.operation_cost;
        sum.emissions_g = led.total_emissions();
        sum.compensations_g = led.total_compensations();
        sum.zeb_gap_g = zeb_gap(led);
        sum.mipgap = r.gap;
        save_summary(sum, ctx.out_dir + "/invest_summary_" + casename + ".json");
        std::cout << "objective " << r.objective << " EUR (investment " << design.invest_cost
                  << ", operation " << design.operation_cost << "), emissions "
                  << led.total_emissions() / 1e6 << " t, gap " << r.gap << "\n";
        info(ctx, "invest: design written to " + design_path);
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "invest: " << e.what() << "\n";
        return kUsageError;
    }
}

namespace {

struct OperateTask {
    std::string strategy;
    int year = 0;
};

int run_one(const Context& ctx, const model::SystemDesign& design,
            const strategy::StrategyConfig& base_cfg, const OperateTask& task,
            int reference_year, const strategy::HorizonTargets* targets, std::mutex& io) {
    strategy::StrategyConfig cfg = base_cfg;
    strategy::RunResult res;
    if (task.strategy == "pf") {
        ScenarioYear s =
            load_scenario(ctx.inputs.scenarios, task.year, ctx.inputs.site.buildings);
        res = strategy::run_perfect_foresight(design, s, ctx.inputs.catalog, ctx.inputs.site,
                                              cfg);
    } else if (task.strategy == "empc") {
        ScenarioYear s =
            load_scenario(ctx.inputs.scenarios, task.year, ctx.inputs.site.buildings);
        res = strategy::run_empc(design, s, ctx.inputs.catalog, ctx.inputs.site, cfg);
    } else if (task.strategy == "eme-mpc") {
        ScenarioYear s =
            load_scenario(ctx.inputs.scenarios, task.year, ctx.inputs.site.buildings);
        res = strategy::run_eme_mpc(design, s, *targets, ctx.inputs.catalog, ctx.inputs.site,
                                    cfg);
    } else if (task.strategy == "rh-mpc") {
        ScenarioYear s =
            load_scenario(ctx.inputs.scenarios, task.year, ctx.inputs.site.buildings);
        ScenarioYear ref =
            load_scenario(ctx.inputs.scenarios, reference_year, ctx.inputs.site.buildings);
        res = strategy::run_rh_mpc(design, s, ref, ctx.inputs.catalog, ctx.inputs.site, cfg);
    } else {
        throw std::invalid_argument("unknown strategy '" + task.strategy + "'");
    }

    std::string dir = ctx.out_dir + "/" + task.strategy + "_" + std::to_string(task.year);
    fs::create_directories(dir);
    model::write_dispatch_csv(res.dispatch, dir + "/dispatch.csv");
    write_ledger_csv(res.ledger, dir + "/ledger.csv");
    res.summary.label = task.strategy + "_" + std::to_string(task.year);
    save_summary(res.summary, dir + "/summary.json");
    if (!res.slack_trace.empty()) {
        std::ofstream out(dir + "/slack_trace.csv");
        out << "iteration,slack_g\n";
        for (std::size_t i = 0; i < res.slack_trace.size(); ++i)
            out << i << "," << res.slack_trace[i] << "\n";
    }
    if (!res.penalty_trace.empty()) {
        std::ofstream out(dir + "/penalty_trace.csv");
        out << "t0,penalty_eur,active_tier\n";
        for (const auto& p : res.penalty_trace)
            out << p.t0 << "," << p.cost << "," << p.active_tier << "\n";
    }
    std::lock_guard<std::mutex> lock(io);
    std::cout << res.summary.label << ": cost " << res.summary.total_cost << " EUR, emissions "
              << res.summary.emissions_g / 1e6 << " t, compensations "
              << res.summary.compensations_g / 1e6 << " t, gap "
              << res.summary.zeb_gap_g / 1e6 << " t, wall " << res.summary.wall_time_s
              << " s\n";
    return kOk;
}

}  // namespace

int cmd_operate(const GlobalOptions& g, const std::string& design_path,
                const std::vector<std::string>& strategies, const std::vector<int>& years,
                int reference_year, int step, int tmpc, const std::string& targets_path,
                int jobs) {
    Context ctx;
    try {
        ctx = make_context(g);
        for (const auto& s : strategies)
            if (s != "pf" && s != "empc" && s != "eme-mpc" && s != "rh-mpc")
                throw std::invalid_argument(
                    "unknown strategy '" + s +
                    "' (expected pf, empc, eme-mpc or rh-mpc)");
        if (strategies.empty() || years.empty())
            throw std::invalid_argument("at least one strategy and year are required");
    } catch (const std::exception& e) {
        std::cerr << "operate: " << e.what() << "\nusage: zenopt operate --design <file> "
                     "--strategy {pf|empc|eme-mpc|rh-mpc} --year <y> [--reference-year y] "
                     "[--step n] [--tmpc n] [--targets f] [--jobs n]\n";
        return kUsageError;
    }
    try {
        auto design = model::load_design(ctx.manifest.resolve(design_path), ctx.inputs.catalog,
                                         ctx.inputs.site);
        int ref_year = reference_year > 0 ? reference_year : ctx.manifest.reference_year;

        strategy::HorizonTargets targets;
        bool need_targets = false;
        for (const auto& s : strategies) need_targets |= s == "eme-mpc";
        if (need_targets) {
            std::string tp = targets_path;
            if (tp.empty()) {
                fs::path guess = fs::path(ctx.manifest.resolve(design_path)).parent_path() /
                                 ("targets_" +
                                  fs::path(design_path).stem().string().substr(7) + ".csv");
                tp = guess.string();
            }
            if (fs::exists(tp)) {
                targets = load_targets_csv(tp);
                info(ctx, "operate: horizon targets from " + tp);
            } else {
                info(ctx,
                     "operate: no targets file; deriving targets from a perfect-foresight "
                     "run on the reference year");
                ScenarioYear ref =
                    load_scenario(ctx.inputs.scenarios, ref_year, ctx.inputs.site.buildings);
                auto pf = strategy::run_perfect_foresight(design, ref, ctx.inputs.catalog,
                                                          ctx.inputs.site, ctx.manifest.strategy);
                auto expanded = strategy::expand_clustered_dispatch(pf.dispatch, pf.clusters);
                targets = strategy::compute_horizon_targets(
                    expanded, ctx.inputs.catalog,
                    tmpc > 0 ? tmpc : ctx.manifest.strategy.t_mpc);
            }
        }

        std::vector<OperateTask> tasks;
        for (const auto& s : strategies)
            for (int y : years) tasks.push_back({s, y});

        std::mutex io;
        std::atomic<int> next{0};
        std::atomic<int> failures{0};
        int nthreads = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
        auto worker = [&]() {
            while (true) {
                int i = next.fetch_add(1);
                if (i >= static_cast<int>(tasks.size())) return;
                strategy::StrategyConfig cfg = ctx.manifest.strategy;
                if (tmpc > 0) cfg.t_mpc = tmpc;
                cfg.implement_hours = tasks[i].strategy == "rh-mpc"
                                          ? ctx.manifest.rh_implement_hours
                                          : ctx.manifest.strategy.implement_hours;
                if (step > 0) cfg.implement_hours = step;
                cfg.implement_hours = std::min(cfg.implement_hours, cfg.t_mpc);
                try {
                    run_one(ctx, design, cfg, tasks[i], ref_year,
                            need_targets ? &targets : nullptr, io);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(io);
                    std::cerr << "operate: " << tasks[i].strategy << "_" << tasks[i].year
                              << ": " << e.what() << "\n";
                    ++failures;
                }
            }
        };
        std::vector<std::thread> pool;
        for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
        return failures == 0 ? kOk : kOperateError;
    } catch (const std::exception& e) {
        std::cerr << "operate: " << e.what() << "\n";
        return kOperateError;
    }
}

int cmd_report(const GlobalOptions& g, const std::vector<std::string>& run_dirs,
               const std::string& out_file) {
    try {
        Context ctx = make_context(g);
        if (run_dirs.empty()) {
            std::cerr << "report: no run directories given\n";
            return kUsageError;
        }
        std::vector<RunSummary> runs;
        for (const auto& dir : run_dirs) {
            std::string p = ctx.manifest.resolve(dir) + "/summary.json";
            if (!fs::exists(p)) p = ctx.manifest.resolve(dir);  // direct summary path
            runs.push_back(load_summary(p));
        }
        std::vector<std::pair<std::string, double>> refs(ctx.manifest.reference_lines.begin(),
                                                         ctx.manifest.reference_lines.end());
        std::string out = out_file.empty() ? ctx.out_dir + "/report.csv" : out_file;
        write_report_csv(runs, out, refs);
        std::cout << "report: " << runs.size() << " runs -> " << out << "\n";
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "report: " << e.what() << "\n";
        return kUsageError;
    }
}

int cmd_synth(const GlobalOptions& g, const std::vector<int>& years) {
    try {
        if (g.manifest_path.empty())
            throw std::runtime_error("a manifest is required (--manifest <path>)");
        RunManifest manifest = load_run_manifest(g.manifest_path);
        if (g.seed >= 0) manifest.seed = static_cast<std::uint64_t>(g.seed);
        Site site = load_site(manifest.resolve(manifest.site_path));
        std::string dir = fs::path(manifest.resolve(manifest.scenarios_path)).parent_path();
        std::vector<int> ys = years;
        if (ys.empty()) ys = {2015, 2016, 2017, 2018};
        for (int y : ys) {
            ScenarioYear s = synth_scenario(y, site.buildings, manifest.seed);
            write_synth_csvs(s, site.buildings, dir);
            std::cout << "synth: year " << y << " written under " << dir << "\n";
        }
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "synth: " << e.what() << "\n";
        return kUsageError;
    }
}

}  // namespace zenopt::cli
