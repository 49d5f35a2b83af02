#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zenopt/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"zenopt - zero-emission neighborhood design and operation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may appear after the subcommand

    zenopt::cli::GlobalOptions g;
    app.add_option("--manifest", g.manifest_path, "run manifest (JSON)")->required();
    app.add_option("--out", g.out_dir, "output directory (overrides the manifest)");
    app.add_option("--mipgap", g.mipgap, "relative MIP gap (overrides the manifest)");
    app.add_option("--seed", g.seed, "random seed (overrides the manifest)");
    app.add_option("--log-level", g.log_level, "info|quiet");

    // stats
    auto* stats = app.add_subcommand("stats", "input-year statistics (boxplot/duration/density)");
    int stats_year = 0;
    std::vector<std::string> stats_roles;
    stats->add_option("--year", stats_year, "scenario year")->required();
    stats->add_option("--roles", stats_roles,
                      "restrict to roles (spot co2_el temperature irradiance)");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "load and validate one scenario year");
    int ingest_year = 0;
    ingest->add_option("--year", ingest_year, "scenario year")->required();

    // invest
    auto* invest = app.add_subcommand("invest", "solve the investment MILP on the reference year");
    std::string invest_case = "base";
    int invest_clusters = 0;
    std::string dump_model;
    invest->add_option("--case", invest_case, "base|pvlim (pvlim adds the roof-area bound)");
    invest->add_option("--clusters", invest_clusters, "representative days (default: manifest)");
    invest->add_option("--dump-model", dump_model, "write the model in LP format");

    // operate
    auto* operate = app.add_subcommand("operate", "run an operation strategy over a year");
    std::string design_path;
    std::vector<std::string> strategies;
    std::vector<int> years;
    int reference_year = 0, step = 0, tmpc = 0, jobs = 1;
    std::string targets_path;
    operate->add_option("--design", design_path, "design file from 'invest'")->required();
    operate->add_option("--strategy", strategies, "pf|empc|eme-mpc|rh-mpc (repeatable)")
        ->required();
    operate->add_option("--year", years, "operation year (repeatable)")->required();
    operate->add_option("--reference-year", reference_year,
                        "reference year for rh-mpc tails and eme-mpc targets");
    operate->add_option("--step", step, "implemented hours per iteration");
    operate->add_option("--tmpc", tmpc, "MPC horizon length in hours");
    operate->add_option("--targets", targets_path, "horizon targets CSV for eme-mpc");
    operate->add_option("--jobs", jobs, "parallel (strategy, year) runs");

    // report
    auto* report = app.add_subcommand("report", "cross-run comparison table");
    std::vector<std::string> run_dirs;
    std::string report_out;
    report->add_option("runs", run_dirs, "run directories (containing summary.json)");
    report->add_option("--out-file", report_out, "report CSV path");

    // synth
    auto* synth = app.add_subcommand("synth", "generate the bundled synthetic input years");
    std::vector<int> synth_years;
    synth->add_option("--year", synth_years, "years to generate (default 2015..2018)");

    CLI11_PARSE(app, argc, argv);

    if (stats->parsed()) return zenopt::cli::cmd_stats(g, stats_year, stats_roles);
    if (ingest->parsed()) return zenopt::cli::cmd_ingest(g, ingest_year);
    if (invest->parsed())
        return zenopt::cli::cmd_invest(g, invest_case, invest_clusters, dump_model);
    if (operate->parsed())
        return zenopt::cli::cmd_operate(g, design_path, strategies, years, reference_year, step,
                                        tmpc, targets_path, jobs);
    if (report->parsed()) return zenopt::cli::cmd_report(g, run_dirs, report_out);
    if (synth->parsed()) return zenopt::cli::cmd_synth(g, synth_years);
    return zenopt::cli::kUsageError;
}
