#ifndef ZENOPT_COMMANDS_HPP
#define ZENOPT_COMMANDS_HPP

#include <string>
#include <vector>

namespace zenopt::cli {

// Exit codes shared by all subcommands.
constexpr int kOk = 0;
constexpr int kUsageError = 2;
constexpr int kInfeasible = 3;
constexpr int kOperateError = 4;

struct GlobalOptions {
    std::string manifest_path;
    std::string out_dir;     // overrides the manifest output_dir
    double mipgap = -1.0;    // < 0: use manifest value
    long long seed = -1;     // < 0: use manifest value
    std::string log_level = "info";
};

int cmd_stats(const GlobalOptions& g, int year, const std::vector<std::string>& roles);
int cmd_ingest(const GlobalOptions& g, int year);
int cmd_invest(const GlobalOptions& g, const std::string& casename, int clusters,
               const std::string& dump_model_path);
int cmd_operate(const GlobalOptions& g, const std::string& design_path,
                const std::vector<std::string>& strategies, const std::vector<int>& years,
                int reference_year, int step, int tmpc, const std::string& targets_path,
                int jobs);
int cmd_report(const GlobalOptions& g, const std::vector<std::string>& run_dirs,
               const std::string& out_file);
int cmd_synth(const GlobalOptions& g, const std::vector<int>& years);

}  // namespace zenopt::cli

#endif
