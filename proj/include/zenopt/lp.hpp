#ifndef ZENOPT_LP_HPP
#define ZENOPT_LP_HPP

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace zenopt::lp {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Roles a decision variable can play in the energy models. The solver never
// looks at these; they exist so dispatch extraction, infeasibility hints and
// the LP-format dump can name things.
enum class VarRole : std::uint8_t {
    Generic,
    Invest,          // x_{i,b}
    InvestBinary,    // b_{i,b}
    HgBinary,        // b_HG
    Import,          // y_imp(t)
    Export,          // y_exp(t), total
    Fuel,            // f_{f,t,b}
    ElecUse,         // d_{e,t,b} (heaters; heat pumps split by service)
    ElecUseSh,
    ElecUseDhw,
    Gen,             // g_{g,t,b}
    GenSelf,         // g^selfc
    GenCharge,       // g^ch
    GenDump,         // g^dump
    GenExport,       // y^exp_{t,g,b}
    Curtail,         // g^curt (PV)
    Heat,            // q_{q,t,b}
    HeatSh,          // q^SH
    HeatDhw,         // q^DHW
    HeatDump,        // q^dump_{t,b}
    StorCharge,      // q^ch / y^ch totals
    StorDischarge,   // q^dch / y^dch totals
    StorChargeSh,
    StorChargeDhw,
    StorDischargeSh,
    StorDischargeDhw,
    StorGridImport,  // y^imp_{t,est,b}
    StorExport,      // y^exp_{t,est,b}
    StorLevel,       // v^stor
    HgTransfer,      // q^HGtrans_{b1,b2,t}
    HgUsed,          // q^HGused
    HgUsedSh,
    HgUsedDhw,
    OnOff,           // o_{i,t,b}
    ProdCap,         // xbar_{i,b,t}
    EmissionBand,    // Em^within / Em^1.1 / Em^1.5 / Em^sup
    CompBand,        // Comp^0 / Comp^0.5 / Comp^0.9
    TierBinary,      // b^0 / b^0.5 / b^0.9 / b^sup
    ZebSlack,        // receding-ZEB relief
};

struct VarMeta {
    VarRole role = VarRole::Generic;
    std::int16_t tech = -1;       // catalog tech index
    std::int16_t storage = -1;    // catalog storage index
    std::int16_t building = -1;   // building index ("plant" included)
    std::int16_t building2 = -1;  // pipe destination
    std::int32_t time = -1;       // hour within window, or hour within cluster day
    std::int32_t cluster = -1;    // cluster index, -1 for chronological hours
    std::int16_t tier = -1;       // penalty band index
};

enum class RowFamily : std::uint8_t {
    Generic,
    ElecBalance,
    DhwBalance,
    ShBalance,
    PlantBalance,
    PipeFlowLimit,
    NoReinjection,
    HgUseSplit,
    HgUseDef,
    HgInvestGate,
    GridConnection,
    ExportDef,
    FuelLink,
    ElecLink,
    ChpRatio,
    HeatSplit,
    SolarDef,
    HeatPumpCap,
    PartLoad,
    InvestBound,
    GenSplit,
    BatteryRouting,
    StorageDynamics,
    StorageBound,
    StorageRate,
    Zeb,
    RecedingZeb,
    PenaltyDef,
    PenaltyTier,
    RoofArea,
};

struct RowMeta {
    RowFamily family = RowFamily::Generic;
    std::int16_t tech = -1;
    std::int16_t storage = -1;
    std::int16_t building = -1;
    std::int32_t time = -1;
    std::int32_t cluster = -1;
};

const char* row_family_name(RowFamily f);
const char* var_role_name(VarRole r);

struct Column {
    double lb = 0.0;
    double ub = kInf;
    double cost = 0.0;
    bool binary = false;
    VarMeta meta;
};

// Sparse linear model: columns with bounds/costs, ranged rows lo <= a.x <= hi.
class Model {
  public:
    int add_column(double lb, double ub, double cost, VarMeta meta = {});
    int add_binary(double cost, VarMeta meta = {});
    // Begin a row; follow with add_term; bounds fixed at creation.
    int add_row(double lo, double hi, RowMeta meta = {});
    void add_term(int row, int col, double coeff);
    void add_objective(int col, double coeff);
    void set_bounds(int col, double lb, double ub);

    int num_cols() const { return static_cast<int>(cols_.size()); }
    int num_rows() const { return static_cast<int>(row_lo_.size()); }
    const Column& col(int j) const { return cols_[j]; }
    double row_lo(int i) const { return row_lo_[i]; }
    double row_hi(int i) const { return row_hi_[i]; }
    const RowMeta& row_meta(int i) const { return row_meta_[i]; }
    const std::vector<std::pair<int, double>>& row_terms(int i) const { return terms_[i]; }

    double objective_offset = 0.0;

    // Activity of row i under values x.
    double row_activity(int i, std::span<const double> x) const;
    double objective_value(std::span<const double> x) const;

  private:
    std::vector<Column> cols_;
    std::vector<double> row_lo_, row_hi_;
    std::vector<RowMeta> row_meta_;
    std::vector<std::vector<std::pair<int, double>>> terms_;
};

enum class SolveStatus { Optimal, FeasibleGap, Infeasible, Unbounded, Error };

struct SolveOptions {
    double mipgap = 0.01;
    double time_limit_s = 600.0;
    long max_lp_iterations = 2'000'000;
    long max_bb_nodes = 200'000;
    bool allow_decomposition = true;
    bool force_decomposition = false;  // tests: bypass the size threshold
    // Absolute feasibility tolerance used by the external re-check.
    double recheck_tol = 1e-6;
};

struct SolveResult {
    SolveStatus status = SolveStatus::Error;
    double objective = 0.0;
    std::vector<double> x;
    double gap = 0.0;              // achieved relative MIP gap
    double max_violation = 0.0;    // external re-check of all rows/bounds
    long lp_iterations = 0;
    long bb_nodes = 0;
    bool used_decomposition = false;
    std::string infeasible_hint;   // constraint family blamed when infeasible

    bool feasible() const {
        return status == SolveStatus::Optimal || status == SolveStatus::FeasibleGap;
    }
};

// Solve the model: presolve, decompose when structure allows, simplex +
// branch&bound otherwise. The returned solution is re-checked against the
// original rows; max_violation reports the worst residual found.
SolveResult solve(const Model& model, const SolveOptions& opts = {});

// Largest absolute bound/row violation of x; used by tests and by solve().
double max_violation(const Model& model, std::span<const double> x);

// Plain-text dump (CPLEX LP flavour) for external inspection.
void write_lp_format(const Model& model, std::ostream& os);

}  // namespace zenopt::lp

#endif
