#include "zenopt/lp.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace zenopt::lp {

const char* row_family_name(RowFamily f) {
    switch (f) {
        case RowFamily::Generic: return "generic";
        case RowFamily::ElecBalance: return "elec_balance";
        case RowFamily::DhwBalance: return "dhw_balance";
        case RowFamily::ShBalance: return "sh_balance";
        case RowFamily::PlantBalance: return "plant_balance";
        case RowFamily::PipeFlowLimit: return "pipe_flow_limit";
        case RowFamily::NoReinjection: return "no_reinjection";
        case RowFamily::HgUseSplit: return "hg_use_split";
        case RowFamily::HgUseDef: return "hg_use_def";
        case RowFamily::HgInvestGate: return "hg_invest_gate";
        case RowFamily::GridConnection: return "grid_connection";
        case RowFamily::ExportDef: return "export_def";
        case RowFamily::FuelLink: return "fuel_link";
        case RowFamily::ElecLink: return "elec_link";
        case RowFamily::ChpRatio: return "chp_ratio";
        case RowFamily::HeatSplit: return "heat_split";
        case RowFamily::SolarDef: return "solar_def";
        case RowFamily::HeatPumpCap: return "heat_pump_cap";
        case RowFamily::PartLoad: return "part_load";
        case RowFamily::InvestBound: return "invest_bound";
        case RowFamily::GenSplit: return "gen_split";
        case RowFamily::BatteryRouting: return "battery_routing";
        case RowFamily::StorageDynamics: return "storage_dynamics";
        case RowFamily::StorageBound: return "storage_bound";
        case RowFamily::StorageRate: return "storage_rate";
        case RowFamily::Zeb: return "zero_emission_balance";
        case RowFamily::RecedingZeb: return "receding_zeb";
        case RowFamily::PenaltyDef: return "penalty_def";
        case RowFamily::PenaltyTier: return "penalty_tier";
        case RowFamily::RoofArea: return "roof_area";
    }
    return "unknown";
}

const char* var_role_name(VarRole r) {
    switch (r) {
        case VarRole::Generic: return "v";
        case VarRole::Invest: return "x";
        case VarRole::InvestBinary: return "b";
        case VarRole::HgBinary: return "bHG";
        case VarRole::Import: return "yimp";
        case VarRole::Export: return "yexp";
        case VarRole::Fuel: return "f";
        case VarRole::ElecUse: return "d";
        case VarRole::ElecUseSh: return "dSH";
        case VarRole::ElecUseDhw: return "dDHW";
        case VarRole::Gen: return "g";
        case VarRole::GenSelf: return "gselfc";
        case VarRole::GenCharge: return "gch";
        case VarRole::GenDump: return "gdump";
        case VarRole::GenExport: return "ygexp";
        case VarRole::Curtail: return "gcurt";
        case VarRole::Heat: return "q";
        case VarRole::HeatSh: return "qSH";
        case VarRole::HeatDhw: return "qDHW";
        case VarRole::HeatDump: return "qdump";
        case VarRole::StorCharge: return "qch";
        case VarRole::StorDischarge: return "qdch";
        case VarRole::StorChargeSh: return "qchSH";
        case VarRole::StorChargeDhw: return "qchDHW";
        case VarRole::StorDischargeSh: return "qdchSH";
        case VarRole::StorDischargeDhw: return "qdchDHW";
        case VarRole::StorGridImport: return "ystimp";
        case VarRole::StorExport: return "ystexp";
        case VarRole::StorLevel: return "vstor";
        case VarRole::HgTransfer: return "qHGtrans";
        case VarRole::HgUsed: return "qHGused";
        case VarRole::HgUsedSh: return "qHGusedSH";
        case VarRole::HgUsedDhw: return "qHGusedDHW";
        case VarRole::OnOff: return "o";
        case VarRole::ProdCap: return "xbar";
        case VarRole::EmissionBand: return "Em";
        case VarRole::CompBand: return "Comp";
        case VarRole::TierBinary: return "btier";
        case VarRole::ZebSlack: return "zslack";
    }
    return "v";
}

int Model::add_column(double lb, double ub, double cost, VarMeta meta) {
    if (!(lb <= ub))
        throw std::invalid_argument("lp::Model: column lower bound exceeds upper bound");
    Column c;
    c.lb = lb;
    c.ub = ub;
    c.cost = cost;
    c.meta = meta;
    cols_.push_back(c);
    return static_cast<int>(cols_.size()) - 1;
}

int Model::add_binary(double cost, VarMeta meta) {
    int j = add_column(0.0, 1.0, cost, meta);
    cols_[j].binary = true;
    return j;
}

int Model::add_row(double lo, double hi, RowMeta meta) {
    if (!(lo <= hi)) throw std::invalid_argument("lp::Model: empty row range");
    row_lo_.push_back(lo);
    row_hi_.push_back(hi);
    row_meta_.push_back(meta);
    terms_.emplace_back();
    return static_cast<int>(row_lo_.size()) - 1;
}

void Model::add_term(int row, int col, double coeff) {
    if (coeff == 0.0) return;
    if (!std::isfinite(coeff))
        throw std::invalid_argument("lp::Model: non-finite constraint coefficient");
    terms_[row].emplace_back(col, coeff);
}

void Model::add_objective(int col, double coeff) {
    if (!std::isfinite(coeff))
        throw std::invalid_argument("lp::Model: non-finite objective coefficient");
    cols_[col].cost += coeff;
}

void Model::set_bounds(int col, double lb, double ub) {
    if (!(lb <= ub)) throw std::invalid_argument("lp::Model: bad bounds");
    cols_[col].lb = lb;
    cols_[col].ub = ub;
}

double Model::row_activity(int i, std::span<const double> x) const {
    double a = 0.0;
    for (auto [j, c] : terms_[i]) a += c * x[j];
    return a;
}

double Model::objective_value(std::span<const double> x) const {
    double z = objective_offset;
    for (int j = 0; j < num_cols(); ++j) z += cols_[j].cost * x[j];
    return z;
}

double max_violation(const Model& model, std::span<const double> x) {
    double worst = 0.0;
    for (int j = 0; j < model.num_cols(); ++j) {
        const Column& c = model.col(j);
        if (c.lb != -kInf) worst = std::max(worst, c.lb - x[j]);
        if (c.ub != kInf) worst = std::max(worst, x[j] - c.ub);
        if (c.binary) worst = std::max(worst, std::abs(x[j] - std::round(x[j])));
    }
    for (int i = 0; i < model.num_rows(); ++i) {
        double a = model.row_activity(i, x);
        if (model.row_lo(i) != -kInf) worst = std::max(worst, model.row_lo(i) - a);
        if (model.row_hi(i) != kInf) worst = std::max(worst, a - model.row_hi(i));
    }
    return worst;
}

namespace {
std::string var_name(const Model& m, int j) {
    const VarMeta& meta = m.col(j).meta;
    std::string s = var_role_name(meta.role);
    auto app = [&s](const char* tag, int v) {
        if (v >= 0) {
            s += '_';
            s += tag;
            s += std::to_string(v);
        }
    };
    app("i", meta.tech);
    app("s", meta.storage);
    app("b", meta.building);
    app("c", meta.building2);
    app("k", meta.cluster);
    app("t", meta.time);
    app("r", meta.tier);
    s += "_x" + std::to_string(j);
    return s;
}

void write_expr(const Model& m, const std::vector<std::pair<int, double>>& terms,
                std::ostream& os) {
    bool first = true;
    for (auto [j, c] : terms) {
        if (c >= 0 && !first) os << " + ";
        if (c < 0) os << (first ? "- " : " - ");
        double a = std::abs(c);
        if (a != 1.0) os << a << " ";
        os << var_name(m, j);
        first = false;
    }
    if (first) os << "0";
}
}  // namespace

void write_lp_format(const Model& model, std::ostream& os) {
    os << "\\ zenopt model: " << model.num_cols() << " cols, " << model.num_rows()
       << " rows\nMinimize\n obj: ";
    std::vector<std::pair<int, double>> obj;
    for (int j = 0; j < model.num_cols(); ++j)
        if (model.col(j).cost != 0.0) obj.emplace_back(j, model.col(j).cost);
    write_expr(model, obj, os);
    os << "\nSubject To\n";
    for (int i = 0; i < model.num_rows(); ++i) {
        const RowMeta& meta = model.row_meta(i);
        std::string base = std::string(row_family_name(meta.family)) + "_r" + std::to_string(i);
        double lo = model.row_lo(i), hi = model.row_hi(i);
        if (lo == hi) {
            os << " " << base << ": ";
            write_expr(model, model.row_terms(i), os);
            os << " = " << lo << "\n";
        } else {
            if (hi != kInf) {
                os << " " << base << "_u: ";
                write_expr(model, model.row_terms(i), os);
                os << " <= " << hi << "\n";
            }
            if (lo != -kInf) {
                os << " " << base << "_l: ";
                write_expr(model, model.row_terms(i), os);
                os << " >= " << lo << "\n";
            }
        }
    }
    os << "Bounds\n";
    for (int j = 0; j < model.num_cols(); ++j) {
        const Column& c = model.col(j);
        os << " ";
        if (c.lb == -kInf)
            os << "-inf";
        else
            os << c.lb;
        os << " <= " << var_name(model, j) << " <= ";
        if (c.ub == kInf)
            os << "+inf";
        else
            os << c.ub;
        os << "\n";
    }
    bool any_bin = false;
    for (int j = 0; j < model.num_cols(); ++j) any_bin |= model.col(j).binary;
    if (any_bin) {
        os << "Binaries\n";
        for (int j = 0; j < model.num_cols(); ++j)
            if (model.col(j).binary) os << " " << var_name(model, j) << "\n";
    }
    os << "End\n";
}

}  // namespace zenopt::lp
