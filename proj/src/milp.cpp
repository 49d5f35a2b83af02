#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "zenopt/lp.hpp"
#include "zenopt/simplex.hpp"

namespace zenopt::lp {

namespace {

constexpr double kFixTol = 1e-11;
constexpr double kIntTol = 1e-6;

std::string describe_row(const Model& m, int i) {
    const RowMeta& meta = m.row_meta(i);
    std::ostringstream os;
    os << row_family_name(meta.family);
    if (meta.tech >= 0) os << " tech=" << meta.tech;
    if (meta.storage >= 0) os << " storage=" << meta.storage;
    if (meta.building >= 0) os << " building=" << meta.building;
    if (meta.cluster >= 0) os << " cluster=" << meta.cluster;
    if (meta.time >= 0) os << " t=" << meta.time;
    return os.str();
}

struct Presolved {
    bool infeasible = false;
    std::string hint;
    std::vector<double> lb, ub;        // working bounds, original indexing
    std::vector<char> row_alive;
    std::vector<int> red_cols;         // reduced -> original column
    std::vector<int> red_rows;         // reduced -> original row
    std::vector<int> col_map;          // original -> reduced or -1
    CoreLp core;
    std::vector<int> binaries;         // reduced column indices of free binaries
};

bool col_fixed(const Presolved& p, int j) { return p.ub[j] - p.lb[j] <= kFixTol; }

Presolved presolve(const Model& m) {
    Presolved p;
    int n = m.num_cols(), rows = m.num_rows();
    p.lb.resize(n);
    p.ub.resize(n);
    for (int j = 0; j < n; ++j) {
        p.lb[j] = m.col(j).lb;
        p.ub[j] = m.col(j).ub;
    }
    p.row_alive.assign(rows, 1);

    bool changed = true;
    int passes = 0;
    while (changed && passes++ < 50) {
        changed = false;
        for (int i = 0; i < rows; ++i) {
            if (!p.row_alive[i]) continue;
            double fixed_sum = 0.0;
            int live = -1, live_count = 0;
            double live_coeff = 0.0;
            for (auto [j, c] : m.row_terms(i)) {
                if (col_fixed(p, j)) {
                    fixed_sum += c * 0.5 * (p.lb[j] + p.ub[j]);
                } else {
                    ++live_count;
                    live = j;
                    live_coeff = c;
                }
            }
            double lo = m.row_lo(i) == -kInf ? -kInf : m.row_lo(i) - fixed_sum;
            double hi = m.row_hi(i) == kInf ? kInf : m.row_hi(i) - fixed_sum;
            if (live_count == 0) {
                if (lo > 1e-7 || hi < -1e-7) {
                    p.infeasible = true;
                    p.hint = describe_row(m, i);
                    return p;
                }
                p.row_alive[i] = 0;
                changed = true;
            } else if (live_count == 1) {
                double blo = -kInf, bhi = kInf;
                if (live_coeff > 0) {
                    if (lo != -kInf) blo = lo / live_coeff;
                    if (hi != kInf) bhi = hi / live_coeff;
                } else {
                    if (hi != kInf) blo = hi / live_coeff;
                    if (lo != -kInf) bhi = lo / live_coeff;
                }
                double nlb = std::max(p.lb[live], blo);
                double nub = std::min(p.ub[live], bhi);
                if (nlb > nub + 1e-7 * (1.0 + std::abs(nlb))) {
                    p.infeasible = true;
                    p.hint = describe_row(m, i);
                    return p;
                }
                if (nlb > nub) nlb = nub = 0.5 * (nlb + nub);
                if (nlb != p.lb[live] || nub != p.ub[live]) changed = true;
                p.lb[live] = nlb;
                p.ub[live] = nub;
                p.row_alive[i] = 0;
                changed = true;
            }
        }
    }

    // Assemble the reduced problem.
    p.col_map.assign(n, -1);
    for (int j = 0; j < n; ++j) {
        if (col_fixed(p, j)) continue;
        p.col_map[j] = static_cast<int>(p.red_cols.size());
        p.red_cols.push_back(j);
    }
    for (int i = 0; i < rows; ++i)
        if (p.row_alive[i]) p.red_rows.push_back(i);

    int rn = static_cast<int>(p.red_cols.size());
    int rm = static_cast<int>(p.red_rows.size());
    CoreLp& core = p.core;
    core.m = rm;
    core.n = rn;
    // Column-wise assembly from row-major terms.
    std::vector<std::vector<std::pair<int, double>>> bycol(rn);
    std::vector<double> rlo(rm), rhi(rm);
    for (int ri = 0; ri < rm; ++ri) {
        int i = p.red_rows[ri];
        double fixed_sum = 0.0;
        for (auto [j, c] : m.row_terms(i)) {
            if (col_fixed(p, j))
                fixed_sum += c * 0.5 * (p.lb[j] + p.ub[j]);
            else
                bycol[p.col_map[j]].emplace_back(ri, c);
        }
        rlo[ri] = m.row_lo(i) == -kInf ? -kInf : m.row_lo(i) - fixed_sum;
        rhi[ri] = m.row_hi(i) == kInf ? kInf : m.row_hi(i) - fixed_sum;
    }
    core.col_start.assign(rn + rm + 1, 0);
    std::size_t nnz = 0;
    for (int j = 0; j < rn; ++j) nnz += bycol[j].size();
    core.row_idx.reserve(nnz + rm);
    core.val.reserve(nnz + rm);
    core.lb.resize(rn + rm);
    core.ub.resize(rn + rm);
    core.cost.assign(rn + rm, 0.0);
    for (int j = 0; j < rn; ++j) {
        core.col_start[j] = static_cast<int>(core.row_idx.size());
        // Merge duplicate terms on the same row for stability.
        auto& terms = bycol[j];
        std::sort(terms.begin(), terms.end());
        for (std::size_t k = 0; k < terms.size();) {
            double s = terms[k].second;
            std::size_t k2 = k + 1;
            while (k2 < terms.size() && terms[k2].first == terms[k].first) s += terms[k2++].second;
            if (s != 0.0) {
                core.row_idx.push_back(terms[k].first);
                core.val.push_back(s);
            }
            k = k2;
        }
        int oj = p.red_cols[j];
        core.lb[j] = p.lb[oj];
        core.ub[j] = p.ub[oj];
        core.cost[j] = m.col(oj).cost;
        if (m.col(oj).binary) p.binaries.push_back(j);
    }
    for (int i = 0; i < rm; ++i) {
        core.col_start[rn + i] = static_cast<int>(core.row_idx.size());
        core.row_idx.push_back(i);
        core.val.push_back(-1.0);
        core.lb[rn + i] = rlo[i];
        core.ub[rn + i] = rhi[i];
    }
    core.col_start[rn + rm] = static_cast<int>(core.row_idx.size());
    return p;
}

// Expand a reduced-space solution into original column space.
std::vector<double> expand_solution(const Model& m, const Presolved& p,
                                    const std::vector<double>& xred) {
    std::vector<double> x(m.num_cols());
    for (int j = 0; j < m.num_cols(); ++j) {
        if (p.col_map[j] >= 0)
            x[j] = xred[p.col_map[j]];
        else
            x[j] = 0.5 * (p.lb[j] + p.ub[j]);
    }
    return x;
}

std::string hint_from_rows(const Model& m, const Presolved& p, const std::vector<int>& red_rows) {
    std::ostringstream os;
    int shown = 0;
    for (int ri : red_rows) {
        if (ri < 0 || ri >= static_cast<int>(p.red_rows.size())) continue;
        if (shown++) os << "; ";
        if (shown > 3) {
            os << "...";
            break;
        }
        os << describe_row(m, p.red_rows[ri]);
    }
    return os.str();
}

// ----------------------------------------------------------------------------
// Branch & bound
// ----------------------------------------------------------------------------

struct BbContext {
    const Model& model;
    const Presolved& pre;
    const SolveOptions& opts;
    SimplexOptions sopts;
    std::chrono::steady_clock::time_point deadline;
    long lp_iters = 0;
    long nodes = 0;
};

struct BbNode {
    std::vector<double> lb, ub;
    Basis basis;
    double bound = -kInf;
    int depth = 0;
};

bool integral(const std::vector<int>& binaries, const std::vector<double>& x,
              int* worst = nullptr) {
    double worst_frac = kIntTol;
    int worst_j = -1;
    for (int j : binaries) {
        double f = std::abs(x[j] - std::round(x[j]));
        if (f > worst_frac) {
            worst_frac = f;
            worst_j = j;
        }
    }
    if (worst) *worst = worst_j;
    return worst_j < 0;
}

SolveResult branch_and_bound(BbContext& ctx) {
    const CoreLp& core = ctx.pre.core;
    SolveResult out;
    double incumbent = kInf;
    std::vector<double> inc_x;
    std::multiset<double> open_bounds;

    auto timed_out = [&] { return std::chrono::steady_clock::now() > ctx.deadline; };

    auto lp_at = [&](const std::vector<double>& lb, const std::vector<double>& ub,
                     Basis* basis) {
        LpResult r = simplex_solve(core, lb, ub, ctx.sopts, basis);
        ctx.lp_iters += r.iterations;
        return r;
    };

    // Round-and-fix dive used to seed the incumbent.
    auto dive = [&](const BbNode& node, const std::vector<double>& relax_x) {
        std::vector<double> lb = node.lb, ub = node.ub;
        for (int j : ctx.pre.binaries) {
            double v = std::round(std::clamp(relax_x[j], lb[j], ub[j]));
            v = std::clamp(v, lb[j], ub[j]);
            lb[j] = ub[j] = v;
        }
        Basis b = node.basis;
        LpResult r = lp_at(lb, ub, &b);
        if (r.status == LpStatus::Optimal && r.objective < incumbent - 1e-12) {
            incumbent = r.objective;
            inc_x.assign(r.x.begin(), r.x.begin() + core.total_cols());
        }
    };

    BbNode root;
    root.lb.assign(core.lb.begin(), core.lb.begin() + core.total_cols());
    root.ub.assign(core.ub.begin(), core.ub.begin() + core.total_cols());
    {
        LpResult r = lp_at(root.lb, root.ub, &root.basis);
        if (r.status == LpStatus::Infeasible) {
            out.status = SolveStatus::Infeasible;
            out.infeasible_hint = hint_from_rows(ctx.model, ctx.pre, r.infeasible_rows);
            out.lp_iterations = ctx.lp_iters;
            return out;
        }
        if (r.status == LpStatus::Unbounded) {
            out.status = SolveStatus::Unbounded;
            out.lp_iterations = ctx.lp_iters;
            return out;
        }
        if (r.status != LpStatus::Optimal) {
            out.status = SolveStatus::Error;
            out.lp_iterations = ctx.lp_iters;
            return out;
        }
        root.bound = r.objective;
        int frac = -1;
        if (integral(ctx.pre.binaries, r.x, &frac)) {
            out.status = SolveStatus::Optimal;
            out.objective = r.objective;
            out.x.assign(r.x.begin(), r.x.begin() + core.total_cols());
            out.gap = 0.0;
            out.lp_iterations = ctx.lp_iters;
            out.bb_nodes = 1;
            return out;
        }
        dive(root, r.x);
    }

    std::vector<BbNode> stack;
    stack.push_back(std::move(root));
    open_bounds.insert(stack.back().bound);

    auto rel_gap = [&] {
        if (incumbent == kInf) return kInf;
        double best = open_bounds.empty() ? incumbent : *open_bounds.begin();
        best = std::min(best, incumbent);
        return (incumbent - best) / std::max(1.0, std::abs(incumbent));
    };

    bool aborted = false;
    while (!stack.empty()) {
        if (rel_gap() <= ctx.opts.mipgap) break;
        if (ctx.nodes >= ctx.opts.max_bb_nodes || timed_out()) {
            aborted = true;
            break;
        }
        BbNode node = std::move(stack.back());
        stack.pop_back();
        open_bounds.erase(open_bounds.find(node.bound));
        if (node.bound >= incumbent - ctx.opts.mipgap * std::max(1.0, std::abs(incumbent)))
            continue;
        ++ctx.nodes;

        Basis basis = node.basis;
        LpResult r = lp_at(node.lb, node.ub, &basis);
        if (r.status == LpStatus::Infeasible) continue;
        if (r.status != LpStatus::Optimal) {
            aborted = true;
            break;
        }
        if (r.objective >= incumbent - ctx.opts.mipgap * std::max(1.0, std::abs(incumbent)))
            continue;
        int frac = -1;
        if (integral(ctx.pre.binaries, r.x, &frac)) {
            if (r.objective < incumbent - 1e-12) {
                incumbent = r.objective;
                inc_x.assign(r.x.begin(), r.x.begin() + core.total_cols());
            }
            continue;
        }
        if (incumbent == kInf && ctx.nodes % 64 == 0) dive(node, r.x);

        double xf = r.x[frac];
        // Children: far side pushed first so the near side is explored next.
        for (int side = 0; side < 2; ++side) {
            bool near_one = xf >= 0.5;
            bool to_one = (side == 0) ? !near_one : near_one;
            BbNode child;
            child.lb = node.lb;
            child.ub = node.ub;
            child.depth = node.depth + 1;
            child.bound = r.objective;
            child.basis = basis;
            if (to_one) {
                if (child.ub[frac] < 0.5) continue;  // excluded by presolve bounds
                child.lb[frac] = child.ub[frac] = 1.0;
            } else {
                if (child.lb[frac] > 0.5) continue;
                child.lb[frac] = child.ub[frac] = 0.0;
            }
            open_bounds.insert(child.bound);
            stack.push_back(std::move(child));
        }
    }

    out.lp_iterations = ctx.lp_iters;
    out.bb_nodes = ctx.nodes;
    if (inc_x.empty()) {
        out.status = aborted ? SolveStatus::Error : SolveStatus::Infeasible;
        if (out.status == SolveStatus::Infeasible)
            out.infeasible_hint = "no integer-feasible assignment of the on/off binaries";
        return out;
    }
    double best = open_bounds.empty() ? incumbent : std::min(incumbent, *open_bounds.begin());
    out.gap = (incumbent - best) / std::max(1.0, std::abs(incumbent));
    out.status = out.gap <= 1e-9 ? SolveStatus::Optimal : SolveStatus::FeasibleGap;
    out.objective = incumbent;
    out.x = std::move(inc_x);
    for (int j : ctx.pre.binaries) out.x[j] = std::round(out.x[j]);
    return out;
}

// ----------------------------------------------------------------------------
// Block decomposition (Dantzig-Wolfe with a tiny restricted master)
// ----------------------------------------------------------------------------

struct Decomposition {
    int num_components = 0;
    std::vector<int> col_comp;       // reduced structural col -> component (-1: direct)
    std::vector<int> coupling_rows;  // reduced row indices
    std::vector<int> row_comp;       // reduced row -> component or -1 for coupling
};

Decomposition analyze_structure(const CoreLp& core) {
    Decomposition d;
    int n = core.n;
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<int> rank_(n, 0);
    std::function<int(int)> find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
    };
    // Row -> columns map from the CSC structure.
    std::vector<std::vector<int>> row_cols(core.m);
    for (int j = 0; j < n; ++j)
        for (int k = core.col_start[j]; k < core.col_start[j + 1]; ++k)
            row_cols[core.row_idx[k]].push_back(j);

    // Coupling candidates: the (at most two) distinctly widest rows. A
    // candidate only counts as coupling if, with every other row united, it
    // still spans more than one component.
    std::vector<int> order(core.m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return row_cols[a].size() > row_cols[b].size();
    });
    std::vector<std::size_t> sizes;
    for (int i = 0; i < core.m; ++i) sizes.push_back(row_cols[i].size());
    std::size_t median = 0;
    if (!sizes.empty()) {
        std::vector<std::size_t> s = sizes;
        std::nth_element(s.begin(), s.begin() + s.size() / 2, s.end());
        median = s[s.size() / 2];
    }
    std::vector<char> candidate(core.m, 0);
    for (int k = 0; k < std::min(2, core.m); ++k) {
        int i = order[k];
        if (row_cols[i].size() >= std::max<std::size_t>(100, 4 * median)) candidate[i] = 1;
    }
    for (int i = 0; i < core.m; ++i) {
        if (candidate[i]) continue;
        for (std::size_t k = 1; k < row_cols[i].size(); ++k)
            unite(row_cols[i][0], row_cols[i][k]);
    }
    for (int k = 0; k < core.m; ++k) {
        int i = order[k];
        if (!candidate[i]) continue;
        std::set<int> comps;
        for (int j : row_cols[i]) comps.insert(find(j));
        if (comps.size() <= 1) {
            candidate[i] = 0;  // internal after all
            for (std::size_t kk = 1; kk < row_cols[i].size(); ++kk)
                unite(row_cols[i][0], row_cols[i][kk]);
        }
    }
    std::map<int, int> comp_ids;
    d.col_comp.assign(n, -1);
    for (int j = 0; j < n; ++j) {
        int r = find(j);
        auto it = comp_ids.emplace(r, static_cast<int>(comp_ids.size())).first;
        d.col_comp[j] = it->second;
    }
    d.num_components = static_cast<int>(comp_ids.size());
    d.row_comp.assign(core.m, -1);
    for (int i = 0; i < core.m; ++i) {
        if (row_cols[i].empty()) continue;
        if (candidate[i]) {
            d.coupling_rows.push_back(i);
        } else {
            d.row_comp[i] = d.col_comp[row_cols[i][0]];
        }
    }
    return d;
}

struct Block {
    std::vector<int> cols;  // reduced structural columns
    std::vector<int> rows;  // reduced rows
    CoreLp core;
    Basis basis;
    std::vector<double> base_cost;
    std::vector<std::vector<double>> coupling_coeff;  // per coupling row, per block col
};

struct Vertex {
    int block;
    double cost;
    std::vector<double> coupling;  // activity on each coupling row
    std::vector<double> x;         // structural values (block-local order)
};

SolveResult solve_decomposed(const Model& model, const Presolved& pre, const Decomposition& dec,
                             const SimplexOptions& sopts, bool& fallback) {
    const CoreLp& core = pre.core;
    SolveResult out;
    fallback = false;
    int C = static_cast<int>(dec.coupling_rows.size());

    // Direct columns: appear in coupling rows only (or in no row at all).
    std::vector<char> is_direct(core.n, 1);
    for (int j = 0; j < core.n; ++j)
        for (int k = core.col_start[j]; k < core.col_start[j + 1]; ++k)
            if (dec.row_comp[core.row_idx[k]] >= 0) {
                is_direct[j] = 0;
                break;
            }

    // Build blocks; components made of direct columns only get no block.
    // Many small components (e.g. independent hours) are grouped into a
    // bounded number of blocks to keep the restricted master tiny.
    std::vector<int> comp_rank(dec.num_components, -1);
    int dense = 0;
    for (int j = 0; j < core.n; ++j) {
        if (is_direct[j]) continue;
        int c = dec.col_comp[j];
        if (comp_rank[c] < 0) comp_rank[c] = dense++;
    }
    const int max_groups = 48;
    int B = std::min(dense, max_groups);
    std::vector<Block> blocks(B);
    auto group_of = [&](int rank) { return static_cast<int>(
        static_cast<long long>(rank) * B / std::max(1, dense)); };
    for (int j = 0; j < core.n; ++j) {
        if (is_direct[j]) continue;
        blocks[group_of(comp_rank[dec.col_comp[j]])].cols.push_back(j);
    }
    for (int i = 0; i < core.m; ++i)
        if (dec.row_comp[i] >= 0 && comp_rank[dec.row_comp[i]] >= 0)
            blocks[group_of(comp_rank[dec.row_comp[i]])].rows.push_back(i);

    for (Block& b : blocks) {
        std::vector<int> rowmap(core.m, -1);
        for (std::size_t r = 0; r < b.rows.size(); ++r) rowmap[b.rows[r]] = static_cast<int>(r);
        CoreLp& bc = b.core;
        bc.m = static_cast<int>(b.rows.size());
        bc.n = static_cast<int>(b.cols.size());
        bc.col_start.assign(bc.n + bc.m + 1, 0);
        bc.lb.resize(bc.n + bc.m);
        bc.ub.resize(bc.n + bc.m);
        bc.cost.assign(bc.n + bc.m, 0.0);
        b.coupling_coeff.assign(C, std::vector<double>(bc.n, 0.0));
        for (int jj = 0; jj < bc.n; ++jj) {
            int j = b.cols[jj];
            bc.col_start[jj] = static_cast<int>(bc.row_idx.size());
            for (int k = core.col_start[j]; k < core.col_start[j + 1]; ++k) {
                int i = core.row_idx[k];
                if (rowmap[i] >= 0) {
                    bc.row_idx.push_back(rowmap[i]);
                    bc.val.push_back(core.val[k]);
                } else {
                    for (int c = 0; c < C; ++c)
                        if (dec.coupling_rows[c] == i) b.coupling_coeff[c][jj] += core.val[k];
                }
            }
            bc.lb[jj] = core.lb[j];
            bc.ub[jj] = core.ub[j];
            bc.cost[jj] = core.cost[j];
        }
        b.base_cost.assign(bc.cost.begin(), bc.cost.begin() + bc.n);
        for (int r = 0; r < bc.m; ++r) {
            bc.col_start[bc.n + r] = static_cast<int>(bc.row_idx.size());
            bc.row_idx.push_back(r);
            bc.val.push_back(-1.0);
            bc.lb[bc.n + r] = core.lb[core.n + b.rows[r]];
            bc.ub[bc.n + r] = core.ub[core.n + b.rows[r]];
        }
        bc.col_start[bc.n + bc.m] = static_cast<int>(bc.row_idx.size());
    }

    std::vector<int> direct_cols;
    for (int j = 0; j < core.n; ++j)
        if (is_direct[j]) direct_cols.push_back(j);

    // Price a block at dual prices y (per coupling row); returns its vertex.
    auto price_block = [&](Block& b, const std::vector<double>& y, Vertex& v) -> LpStatus {
        CoreLp& bc = b.core;
        for (int jj = 0; jj < bc.n; ++jj) {
            double c = b.base_cost[jj];
            for (int cc = 0; cc < C; ++cc) c -= y[cc] * b.coupling_coeff[cc][jj];
            bc.cost[jj] = c;
        }
        LpResult r = simplex_solve(bc, {}, {}, sopts, &b.basis);
        if (r.status != LpStatus::Optimal) return r.status;
        v.x.assign(r.x.begin(), r.x.begin() + bc.n);
        v.cost = 0.0;
        for (int jj = 0; jj < bc.n; ++jj) v.cost += b.base_cost[jj] * v.x[jj];
        v.coupling.assign(C, 0.0);
        for (int cc = 0; cc < C; ++cc)
            for (int jj = 0; jj < bc.n; ++jj)
                v.coupling[cc] += b.coupling_coeff[cc][jj] * v.x[jj];
        return LpStatus::Optimal;
    };

    // Seed vertices at zero duals.
    std::vector<Vertex> verts;
    for (int bi = 0; bi < B; ++bi) {
        Vertex v;
        v.block = bi;
        LpStatus st = price_block(blocks[bi], std::vector<double>(C, 0.0), v);
        if (st == LpStatus::Infeasible) {
            out.status = SolveStatus::Infeasible;
            out.infeasible_hint = hint_from_rows(model, pre, blocks[bi].rows);
            return out;
        }
        if (st != LpStatus::Optimal) {
            if (std::getenv("ZENOPT_DEBUG_DECOMP"))
                std::fprintf(stderr, "decomp: block %d seed solve status %d\n", bi, (int)st);
            fallback = true;
            return out;
        }
        verts.push_back(std::move(v));
    }

    // Elastics keep the restricted master feasible before enough vertices
    // exist; priced well above any economic cost but low enough that block
    // pricing stays numerically meaningful.
    double elastic_cost = 1e5;
    for (const Vertex& v : verts) elastic_cost = std::max(elastic_cost, 10.0 * std::abs(v.cost));
    std::vector<double> theta;      // master solution cache
    std::vector<double> master_y;   // coupling duals
    std::vector<double> master_mu;  // convexity duals
    Basis master_basis;

    auto solve_master = [&]() -> bool {
        // Rows: C coupling rows then B convexity rows.
        CoreLp mc;
        mc.m = C + B;
        int ncol = static_cast<int>(verts.size() + direct_cols.size()) + 2 * C;
        mc.n = ncol;
        mc.col_start.assign(ncol + mc.m + 1, 0);
        mc.lb.resize(ncol + mc.m);
        mc.ub.resize(ncol + mc.m);
        mc.cost.assign(ncol + mc.m, 0.0);
        int jc = 0;
        auto push_col = [&](double lb, double ub, double cost,
                            const std::vector<std::pair<int, double>>& terms) {
            mc.col_start[jc] = static_cast<int>(mc.row_idx.size());
            for (auto [i, cval] : terms) {
                mc.row_idx.push_back(i);
                mc.val.push_back(cval);
            }
            mc.lb[jc] = lb;
            mc.ub[jc] = ub;
            mc.cost[jc] = cost;
            ++jc;
        };
        for (const Vertex& v : verts) {
            std::vector<std::pair<int, double>> terms;
            for (int cc = 0; cc < C; ++cc)
                if (v.coupling[cc] != 0.0) terms.emplace_back(cc, v.coupling[cc]);
            terms.emplace_back(C + v.block, 1.0);
            push_col(0.0, 1.0, v.cost, terms);
        }
        for (int j : direct_cols) {
            std::vector<std::pair<int, double>> terms;
            for (int k = core.col_start[j]; k < core.col_start[j + 1]; ++k)
                for (int cc = 0; cc < C; ++cc)
                    if (dec.coupling_rows[cc] == core.row_idx[k])
                        terms.emplace_back(cc, core.val[k]);
            push_col(core.lb[j], core.ub[j], core.cost[j], terms);
        }
        for (int cc = 0; cc < C; ++cc) {  // elastics keep the master feasible
            push_col(0.0, kInf, elastic_cost, {{cc, -1.0}});
            push_col(0.0, kInf, elastic_cost, {{cc, 1.0}});
        }
        for (int i = 0; i < mc.m; ++i) {
            mc.col_start[ncol + i] = static_cast<int>(mc.row_idx.size());
            mc.row_idx.push_back(i);
            mc.val.push_back(-1.0);
            if (i < C) {
                int orig_row = dec.coupling_rows[i];
                mc.lb[ncol + i] = core.lb[core.n + orig_row];
                mc.ub[ncol + i] = core.ub[core.n + orig_row];
            } else {
                mc.lb[ncol + i] = 1.0;
                mc.ub[ncol + i] = 1.0;
            }
        }
        mc.col_start[ncol + mc.m] = static_cast<int>(mc.row_idx.size());
        master_basis = Basis{};  // master is tiny; cold solve keeps it simple
        LpResult r = simplex_solve(mc, {}, {}, sopts, &master_basis);
        if (r.status != LpStatus::Optimal) return false;
        theta.assign(r.x.begin(), r.x.begin() + ncol);
        master_y.assign(C, 0.0);
        master_mu.assign(B, 0.0);
        for (int cc = 0; cc < C; ++cc) master_y[cc] = r.duals[cc];
        for (int bi = 0; bi < B; ++bi) master_mu[bi] = r.duals[C + bi];
        return true;
    };

    int round = 0;
    const int max_rounds = 600;
    while (true) {
        if (++round > max_rounds) {
            if (std::getenv("ZENOPT_DEBUG_DECOMP"))
                std::fprintf(stderr, "decomp: exceeded %d rounds\n", max_rounds);
            fallback = true;
            return out;
        }
        if (!solve_master()) {
            if (std::getenv("ZENOPT_DEBUG_DECOMP"))
                std::fprintf(stderr, "decomp: master solve failed at round %d\n", round);
            fallback = true;
            return out;
        }
        bool improved = false;
        for (int bi = 0; bi < B; ++bi) {
            Vertex v;
            v.block = bi;
            LpStatus st = price_block(blocks[bi], master_y, v);
            if (st != LpStatus::Optimal) {
                if (std::getenv("ZENOPT_DEBUG_DECOMP")) {
                    const Block& bb = blocks[bi];
                    std::fprintf(stderr,
                                 "decomp: block %d price status %d (m=%d n=%d, max_it=%ld)\n",
                                 bi, (int)st, bb.core.m, bb.core.n, sopts.max_iterations);
                }
                fallback = true;
                return out;
            }
            double rc = v.cost;
            for (int cc = 0; cc < C; ++cc) rc -= master_y[cc] * v.coupling[cc];
            rc -= master_mu[bi];
            double scale = 1.0 + std::abs(v.cost);
            if (rc < -1e-8 * scale) {
                verts.push_back(std::move(v));
                improved = true;
            }
        }
        if (!improved) break;
    }

    // Elastic use means the coupling rows cannot be met by any block mix.
    std::size_t elastic_base = verts.size() + direct_cols.size();
    for (int cc = 0; cc < C; ++cc) {
        if (theta[elastic_base + 2 * cc] > 1e-6 || theta[elastic_base + 2 * cc + 1] > 1e-6) {
            out.status = SolveStatus::Infeasible;
            out.infeasible_hint = describe_row(model, pre.red_rows[dec.coupling_rows[cc]]);
            return out;
        }
    }

    // Recover the primal point: convex combinations per block + directs.
    std::vector<double> xred(core.n, 0.0);
    for (std::size_t vi = 0; vi < verts.size(); ++vi) {
        double w = theta[vi];
        if (w <= 1e-14) continue;
        const Vertex& v = verts[vi];
        const Block& b = blocks[v.block];
        for (std::size_t jj = 0; jj < b.cols.size(); ++jj) xred[b.cols[jj]] += w * v.x[jj];
    }
    for (std::size_t di = 0; di < direct_cols.size(); ++di)
        xred[direct_cols[di]] = theta[verts.size() + di];

    out.status = SolveStatus::Optimal;
    out.x = std::move(xred);
    out.gap = 0.0;
    return out;
}

}  // namespace

SolveResult solve(const Model& model, const SolveOptions& opts) {
    SolveResult out;
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(opts.time_limit_s));

    Presolved pre = presolve(model);
    if (pre.infeasible) {
        out.status = SolveStatus::Infeasible;
        out.infeasible_hint = pre.hint;
        return out;
    }

    SimplexOptions sopts;
    sopts.max_iterations = opts.max_lp_iterations;

    auto finish = [&](std::vector<double> xred, SolveStatus status, double gap) {
        out.x = expand_solution(model, pre, xred);
        out.objective = model.objective_value(out.x);
        out.status = status;
        out.gap = gap;
        out.max_violation = max_violation(model, out.x);
    };

    if (pre.core.n == 0) {
        finish({}, SolveStatus::Optimal, 0.0);
        return out;
    }

    // Binaries not fixed by presolve force branch & bound (monolithic).
    if (!pre.binaries.empty()) {
        BbContext ctx{model, pre, opts, sopts, deadline};
        SolveResult bb = branch_and_bound(ctx);
        out.lp_iterations = bb.lp_iterations;
        out.bb_nodes = bb.bb_nodes;
        if (!bb.feasible()) {
            out.status = bb.status;
            out.infeasible_hint = bb.infeasible_hint;
            return out;
        }
        finish(std::vector<double>(bb.x.begin(), bb.x.begin() + pre.core.n), bb.status, bb.gap);
        return out;
    }

    // Pure LP: try block decomposition on large structured instances.
    if (opts.allow_decomposition && (pre.core.m >= 400 || opts.force_decomposition)) {
        Decomposition dec = analyze_structure(pre.core);
        if (std::getenv("ZENOPT_DEBUG_DECOMP"))
            std::fprintf(stderr, "decomp: comps=%d coupling=%zu m=%d n=%d\n",
                         dec.num_components, dec.coupling_rows.size(), pre.core.m, pre.core.n);
        if (dec.num_components >= 2 && dec.coupling_rows.size() <= 2) {
            bool fallback = false;
            SolveResult dw = solve_decomposed(model, pre, dec, sopts, fallback);
            if (!fallback) {
                if (!dw.feasible()) {
                    out.status = dw.status;
                    out.infeasible_hint = dw.infeasible_hint;
                    return out;
                }
                finish(std::move(dw.x), SolveStatus::Optimal, 0.0);
                out.used_decomposition = true;
                if (out.max_violation <= opts.recheck_tol) return out;
                out.used_decomposition = false;
                // fall through to the monolithic path on a failed re-check
            }
        }
    }

    Basis basis;
    LpResult r = simplex_solve(pre.core, {}, {}, sopts, &basis);
    out.lp_iterations = r.iterations;
    switch (r.status) {
        case LpStatus::Optimal:
            finish(std::vector<double>(r.x.begin(), r.x.begin() + pre.core.n),
                   SolveStatus::Optimal, 0.0);
            if (out.max_violation > opts.recheck_tol) {
                SimplexOptions tight = sopts;
                tight.reinvert_every = 30;
                tight.feas_tol = 1e-11;
                Basis b2;
                LpResult r2 = simplex_solve(pre.core, {}, {}, tight, &b2);
                if (r2.status == LpStatus::Optimal) {
                    SolveResult alt;
                    std::vector<double> x2(r2.x.begin(), r2.x.begin() + pre.core.n);
                    auto expanded = expand_solution(model, pre, x2);
                    double v2 = max_violation(model, expanded);
                    if (v2 < out.max_violation) {
                        out.x = std::move(expanded);
                        out.objective = model.objective_value(out.x);
                        out.max_violation = v2;
                    }
                }
            }
            return out;
        case LpStatus::Infeasible:
            out.status = SolveStatus::Infeasible;
            out.infeasible_hint = hint_from_rows(model, pre, r.infeasible_rows);
            return out;
        case LpStatus::Unbounded:
            out.status = SolveStatus::Unbounded;
            return out;
        default:
            out.status = SolveStatus::Error;
            return out;
    }
}

}  // namespace zenopt::lp
