#include "zenopt/simplex.hpp"
#include <cstdlib>
#include <cstdio>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

namespace zenopt::lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Eta {
    int row;
    int start;  // into shared idx/val arrays, spans [start, end)
    int end;
};

// Product-form inverse: B^{ -1} = E_k ... E_1, each eta built from the pivot
// column u = B_prev^{-1} a_q and pivot row r.
class Pfi {
  public:
    void clear() {
        etas_.clear();
        idx_.clear();
        val_.clear();
    }

    // u is dense (size m); stores only significant entries plus the pivot.
    void push(int row, const std::vector<double>& u, double drop_tol) {
        Eta e;
        e.row = row;
        e.start = static_cast<int>(idx_.size());
        for (int i = 0; i < static_cast<int>(u.size()); ++i) {
            if (i == row || std::abs(u[i]) > drop_tol) {
                idx_.push_back(i);
                val_.push_back(u[i]);
            }
        }
        e.end = static_cast<int>(idx_.size());
        etas_.push_back(e);
    }

    // As push, but only the listed indices of u can be nonzero. The touched
    // list may contain duplicates (an entry can transit through exact zero).
    void push_sparse(int row, const std::vector<double>& u, std::vector<int>& touched,
                     double drop_tol) {
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        Eta e;
        e.row = row;
        e.start = static_cast<int>(idx_.size());
        for (int i : touched) {
            if (i == row || std::abs(u[i]) > drop_tol) {
                idx_.push_back(i);
                val_.push_back(u[i]);
            }
        }
        e.end = static_cast<int>(idx_.size());
        etas_.push_back(e);
    }

    // v := B^{-1} v
    void ftran(std::vector<double>& v) const {
        for (const Eta& e : etas_) {
            double piv = 0.0;
            for (int k = e.start; k < e.end; ++k)
                if (idx_[k] == e.row) { piv = val_[k]; break; }
            double vr = v[e.row] / piv;
            if (vr == 0.0) { v[e.row] = 0.0; continue; }
            for (int k = e.start; k < e.end; ++k) {
                int i = idx_[k];
                if (i == e.row) continue;
                v[i] -= val_[k] * vr;
            }
            v[e.row] = vr;
        }
    }

    // As ftran, but records every index whose value may have become nonzero
    // so the caller can reset a shared dense work vector cheaply.
    void ftran_tracked(std::vector<double>& v, std::vector<int>& touched) const {
        for (const Eta& e : etas_) {
            double piv = 0.0;
            for (int k = e.start; k < e.end; ++k)
                if (idx_[k] == e.row) { piv = val_[k]; break; }
            double vr = v[e.row] / piv;
            if (vr == 0.0) { v[e.row] = 0.0; continue; }
            for (int k = e.start; k < e.end; ++k) {
                int i = idx_[k];
                if (i == e.row) continue;
                if (v[i] == 0.0) touched.push_back(i);
                v[i] -= val_[k] * vr;
            }
            v[e.row] = vr;
        }
    }

    // y := y B^{-1}  (row vector); etas applied in reverse.
    void btran(std::vector<double>& y) const {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            const Eta& e = *it;
            double dot = 0.0, piv = 0.0;
            for (int k = e.start; k < e.end; ++k) {
                dot += val_[k] * y[idx_[k]];
                if (idx_[k] == e.row) piv = val_[k];
            }
            y[e.row] += (y[e.row] - dot) / piv;
        }
    }

    std::size_t nnz() const { return idx_.size(); }
    std::size_t count() const { return etas_.size(); }

  private:
    std::vector<Eta> etas_;
    std::vector<int> idx_;
    std::vector<double> val_;
};

class Simplex {
  public:
    Simplex(const CoreLp& core, const std::vector<double>& lb,
            const std::vector<double>& ub, const SimplexOptions& opts)
        : core_(core), opts_(opts), m_(core.m), ncols_(core.total_cols()) {
        lb_ = lb.empty() ? core.lb : lb;
        ub_ = ub.empty() ? core.ub : ub;
        scale();
    }

    LpResult run(Basis* warm) {
        LpResult res;
        init_basis(warm);
        if (!reinvert()) {
            res.status = LpStatus::Error;
            return res;
        }
        compute_basic_values();

        bool ok = iterate(/*phase1=*/true, res);
        if (!ok) return res;
        if (total_infeasibility() > 1e-7) {
            res.status = LpStatus::Infeasible;
            collect_infeasible_rows(res);
            extract(res);
            return res;
        }
        bland_ = false;
        degenerate_streak_ = 0;
        ok = iterate(/*phase1=*/false, res);
        if (!ok) return res;
        res.status = LpStatus::Optimal;
        extract(res);
        if (warm) save_basis(*warm);
        return res;
    }

  private:
    const CoreLp& core_;
    SimplexOptions opts_;
    int m_, ncols_;
    std::vector<double> lb_, ub_;
    std::vector<double> row_scale_, col_scale_;
    std::vector<double> scost_;  // scaled costs
    double cost_scale_ = 1.0;

    std::vector<int> basic_;           // row -> col
    std::vector<VarStatus> vstat_;     // col -> status
    std::vector<int> basic_row_of_;    // col -> row or -1
    std::vector<double> vb_;           // basic values by row
    Pfi pfi_;
    int pivots_since_reinvert_ = 0;
    long iters_ = 0;
    int degenerate_streak_ = 0;
    bool bland_ = false;

    std::vector<double> work_w_, work_pi_, work_d_;

    double col_entry(int j, int i) const {
        for (int k = core_.col_start[j]; k < core_.col_start[j + 1]; ++k)
            if (core_.row_idx[k] == i) return core_.val[k] * row_scale_[i] * col_scale_[j];
        return 0.0;
    }

    // Geometric-mean equilibration, factors rounded to powers of two so the
    // scaled data stays bit-reproducible.
    void scale() {
        row_scale_.assign(m_, 1.0);
        col_scale_.assign(ncols_, 1.0);
        for (int pass = 0; pass < 2; ++pass) {
            std::vector<double> rmin(m_, kInf), rmax(m_, 0.0);
            for (int j = 0; j < ncols_; ++j)
                for (int k = core_.col_start[j]; k < core_.col_start[j + 1]; ++k) {
                    double a = std::abs(core_.val[k]) * row_scale_[core_.row_idx[k]] * col_scale_[j];
                    if (a == 0.0) continue;
                    rmin[core_.row_idx[k]] = std::min(rmin[core_.row_idx[k]], a);
                    rmax[core_.row_idx[k]] = std::max(rmax[core_.row_idx[k]], a);
                }
            for (int i = 0; i < m_; ++i)
                if (rmax[i] > 0.0)
                    row_scale_[i] *= std::exp2(-std::round(std::log2(std::sqrt(rmin[i] * rmax[i]))));
            std::vector<double> cmin(ncols_, kInf), cmax(ncols_, 0.0);
            for (int j = 0; j < ncols_; ++j)
                for (int k = core_.col_start[j]; k < core_.col_start[j + 1]; ++k) {
                    double a = std::abs(core_.val[k]) * row_scale_[core_.row_idx[k]] * col_scale_[j];
                    if (a == 0.0) continue;
                    cmin[j] = std::min(cmin[j], a);
                    cmax[j] = std::max(cmax[j], a);
                }
            for (int j = 0; j < ncols_; ++j)
                if (cmax[j] > 0.0)
                    col_scale_[j] *= std::exp2(-std::round(std::log2(std::sqrt(cmin[j] * cmax[j]))));
        }
        // scaled variable x'_j = x_j / col_scale_j, so bounds divide.
        scost_.resize(ncols_);
        double cmax = 0.0;
        for (int j = 0; j < ncols_; ++j) {
            if (lb_[j] != -kInf) lb_[j] /= col_scale_[j];
            if (ub_[j] != kInf) ub_[j] /= col_scale_[j];
            scost_[j] = core_.cost[j] * col_scale_[j];
            cmax = std::max(cmax, std::abs(scost_[j]));
        }
        // Normalize the cost vector so optimality tolerances are relative
        // to the largest cost, not absolute.
        cost_scale_ = cmax > 1.0 ? cmax : 1.0;
        for (int j = 0; j < ncols_; ++j) scost_[j] /= cost_scale_;
    }

    void init_basis(Basis* warm) {
        basic_.assign(m_, -1);
        vstat_.assign(ncols_, VarStatus::AtLower);
        if (warm && warm->valid() && static_cast<int>(warm->vstat.size()) == ncols_) {
            basic_ = warm->basic;
            vstat_ = warm->vstat;
            // A bound may have moved past the stored status; re-anchor.
            for (int j = 0; j < ncols_; ++j) {
                if (vstat_[j] == VarStatus::Basic) continue;
                vstat_[j] = nonbasic_anchor(j, vstat_[j]);
            }
        } else {
            for (int j = 0; j < ncols_; ++j) vstat_[j] = nonbasic_anchor(j, VarStatus::AtLower);
            for (int i = 0; i < m_; ++i) {
                basic_[i] = core_.n + i;  // logicals
                vstat_[core_.n + i] = VarStatus::Basic;
            }
        }
        basic_row_of_.assign(ncols_, -1);
        for (int i = 0; i < m_; ++i) basic_row_of_[basic_[i]] = i;
    }

    VarStatus nonbasic_anchor(int j, VarStatus prefer) const {
        bool lfin = lb_[j] != -kInf, ufin = ub_[j] != kInf;
        if (!lfin && !ufin) return VarStatus::FreeZero;
        if (prefer == VarStatus::AtUpper && ufin) return VarStatus::AtUpper;
        if (lfin) return VarStatus::AtLower;
        return VarStatus::AtUpper;
    }

    double nonbasic_value(int j) const {
        switch (vstat_[j]) {
            case VarStatus::AtLower: return lb_[j];
            case VarStatus::AtUpper: return ub_[j];
            default: return 0.0;
        }
    }

    bool reinvert() {
        pfi_.clear();
        pivots_since_reinvert_ = 0;
        std::vector<int> cols;
        cols.reserve(m_);
        for (int i = 0; i < m_; ++i) cols.push_back(basic_[i]);
        // Sparser columns first keeps the eta file small.
        std::stable_sort(cols.begin(), cols.end(), [&](int a, int b) {
            int na = core_.col_start[a + 1] - core_.col_start[a];
            int nb = core_.col_start[b + 1] - core_.col_start[b];
            if (na != nb) return na < nb;
            return a < b;
        });
        std::vector<char> row_used(m_, 0);
        std::vector<int> unplaced;
        std::vector<double>& w = work_w_;
        w.assign(m_, 0.0);
        std::vector<int> touched;
        touched.reserve(64);
        for (int c : cols) {
            touched.clear();
            for (int k = core_.col_start[c]; k < core_.col_start[c + 1]; ++k) {
                int i = core_.row_idx[k];
                if (w[i] == 0.0) touched.push_back(i);
                w[i] += core_.val[k] * row_scale_[i] * col_scale_[c];
            }
            pfi_.ftran_tracked(w, touched);
            int best = -1;
            double best_abs = opts_.pivot_tol;
            for (int i : touched) {
                if (row_used[i]) continue;
                double a = std::abs(w[i]);
                if (a > best_abs) {
                    best_abs = a;
                    best = i;
                }
            }
            if (best < 0) {
                unplaced.push_back(c);
                for (int i : touched) w[i] = 0.0;
                continue;
            }
            pfi_.push_sparse(best, w, touched, 1e-13);
            row_used[best] = 1;
            basic_[best] = c;
            for (int i : touched) w[i] = 0.0;
        }
        // Singular rescue: park the unplaceable columns at a bound and put the
        // row logicals back in the basis.
        if (!unplaced.empty()) {
            std::size_t u = 0;
            for (int i = 0; i < m_ && u < unplaced.size(); ++i) {
                if (row_used[i]) continue;
                int c = unplaced[u++];
                vstat_[c] = nonbasic_anchor(c, VarStatus::AtLower);
                basic_row_of_[c] = -1;
                load_column(core_.n + i, w);
                pfi_.ftran(w);
                if (std::abs(w[i]) <= opts_.pivot_tol) return false;
                pfi_.push(i, w, 1e-13);
                row_used[i] = 1;
                basic_[i] = core_.n + i;
                vstat_[core_.n + i] = VarStatus::Basic;
                std::fill(w.begin(), w.end(), 0.0);
            }
        }
        for (int i = 0; i < m_; ++i) basic_row_of_[basic_[i]] = i;
        return true;
    }

    void load_column(int j, std::vector<double>& dense) const {
        for (int k = core_.col_start[j]; k < core_.col_start[j + 1]; ++k)
            dense[core_.row_idx[k]] += core_.val[k] * row_scale_[core_.row_idx[k]] * col_scale_[j];
    }

    void compute_basic_values() {
        // A x = 0 including logicals; x_B = -B^{-1} N x_N.
        std::vector<double>& rhs = work_w_;
        rhs.assign(m_, 0.0);
        for (int j = 0; j < ncols_; ++j) {
            if (vstat_[j] == VarStatus::Basic) continue;
            double xv = nonbasic_value(j);
            if (xv == 0.0) continue;
            for (int k = core_.col_start[j]; k < core_.col_start[j + 1]; ++k)
                rhs[core_.row_idx[k]] -= core_.val[k] * row_scale_[core_.row_idx[k]] * col_scale_[j] * xv;
        }
        pfi_.ftran(rhs);
        vb_ = rhs;
    }

    double infeas_of(int i) const {
        double v = vb_[i];
        int c = basic_[i];
        if (v < lb_[c]) return lb_[c] - v;
        if (v > ub_[c]) return v - ub_[c];
        return 0.0;
    }

    double total_infeasibility() const {
        double s = 0.0;
        for (int i = 0; i < m_; ++i) s += infeas_of(i);
        return s;
    }

    // At the phase-1 optimum the violated basic logicals mark the rows that
    // cannot be satisfied; a violated basic structural implicates all rows it
    // touches.
    void collect_infeasible_rows(LpResult& res) const {
        for (int i = 0; i < m_; ++i) {
            if (infeas_of(i) <= 1e-7) continue;
            int c = basic_[i];
            if (c >= core_.n) {
                res.infeasible_rows.push_back(c - core_.n);
            } else {
                for (int k = core_.col_start[c]; k < core_.col_start[c + 1]; ++k)
                    res.infeasible_rows.push_back(core_.row_idx[k]);
            }
        }
        std::sort(res.infeasible_rows.begin(), res.infeasible_rows.end());
        res.infeasible_rows.erase(
            std::unique(res.infeasible_rows.begin(), res.infeasible_rows.end()),
            res.infeasible_rows.end());
    }

    double phase_objective(bool phase1) const {
        if (phase1) return total_infeasibility();
        double z = 0.0;
        for (int i = 0; i < m_; ++i) z += scost_[basic_[i]] * vb_[i];
        for (int j = 0; j < ncols_; ++j)
            if (vstat_[j] != VarStatus::Basic) z += scost_[j] * nonbasic_value(j);
        return z;
    }

    // One simplex phase. Returns false (with res.status set) on hard stop.
    bool iterate(bool phase1, LpResult& res) {
        const double ftol = opts_.feas_tol;
        const bool debug = std::getenv("ZENOPT_DEBUG_SIMPLEX") != nullptr;
        double z_checkpoint = phase_objective(phase1);
        long iters_at_checkpoint = iters_;
        long stalled_windows = 0;
        while (true) {
            // Progress watchdog: objective stagnation over a window engages
            // Bland's rule; persistent stagnation under Bland is a hard stop.
            if (iters_ - iters_at_checkpoint >= 512) {
                double z = phase_objective(phase1);
                if (z >= z_checkpoint - 1e-10 * (1.0 + std::abs(z_checkpoint))) {
                    ++stalled_windows;
                    if (!bland_) {
                        bland_ = true;
                        if (!reinvert()) {
                            res.status = LpStatus::Error;
                            extract(res);
                            return false;
                        }
                        compute_basic_values();
                    } else if (stalled_windows > 40) {
                        res.status = LpStatus::IterLimit;
                        extract(res);
                        return false;
                    }
                } else {
                    stalled_windows = 0;
                    bland_ = false;
                }
                z_checkpoint = z;
                iters_at_checkpoint = iters_;
            }
            if (debug && iters_ % 100000 == 0 && iters_ > 0) {
                double z = 0.0;
                for (int i = 0; i < m_; ++i) z += scost_[basic_[i]] * vb_[i];
                std::fprintf(stderr,
                             "simplex: it=%ld phase%d m=%d inf=%.3e z=%.9e bland=%d streak=%d\n",
                             iters_, phase1 ? 1 : 2, m_, total_infeasibility(), z, (int)bland_,
                             degenerate_streak_);
            }
            if (iters_ >= opts_.max_iterations) {
                res.status = LpStatus::IterLimit;
                extract(res);
                return false;
            }
            if (phase1 && total_infeasibility() <= ftol) return true;

            // Pricing: pi = d_B B^{-1}; d is the phase objective on basics.
            std::vector<double>& d = work_d_;
            d.assign(m_, 0.0);
            bool any_inf = false;
            for (int i = 0; i < m_; ++i) {
                int c = basic_[i];
                if (phase1) {
                    if (vb_[i] < lb_[c] - ftol) { d[i] = -1.0; any_inf = true; }
                    else if (vb_[i] > ub_[c] + ftol) { d[i] = 1.0; any_inf = true; }
                } else {
                    d[i] = scost_[c];
                }
            }
            if (phase1 && !any_inf) return true;
            std::vector<double>& pi = work_pi_;
            pi = d;
            pfi_.btran(pi);

            int q = -1;
            int dir = +1;
            double best = bland_ ? 0.0 : opts_.opt_tol;
            for (int j = 0; j < ncols_; ++j) {
                if (vstat_[j] == VarStatus::Basic) continue;
                if (ub_[j] - lb_[j] <= 1e-14) continue;  // fixed (e.g. branched binaries)
                double r = phase1 ? 0.0 : scost_[j];
                for (int k = core_.col_start[j]; k < core_.col_start[j + 1]; ++k)
                    r -= pi[core_.row_idx[k]] * core_.val[k] * row_scale_[core_.row_idx[k]] * col_scale_[j];
                bool eligible = false;
                int cand_dir = +1;
                if (vstat_[j] == VarStatus::AtLower || vstat_[j] == VarStatus::FreeZero) {
                    if (r < -opts_.opt_tol) { eligible = true; cand_dir = +1; }
                }
                if (!eligible && (vstat_[j] == VarStatus::AtUpper || vstat_[j] == VarStatus::FreeZero)) {
                    if (r > opts_.opt_tol) { eligible = true; cand_dir = -1; }
                }
                if (!eligible) continue;
                if (bland_) { q = j; dir = cand_dir; break; }
                if (std::abs(r) > best) {
                    best = std::abs(r);
                    q = j;
                    dir = cand_dir;
                }
            }
            if (q < 0) {
                if (phase1) return true;  // caller re-checks feasibility
                return true;              // optimal
            }

            std::vector<double>& w = work_w_;
            w.assign(m_, 0.0);
            load_column(q, w);
            pfi_.ftran(w);

            // Ratio test. Basic value rate is -dir*w_i per unit of entering step.
            double tmax = kInf;
            int leave_row = -1;
            bool leave_at_upper = false;
            double leave_piv = 0.0;
            if (lb_[q] != -kInf && ub_[q] != kInf) tmax = ub_[q] - lb_[q];
            for (int i = 0; i < m_; ++i) {
                double rate = -dir * w[i];
                if (std::abs(rate) < 1e-11) continue;
                int c = basic_[i];
                double v = vb_[i];
                double t = kInf;
                bool at_upper = false;
                if (phase1 && v < lb_[c] - ftol) {
                    if (rate > 0) { t = (lb_[c] - v) / rate; at_upper = false; }
                } else if (phase1 && v > ub_[c] + ftol) {
                    if (rate < 0) { t = (ub_[c] - v) / rate; at_upper = true; }
                } else {
                    if (rate > 0 && ub_[c] != kInf) { t = (ub_[c] - v) / rate; at_upper = true; }
                    else if (rate < 0 && lb_[c] != -kInf) { t = (lb_[c] - v) / rate; at_upper = false; }
                }
                if (t == kInf) continue;
                if (t < -1e-9) t = 0.0;
                t = std::max(t, 0.0);
                bool better = t < tmax - 1e-12;
                bool tie = std::abs(t - tmax) <= 1e-12;
                if (better || (tie && leave_row >= 0 &&
                               (bland_ ? basic_[i] < basic_[leave_row]
                                       : std::abs(w[i]) > std::abs(leave_piv)))) {
                    tmax = t;
                    leave_row = i;
                    leave_at_upper = at_upper;
                    leave_piv = w[i];
                }
            }

            if (tmax == kInf) {
                if (phase1) {
                    res.status = LpStatus::Error;  // phase-1 objective is bounded; numerics
                    extract(res);
                    return false;
                }
                res.status = LpStatus::Unbounded;
                extract(res);
                return false;
            }

            ++iters_;
            // Anti-cycling: Bland's rule engages after a degenerate or
            // near-degenerate stall and stays on for the rest of the phase.
            if (tmax <= 1e-7) {
                if (++degenerate_streak_ > 100 && !bland_) {
                    bland_ = true;
                    if (!reinvert()) {
                        res.status = LpStatus::Error;
                        extract(res);
                        return false;
                    }
                    compute_basic_values();
                    continue;
                }
            } else {
                degenerate_streak_ = 0;
            }

            double xq0 = nonbasic_value(q);
            if (leave_row < 0) {
                // Bound flip; no basis change.
                for (int i = 0; i < m_; ++i) vb_[i] += -dir * w[i] * tmax;
                vstat_[q] = dir > 0 ? VarStatus::AtUpper : VarStatus::AtLower;
                continue;
            }

            for (int i = 0; i < m_; ++i) vb_[i] += -dir * w[i] * tmax;
            int leaving = basic_[leave_row];
            vstat_[leaving] = leave_at_upper ? VarStatus::AtUpper : VarStatus::AtLower;
            if (lb_[leaving] == -kInf && ub_[leaving] == kInf) vstat_[leaving] = VarStatus::FreeZero;
            basic_row_of_[leaving] = -1;
            basic_[leave_row] = q;
            basic_row_of_[q] = leave_row;
            vstat_[q] = VarStatus::Basic;
            vb_[leave_row] = xq0 + dir * tmax;
            pfi_.push(leave_row, w, 1e-13);

            if (++pivots_since_reinvert_ >= opts_.reinvert_every ||
                pfi_.nnz() > static_cast<std::size_t>(40) * static_cast<std::size_t>(m_) + 4096) {
                if (!reinvert()) {
                    res.status = LpStatus::Error;
                    extract(res);
                    return false;
                }
                compute_basic_values();
            }
        }
    }

    void extract(LpResult& res) {
        res.iterations = iters_;
        res.x.assign(ncols_, 0.0);
        for (int j = 0; j < ncols_; ++j)
            if (vstat_[j] != VarStatus::Basic) res.x[j] = nonbasic_value(j);
        for (int i = 0; i < m_; ++i) res.x[basic_[i]] = vb_[i];
        double z = 0.0;
        for (int j = 0; j < ncols_; ++j) {
            res.x[j] *= col_scale_[j];
            z += core_.cost[j] * res.x[j];
        }
        res.objective = z;
        // Row duals: y = c_B B^{-1}, mapped back to original units.
        std::vector<double> pi(m_, 0.0);
        for (int i = 0; i < m_; ++i) pi[i] = scost_[basic_[i]];
        pfi_.btran(pi);
        res.duals.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i) res.duals[i] = pi[i] * row_scale_[i] * cost_scale_;
    }

    void save_basis(Basis& b) const {
        b.basic = basic_;
        b.vstat = vstat_;
    }
};

}  // namespace

LpResult simplex_solve(const CoreLp& core, const std::vector<double>& lb,
                       const std::vector<double>& ub, const SimplexOptions& opts,
                       Basis* warm) {
    Simplex s(core, lb, ub, opts);
    return s.run(warm);
}

}  // namespace zenopt::lp
