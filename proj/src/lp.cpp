#include "dscale/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dscale/errors.hpp"

namespace dscale::lp {

namespace {

// Dense row-major matrix helper.
struct Dense {
    int rows = 0, cols = 0;
    std::vector<double> a;
    void resize(int r, int c) { rows = r; cols = c; a.assign(static_cast<std::size_t>(r) * c, 0.0); }
    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

class Simplex {
public:
    Simplex(const Problem& p, const Options& opt) : prob_(p), opt_(opt) { build(); }

    Solution run() {
        Solution sol;
        if (!phase1()) {
            sol.status = Status::Infeasible;
            return sol;
        }
        Status st = optimize(/*phase1=*/false);
        sol.status = st;
        if (st != Status::Optimal && st != Status::IterLimit) return sol;
        extract(sol);
        return sol;
    }

private:
    const Problem& prob_;
    Options opt_;

    int m_ = 0;        // rows
    int n_orig_ = 0;   // user variables
    int n_total_ = 0;  // user + slacks + artificials
    int art_begin_ = 0;
    Dense A_;                     // m x n_total equality form
    std::vector<double> b_;       // >= 0
    std::vector<bool> flipped_;   // row negated during normalization
    std::vector<double> cost_;    // phase-2 costs (0 for slack/artificial)
    std::vector<int> basis_;      // column index per row
    std::vector<char> in_basis_;  // per column
    Dense binv_;
    std::vector<double> xb_;
    int degenerate_streak_ = 0;
    bool bland_ = false;
    int pivots_ = 0;

    void build() {
        m_ = static_cast<int>(prob_.rows.size());
        n_orig_ = prob_.num_vars();
        int n_slack = 0;
        for (const Row& r : prob_.rows)
            if (r.sense != Sense::EQ) ++n_slack;
        art_begin_ = n_orig_ + n_slack;
        n_total_ = art_begin_ + m_;
        A_.resize(m_, n_total_);
        b_.assign(m_, 0.0);
        flipped_.assign(m_, false);
        cost_.assign(n_total_, 0.0);
        for (int j = 0; j < n_orig_; ++j) cost_[j] = prob_.objective[j];

        int slack = n_orig_;
        for (int i = 0; i < m_; ++i) {
            const Row& r = prob_.rows[i];
            for (const Term& t : r.terms) A_.at(i, t.var) += t.coeff;
            if (r.sense == Sense::LE) A_.at(i, slack++) = 1.0;
            else if (r.sense == Sense::GE) A_.at(i, slack++) = -1.0;
            b_[i] = r.rhs;
            if (b_[i] < 0.0) {
                flipped_[i] = true;
                b_[i] = -b_[i];
                for (int j = 0; j < art_begin_; ++j) A_.at(i, j) = -A_.at(i, j);
            }
            A_.at(i, art_begin_ + i) = 1.0;
        }
    }

    // Start from the all-artificial basis and minimize their sum. Slacks with
    // +1 coefficient could seed the basis directly, but the uniform start
    // keeps the code small and phase 1 is cheap at these sizes.
    bool phase1() {
        basis_.resize(m_);
        in_basis_.assign(n_total_, 0);
        for (int i = 0; i < m_; ++i) {
            basis_[i] = art_begin_ + i;
            in_basis_[art_begin_ + i] = 1;
        }
        binv_.resize(m_, m_);
        for (int i = 0; i < m_; ++i) binv_.at(i, i) = 1.0;
        xb_ = b_;

        std::vector<double> phase1_cost(n_total_, 0.0);
        for (int j = art_begin_; j < n_total_; ++j) phase1_cost[j] = 1.0;
        std::swap(cost_, phase1_cost);
        Status st = optimize(/*phase1=*/true);
        std::swap(cost_, phase1_cost);
        if (st != Status::Optimal) return false;

        double infeas = 0.0;
        for (int i = 0; i < m_; ++i)
            if (basis_[i] >= art_begin_) infeas += xb_[i];
        if (infeas > opt_.feas_tol * 10.0) return false;

        drive_out_artificials();
        return true;
    }

    // Pivot zero-valued basic artificials onto structural columns where
    // possible; rows that admit no pivot are redundant and keep their
    // artificial at value 0 (it can never become positive because the row is
    // implied by the others).
    void drive_out_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < art_begin_) continue;
            for (int j = 0; j < art_begin_; ++j) {
                if (in_basis_[j]) continue;
                double u = 0.0;
                for (int k = 0; k < m_; ++k) u += binv_.at(i, k) * A_.at(k, j);
                if (std::abs(u) > 1e-7) {
                    pivot(i, j, column_in_basis_coords(j));
                    break;
                }
            }
        }
    }

    std::vector<double> column_in_basis_coords(int j) {
        std::vector<double> u(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            double s = 0.0;
            for (int k = 0; k < m_; ++k) s += binv_.at(i, k) * A_.at(k, j);
            u[i] = s;
        }
        return u;
    }

    void compute_pi(std::vector<double>& pi) const {
        pi.assign(m_, 0.0);
        for (int k = 0; k < m_; ++k) {
            double cb = cost_[basis_[k]];
            if (cb == 0.0) continue;
            for (int i = 0; i < m_; ++i) pi[i] += cb * binv_.at(k, i);
        }
    }

    Status optimize(bool phase1) {
        std::vector<double> pi;
        while (true) {
            if (pivots_ >= opt_.max_pivots) return Status::IterLimit;
            compute_pi(pi);
            int entering = -1;
            double best = -opt_.pivot_tol;
            int limit = phase1 ? n_total_ : art_begin_;  // artificials never re-enter
            for (int j = 0; j < limit; ++j) {
                if (in_basis_[j]) continue;
                double d = cost_[j];
                for (int i = 0; i < m_; ++i) d -= pi[i] * A_.at(i, j);
                if (d < best - 1e-15) {
                    if (bland_) {
                        entering = j;
                        break;  // smallest eligible index
                    }
                    best = d;
                    entering = j;
                }
            }
            if (entering < 0) return Status::Optimal;

            std::vector<double> u = column_in_basis_coords(entering);
            int leaving = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m_; ++i) {
                if (u[i] > opt_.pivot_tol) {
                    double ratio = xb_[i] / u[i];
                    if (ratio < best_ratio - 1e-12 ||
                        (ratio < best_ratio + 1e-12 &&
                         (leaving < 0 || basis_[i] < basis_[leaving]))) {
                        best_ratio = ratio;
                        leaving = i;
                    }
                }
            }
            if (leaving < 0) return Status::Unbounded;

            if (best_ratio < 1e-12) {
                if (++degenerate_streak_ > 60) bland_ = true;
            } else {
                degenerate_streak_ = 0;
                bland_ = false;
            }
            pivot(leaving, entering, u);
        }
    }

    void pivot(int row, int entering, const std::vector<double>& u) {
        double p = u[row];
        in_basis_[basis_[row]] = 0;
        basis_[row] = entering;
        in_basis_[entering] = 1;
        // Gauss-Jordan update of B^-1 and x_B.
        double inv_p = 1.0 / p;
        for (int k = 0; k < m_; ++k) binv_.at(row, k) *= inv_p;
        double xr = xb_[row] * inv_p;
        xb_[row] = xr;
        for (int i = 0; i < m_; ++i) {
            if (i == row) continue;
            double f = u[i];
            if (f == 0.0) continue;
            for (int k = 0; k < m_; ++k) binv_.at(i, k) -= f * binv_.at(row, k);
            xb_[i] -= f * xr;
            if (xb_[i] < 0.0 && xb_[i] > -1e-11) xb_[i] = 0.0;
        }
        if (++pivots_ % opt_.refactor_every == 0) refactorize();
    }

    // Rebuild B^-1 from scratch to shed accumulated drift.
    void refactorize() {
        Dense aug;
        aug.resize(m_, 2 * m_);
        for (int i = 0; i < m_; ++i) {
            for (int r = 0; r < m_; ++r) aug.at(r, i) = A_.at(r, basis_[i]);
            aug.at(i, m_ + i) = 1.0;
        }
        for (int col = 0; col < m_; ++col) {
            int piv = col;
            for (int r = col + 1; r < m_; ++r)
                if (std::abs(aug.at(r, col)) > std::abs(aug.at(piv, col))) piv = r;
            if (std::abs(aug.at(piv, col)) < 1e-13) return;  // keep incremental inverse
            if (piv != col)
                for (int k = 0; k < 2 * m_; ++k) std::swap(aug.at(piv, k), aug.at(col, k));
            double inv_p = 1.0 / aug.at(col, col);
            for (int k = 0; k < 2 * m_; ++k) aug.at(col, k) *= inv_p;
            for (int r = 0; r < m_; ++r) {
                if (r == col) continue;
                double f = aug.at(r, col);
                if (f == 0.0) continue;
                for (int k = 0; k < 2 * m_; ++k) aug.at(r, k) -= f * aug.at(col, k);
            }
        }
        // Rows of aug's right half are B^-1 but permuted to basis order.
        for (int i = 0; i < m_; ++i)
            for (int k = 0; k < m_; ++k) binv_.at(i, k) = aug.at(i, m_ + k);
        for (int i = 0; i < m_; ++i) {
            double s = 0.0;
            for (int k = 0; k < m_; ++k) s += binv_.at(i, k) * b_[k];
            xb_[i] = std::max(s, 0.0);
        }
    }

    void extract(Solution& sol) {
        sol.x.assign(n_orig_, 0.0);
        for (int i = 0; i < m_; ++i)
            if (basis_[i] < n_orig_) sol.x[basis_[i]] = std::max(xb_[i], 0.0);
        std::vector<double> pi;
        compute_pi(pi);
        sol.dual.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i) sol.dual[i] = flipped_[i] ? -pi[i] : pi[i];
        sol.value = 0.0;
        for (int j = 0; j < n_orig_; ++j) sol.value += prob_.objective[j] * sol.x[j];
        residuals(sol);
    }

    // Recomputed from the original problem statement, independent of the
    // tableau state.
    void residuals(Solution& sol) const {
        double primal = 0.0, comp = 0.0;
        for (int i = 0; i < m_; ++i) {
            const Row& r = prob_.rows[i];
            double act = 0.0;
            for (const Term& t : r.terms) act += t.coeff * sol.x[t.var];
            double viol = 0.0, slackness = 0.0;
            if (r.sense == Sense::LE) viol = std::max(0.0, act - r.rhs), slackness = r.rhs - act;
            else if (r.sense == Sense::GE) viol = std::max(0.0, r.rhs - act), slackness = act - r.rhs;
            else viol = std::abs(act - r.rhs);
            primal = std::max(primal, viol);
            if (r.sense != Sense::EQ)
                comp = std::max(comp, std::abs(sol.dual[i] * slackness));
        }
        double dual = 0.0;
        for (int j = 0; j < n_orig_; ++j) {
            double red = prob_.objective[j];
            for (int i = 0; i < m_; ++i) {
                const Row& r = prob_.rows[i];
                for (const Term& t : r.terms)
                    if (t.var == j) red -= sol.dual[i] * t.coeff;
            }
            dual = std::max(dual, -red);
            comp = std::max(comp, std::abs(red * sol.x[j]));
        }
        // Sign conditions on row duals double as slack reduced costs.
        for (int i = 0; i < m_; ++i) {
            if (prob_.rows[i].sense == Sense::LE) dual = std::max(dual, sol.dual[i]);
            if (prob_.rows[i].sense == Sense::GE) dual = std::max(dual, -sol.dual[i]);
        }
        sol.primal_residual = primal;
        sol.dual_residual = dual;
        sol.comp_slackness = comp;
    }
};

}  // namespace

Solution solve(const Problem& problem, const Options& options) {
    if (problem.rows.empty()) {
        // Only x >= 0: optimum is 0 unless some cost is negative.
        Solution sol;
        sol.x.assign(problem.num_vars(), 0.0);
        sol.status = Status::Optimal;
        for (double c : problem.objective)
            if (c < 0.0) sol.status = Status::Unbounded;
        return sol;
    }
    Simplex engine(problem, options);
    return engine.run();
}

}  // namespace dscale::lp
