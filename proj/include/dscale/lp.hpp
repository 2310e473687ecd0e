#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace dscale::lp {

enum class Sense { LE, GE, EQ };
enum class Status { Optimal, Infeasible, Unbounded, IterLimit };

struct Term {
    int var;
    double coeff;
};

struct Row {
    std::vector<Term> terms;
    Sense sense = Sense::LE;
    double rhs = 0.0;
};

/// min c.x  subject to  rows,  x >= 0. Upper bounds go in as rows; the
/// restricted masters and cutting-plane masters this serves stay at a few
/// hundred rows/columns, so a dense tableau is the right tool.
struct Problem {
    std::vector<double> objective;
    std::vector<Row> rows;

    int add_var(double cost) {
        objective.push_back(cost);
        return static_cast<int>(objective.size()) - 1;
    }
    int add_row(Row row) {
        rows.push_back(std::move(row));
        return static_cast<int>(rows.size()) - 1;
    }
    int num_vars() const { return static_cast<int>(objective.size()); }
};

struct Options {
    int max_pivots = 200000;
    double feas_tol = 1e-9;
    double pivot_tol = 1e-10;
    int refactor_every = 64;
};

struct Solution {
    Status status = Status::Infeasible;
    double value = 0.0;
    std::vector<double> x;        // primal values, size num_vars
    std::vector<double> dual;     // one multiplier per row (<=0 for LE, >=0 for GE at optimality)
    // Residuals recomputed from scratch at the end: max primal constraint
    // violation, max negative reduced cost, and complementary slackness.
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double comp_slackness = 0.0;
};

/// Two-phase dense primal simplex with Bland fallback and periodic
/// refactorization. Duals satisfy: reduced cost c_j - dual . A_j >= 0 for
/// every column at optimality.
Solution solve(const Problem& problem, const Options& options = {});

}  // namespace dscale::lp
