#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nlvol {

// Numerical breakdown of a solve (cycling past the iteration cap, singular
// basis, failed phase 1 on a problem known to be feasible). Deliberately a
// distinct type: callers must not confuse it with "infeasible/nonlocal".
class SimplexStallError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimplexOptions {
    double pivot_tol = 1e-10;
    double opt_tol = 1e-9;
    double feas_tol = 1e-8;
    std::int64_t max_iterations = 1'000'000;
    int refactor_interval = 100;
    // consecutive degenerate pivots before switching to Bland's rule
    int stall_window = 500;
    // entering candidates scored by steepest edge (1 = plain Dantzig)
    int steepest_k = 4;
    // phase-2 early termination, checked after pricing: receives the current
    // objective and the most negative reduced cost; return true to stop.
    std::function<bool(double objective, double rc_min)> stop_rule;
};

// Column access for LPs whose constraint matrix is generated on demand
// (e.g. one column per deterministic strategy). Overriding `price` lets a
// problem locate the best entering column without touching all columns.
class ColumnOracle {
public:
    virtual ~ColumnOracle() = default;

    virtual int rows() const = 0;
    virtual std::int64_t columns() const = 0;
    virtual double cost(std::int64_t j) const = 0;
    virtual void column(std::int64_t j, double* out) const = 0;

    // Most negative reduced cost. `use_costs` is false during phase 1,
    // where every structural column prices with zero objective.
    virtual std::pair<double, std::int64_t> price(const double* duals, bool use_costs) const {
        std::vector<double> col(rows());
        double best = 0.0;
        std::int64_t best_j = -1;
        for (std::int64_t j = 0; j < columns(); ++j) {
            column(j, col.data());
            double rc = use_costs ? cost(j) : 0.0;
            for (int i = 0; i < rows(); ++i) rc -= duals[i] * col[i];
            if (rc < best) {
                best = rc;
                best_j = j;
            }
        }
        return {best, best_j};
    }

    // Up to `k` distinct candidate columns with the most negative reduced
    // costs, best first. The solver picks among them by steepest edge.
    virtual void price_top_k(const double* duals, bool use_costs, int k,
                             std::vector<std::pair<double, std::int64_t>>& out) const {
        (void)k;
        out.clear();
        const auto [rc, j] = price(duals, use_costs);
        if (j >= 0) out.emplace_back(rc, j);
    }

    // Smallest-index column with reduced cost < -tol, or -1 (Bland's rule).
    virtual std::int64_t price_bland(const double* duals, bool use_costs, double tol) const {
        std::vector<double> col(rows());
        for (std::int64_t j = 0; j < columns(); ++j) {
            column(j, col.data());
            double rc = use_costs ? cost(j) : 0.0;
            for (int i = 0; i < rows(); ++i) rc -= duals[i] * col[i];
            if (rc < -tol) return j;
        }
        return -1;
    }
};

struct SimplexSolution {
    enum class Status { Optimal, Infeasible };
    Status status = Status::Optimal;
    double objective = 0.0;
    bool stopped_early = false;  // stop_rule fired before proven optimality
    std::vector<std::pair<std::int64_t, double>> basic;  // structural (column, value)
    std::vector<std::int64_t> basis;                     // full final basis, one per row
    std::vector<double> duals;                           // one per row, oracle orientation
    std::int64_t iterations = 0;
};

// Two-phase revised simplex with an explicit basis inverse, periodic
// refactorization, Dantzig pricing and a Bland's-rule fallback once
// degenerate pivots accumulate.
//
//   min c.x  s.t.  A x = rhs, x >= 0
//
// Artificial variables are managed internally: they seed the phase-1 basis
// and are pinned at zero afterwards (any pivot that would move one forces
// it out of the basis first).
class SimplexSolver {
public:
    SimplexSolver(const ColumnOracle& oracle, std::span<const double> rhs,
                  SimplexOptions options = {})
        : oracle_(oracle), options_(options), m_(oracle.rows()) {
        if (static_cast<int>(rhs.size()) != m_)
            throw std::invalid_argument("SimplexSolver: rhs size mismatch");
        rhs_.assign(rhs.begin(), rhs.end());
        row_sign_.assign(m_, 1.0);
        for (int i = 0; i < m_; ++i)
            if (rhs_[i] < 0.0) {
                rhs_[i] = -rhs_[i];
                row_sign_[i] = -1.0;
            }
    }

    // `warm_basis` (one structural column per row) skips phase 1 when it is
    // nonsingular and feasible for the current rhs; otherwise the solver
    // silently falls back to the artificial start.
    SimplexSolution solve(std::span<const std::int64_t> warm_basis = {}) {
        bool warm = false;
        if (static_cast<int>(warm_basis.size()) == m_) {
            basis_.assign(warm_basis.begin(), warm_basis.end());
            x_.assign(m_, 0.0);
            try {
                refactorize();
                warm = true;
                for (int i = 0; i < m_; ++i)
                    if (x_[i] < -options_.feas_tol) warm = false;
            } catch (const SimplexStallError&) {
                warm = false;
            }
        }
        if (!warm) {
            init_artificial_basis();
            phase1_ = true;
            run();
            if (phase1_objective() > options_.feas_tol) {
                SimplexSolution sol;
                sol.status = SimplexSolution::Status::Infeasible;
                sol.iterations = iterations_;
                return sol;
            }
        }
        phase1_ = false;
        const bool stopped = run();

        SimplexSolution sol;
        sol.status = SimplexSolution::Status::Optimal;
        sol.stopped_early = stopped;
        sol.iterations = iterations_;
        sol.basis = basis_;
        for (int i = 0; i < m_; ++i) {
            if (is_artificial(basis_[i])) continue;
            sol.basic.emplace_back(basis_[i], x_[i]);
            sol.objective += oracle_.cost(basis_[i]) * x_[i];
        }
        std::vector<double> y;
        compute_duals(y);
        oracle_duals(y, sol.duals);
        return sol;
    }

private:
    bool is_artificial(std::int64_t j) const { return j >= oracle_.columns(); }

    // Structural column into `out`, with phase-1 row sign flips applied.
    void fetch_column(std::int64_t j, double* out) const {
        if (is_artificial(j)) {
            for (int i = 0; i < m_; ++i) out[i] = 0.0;
            out[j - oracle_.columns()] = 1.0;
            return;
        }
        oracle_.column(j, out);
        for (int i = 0; i < m_; ++i) out[i] *= row_sign_[i];
    }

    double column_cost(std::int64_t j) const {
        if (phase1_) return is_artificial(j) ? 1.0 : 0.0;
        return is_artificial(j) ? 0.0 : oracle_.cost(j);
    }

    void init_artificial_basis() {
        basis_.resize(m_);
        for (int i = 0; i < m_; ++i) basis_[i] = oracle_.columns() + i;
        binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int i = 0; i < m_; ++i) binv_[static_cast<std::size_t>(i) * m_ + i] = 1.0;
        x_ = rhs_;
    }

    double phase1_objective() const {
        double s = 0.0;
        for (int i = 0; i < m_; ++i)
            if (is_artificial(basis_[i])) s += x_[i];
        return s;
    }

    double objective() const {
        double s = 0.0;
        for (int i = 0; i < m_; ++i) s += column_cost(basis_[i]) * x_[i];
        return s;
    }

    void compute_duals(std::vector<double>& y) const {
        y.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            const double c = column_cost(basis_[i]);
            if (c == 0.0) continue;
            const double* row = &binv_[static_cast<std::size_t>(i) * m_];
            for (int k = 0; k < m_; ++k) y[k] += c * row[k];
        }
    }

    // duals as seen by the oracle (undo the phase-1 row sign flips)
    void oracle_duals(const std::vector<double>& y, std::vector<double>& out) const {
        out.resize(m_);
        for (int i = 0; i < m_; ++i) out[i] = y[i] * row_sign_[i];
    }

    void direction(const double* col, double* w) const {
        for (int i = 0; i < m_; ++i) {
            const double* row = &binv_[static_cast<std::size_t>(i) * m_];
            double s = 0.0;
            for (int k = 0; k < m_; ++k) s += row[k] * col[k];
            w[i] = s;
        }
    }

    // Returns true if the stop rule ended phase 2 before proven optimality.
    bool run() {
        std::vector<double> y, yo, w(m_), col(m_), cand_w(m_), cand_col(m_);
        std::vector<std::pair<double, std::int64_t>> candidates;
        bool bland = false;
        int degenerate_run = 0;
        int since_refactor = 0;

        for (;;) {
            if (++iterations_ > options_.max_iterations)
                throw SimplexStallError("simplex: iteration cap exceeded");

            compute_duals(y);
            oracle_duals(y, yo);

            std::int64_t entering = -1;
            if (bland) {
                entering = oracle_.price_bland(yo.data(), !phase1_, options_.opt_tol);
                if (entering < 0) return false;  // optimal
                fetch_column(entering, col.data());
                direction(col.data(), w.data());
            } else {
                oracle_.price_top_k(yo.data(), !phase1_, options_.steepest_k, candidates);
                double rc_min = 0.0;
                for (const auto& [rc, j] : candidates) rc_min = std::min(rc_min, rc);
                if (rc_min >= -options_.opt_tol) return false;  // optimal
                if (!phase1_ && options_.stop_rule && options_.stop_rule(objective(), rc_min))
                    return true;

                // steepest edge: maximize rc^2 / |Binv a|^2 over candidates
                double best_score = -1.0;
                for (const auto& [rc, j] : candidates) {
                    if (rc >= -options_.opt_tol) continue;
                    fetch_column(j, cand_col.data());
                    direction(cand_col.data(), cand_w.data());
                    double nrm = 1.0;
                    for (int i = 0; i < m_; ++i) nrm += cand_w[i] * cand_w[i];
                    const double score = rc * rc / nrm;
                    if (score > best_score) {
                        best_score = score;
                        entering = j;
                        std::swap(w, cand_w);
                        std::swap(col, cand_col);
                    }
                }
            }

            const int leaving = ratio_test(w, bland);
            if (leaving < 0) throw SimplexStallError("simplex: unbounded direction");

            const bool artificial_left = is_artificial(basis_[leaving]);
            const double step = x_[leaving] / w[leaving];
            for (int i = 0; i < m_; ++i) x_[i] -= step * w[i];
            x_[leaving] = step;
            basis_[leaving] = entering;
            pivot_update(leaving, w);

            // an artificial leaving the basis is progress even at step 0
            if (step < 1e-13 && !artificial_left) {
                if (++degenerate_run >= options_.stall_window) bland = true;
            } else {
                degenerate_run = 0;
            }
            if (++since_refactor >= options_.refactor_interval) {
                refactorize();
                since_refactor = 0;
            }
        }
    }

    // Leaving row. Basic artificials are pinned at zero: any direction
    // component through one forces it out with a degenerate step before a
    // regular ratio is considered.
    int ratio_test(const std::vector<double>& w, bool bland) const {
        int art_row = -1;
        double art_mag = options_.pivot_tol;
        for (int i = 0; i < m_; ++i)
            if (!phase1_ && is_artificial(basis_[i]) && std::abs(w[i]) > art_mag) {
                art_mag = std::abs(w[i]);
                art_row = i;
            }
        if (art_row >= 0) return art_row;

        int best = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < m_; ++i) {
            if (w[i] <= options_.pivot_tol) continue;
            const double ratio = x_[i] / w[i];
            if (best < 0 || ratio < best_ratio - 1e-15) {
                best = i;
                best_ratio = ratio;
            } else if (ratio < best_ratio + 1e-15) {
                // tie: Bland takes the smallest basis column; otherwise
                // prefer ejecting an artificial, then the largest pivot
                bool take;
                if (bland) {
                    take = basis_[i] < basis_[best];
                } else {
                    const bool ai = is_artificial(basis_[i]);
                    const bool ab = is_artificial(basis_[best]);
                    take = ai != ab ? ai : w[i] > w[best];
                }
                if (take) {
                    best = i;
                    best_ratio = ratio;
                }
            }
        }
        return best;
    }

    // Rank-one update of the explicit inverse after a pivot on `row`.
    void pivot_update(int row, const std::vector<double>& w) {
        double* pivot_row = &binv_[static_cast<std::size_t>(row) * m_];
        const double inv = 1.0 / w[row];
        for (int k = 0; k < m_; ++k) pivot_row[k] *= inv;
        for (int i = 0; i < m_; ++i) {
            if (i == row) continue;
            const double f = w[i];
            if (f == 0.0) continue;
            double* r = &binv_[static_cast<std::size_t>(i) * m_];
            for (int k = 0; k < m_; ++k) r[k] -= f * pivot_row[k];
        }
    }

    // Rebuilds the inverse from the basis columns (Gauss-Jordan with
    // partial pivoting) and recomputes x = Binv * rhs to cap drift.
    void refactorize() {
        std::vector<double> mat(static_cast<std::size_t>(m_) * m_);
        std::vector<double> col(m_);
        for (int j = 0; j < m_; ++j) {
            fetch_column(basis_[j], col.data());
            for (int i = 0; i < m_; ++i) mat[static_cast<std::size_t>(i) * m_ + j] = col[i];
        }
        std::vector<double> inv(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int i = 0; i < m_; ++i) inv[static_cast<std::size_t>(i) * m_ + i] = 1.0;
        for (int c = 0; c < m_; ++c) {
            int piv = c;
            for (int r = c + 1; r < m_; ++r)
                if (std::abs(mat[static_cast<std::size_t>(r) * m_ + c]) >
                    std::abs(mat[static_cast<std::size_t>(piv) * m_ + c]))
                    piv = r;
            const double v = mat[static_cast<std::size_t>(piv) * m_ + c];
            if (std::abs(v) < options_.pivot_tol)
                throw SimplexStallError("simplex: singular basis during refactorization");
            if (piv != c) {
                for (int k = 0; k < m_; ++k) {
                    std::swap(mat[static_cast<std::size_t>(piv) * m_ + k],
                              mat[static_cast<std::size_t>(c) * m_ + k]);
                    std::swap(inv[static_cast<std::size_t>(piv) * m_ + k],
                              inv[static_cast<std::size_t>(c) * m_ + k]);
                }
            }
            const double s = 1.0 / mat[static_cast<std::size_t>(c) * m_ + c];
            for (int k = 0; k < m_; ++k) {
                mat[static_cast<std::size_t>(c) * m_ + k] *= s;
                inv[static_cast<std::size_t>(c) * m_ + k] *= s;
            }
            for (int r = 0; r < m_; ++r) {
                if (r == c) continue;
                const double f = mat[static_cast<std::size_t>(r) * m_ + c];
                if (f == 0.0) continue;
                for (int k = 0; k < m_; ++k) {
                    mat[static_cast<std::size_t>(r) * m_ + k] -=
                        f * mat[static_cast<std::size_t>(c) * m_ + k];
                    inv[static_cast<std::size_t>(r) * m_ + k] -=
                        f * inv[static_cast<std::size_t>(c) * m_ + k];
                }
            }
        }
        binv_ = std::move(inv);
        for (int i = 0; i < m_; ++i) {
            const double* row = &binv_[static_cast<std::size_t>(i) * m_];
            double s = 0.0;
            for (int k = 0; k < m_; ++k) s += row[k] * rhs_[k];
            // only tiny negatives are drift; larger ones must stay visible
            // (the warm-start feasibility check relies on them)
            x_[i] = (s < 0.0 && s >= -options_.feas_tol) ? 0.0 : s;
        }
    }

    const ColumnOracle& oracle_;
    SimplexOptions options_;
    int m_;
    std::vector<double> rhs_;       // sign-flipped to be nonnegative
    std::vector<double> row_sign_;
    std::vector<std::int64_t> basis_;
    std::vector<double> binv_;      // row-major m x m
    std::vector<double> x_;         // basic values
    bool phase1_ = true;
    std::int64_t iterations_ = 0;
};

inline SimplexSolution solve_standard_form(const ColumnOracle& oracle,
                                           std::span<const double> rhs,
                                           SimplexOptions options = {}) {
    return SimplexSolver(oracle, rhs, options).solve();
}

}  // namespace nlvol
