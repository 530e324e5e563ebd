#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nlvol/behavior.hpp"
#include "nlvol/cg.hpp"
#include "nlvol/inequality.hpp"
#include "nlvol/simplex.hpp"

namespace nlvol {

inline constexpr std::int64_t kEnumerationCap = std::int64_t{1} << 20;
inline constexpr double kVisibilityTolerance = 1e-7;

// One deterministic local strategy: a fixed +-1 outcome per (party, setting).
struct DeterministicStrategy {
    std::vector<std::vector<int>> outcomes;  // [party][setting]
};

// All product strategies of the scenario in lexicographic order (party 0 in
// the most significant position; within a party, setting 0 flips fastest).
inline std::vector<DeterministicStrategy> enumerate_strategies(
    const Scenario& scenario, std::int64_t cap = kEnumerationCap) {
    const std::int64_t count = scenario.strategy_count();
    if (count > cap) throw std::invalid_argument("enumerate_strategies: cap exceeded");
    const CgSpace space = CgSpace::joint_only(scenario);
    auto scratch = space.make_strategy_scratch();
    std::vector<DeterministicStrategy> out;
    out.reserve(count);
    for (std::int64_t idx = 0; idx < count; ++idx) {
        space.decode_strategy(idx, scratch);
        out.push_back(DeterministicStrategy{scratch});
    }
    return out;
}

inline Behavior behavior_of_strategy(const Scenario& scenario,
                                     const DeterministicStrategy& strategy) {
    std::vector<double> table(static_cast<std::size_t>(scenario.setting_tuples()) *
                              scenario.outcome_tuples());
    std::vector<int> x(scenario.parties());
    for (std::int64_t idx = 0; idx < scenario.setting_tuples(); ++idx) {
        scenario.decode_setting(idx, x);
        int a = 0;
        for (int p = 0; p < scenario.parties(); ++p)
            if (strategy.outcomes[p][x[p]] < 0) a |= 1 << (scenario.parties() - 1 - p);
        table[static_cast<std::size_t>(idx) * scenario.outcome_tuples() + a] = 1.0;
    }
    return Behavior(scenario, std::move(table), false);
}

// Maximum of the inequality over deterministic strategies; the maximum over
// the whole local set is attained at one of these vertices.
inline double local_bound(const BellInequality& ineq, std::int64_t cap = kEnumerationCap) {
    const Scenario& sc = ineq.scenario;
    const std::int64_t count = sc.strategy_count();
    if (count > cap) throw std::invalid_argument("local_bound: cap exceeded");
    const CgSpace space = CgSpace::joint_only(sc);
    auto signs = space.make_strategy_scratch();
    std::vector<int> x(sc.parties());
    double best = -std::numeric_limits<double>::infinity();
    for (std::int64_t idx = 0; idx < count; ++idx) {
        space.decode_strategy(idx, signs);
        double v = 0.0;
        for (std::int64_t s = 0; s < sc.setting_tuples(); ++s) {
            const double g = ineq.joint[s];
            if (g == 0.0) continue;
            sc.decode_setting(s, x);
            int prod = 1;
            for (int p = 0; p < sc.parties(); ++p) prod *= signs[p][x[p]];
            v += g * prod;
        }
        for (int p = 0; p < sc.parties(); ++p)
            for (int s = 0; s < sc.settings(p); ++s) v += ineq.marginal[p][s] * signs[p][s];
        best = std::max(best, v);
    }
    return best;
}

// Convex weights over the enumerated strategy list certifying locality.
struct LocalModel {
    std::vector<std::pair<std::int64_t, double>> weights;  // (strategy index, q)
};

inline Behavior model_behavior(const Scenario& scenario, const LocalModel& model) {
    const CgSpace space = CgSpace::joint_only(scenario);
    auto scratch = space.make_strategy_scratch();
    std::vector<double> table(static_cast<std::size_t>(scenario.setting_tuples()) *
                              scenario.outcome_tuples());
    std::vector<int> x(scenario.parties());
    for (const auto& [idx, q] : model.weights) {
        space.decode_strategy(idx, scratch);
        for (std::int64_t s = 0; s < scenario.setting_tuples(); ++s) {
            scenario.decode_setting(s, x);
            int a = 0;
            for (int p = 0; p < scenario.parties(); ++p)
                if (scratch[p][x[p]] < 0) a |= 1 << (scenario.parties() - 1 - p);
            table[static_cast<std::size_t>(s) * scenario.outcome_tuples() + a] += q;
        }
    }
    return Behavior(scenario, std::move(table), false);
}

// Outcome of a membership query. `visibility` is the largest v in [0,1]
// such that v.b + (1-v).uniform stays inside the local polytope; a behavior
// counts as local when v is within kVisibilityTolerance of 1.
struct LocalityVerdict {
    double visibility = 0.0;
    bool is_local = false;
    std::optional<LocalModel> model;
};

namespace detail {

// Columns of the gauge LP over a correlator coordinate space:
//
//   minimize sum_l q_l  s.t.  sum_l q_l c_l = t,  q >= 0
//
// whose optimum is the Minkowski gauge gamma of the target t with respect
// to the local polytope (the uniform behavior sits at the origin, strictly
// inside). The visibility is then v* = min(1, 1/gamma). Strategy columns
// are generated from their index, never materialized as a matrix. Pricing
// enumerates the first n-1 parties and picks the last party's signs by
// best response, which is exact because each setting of the last party
// contributes independently.
class GaugeOracle final : public ColumnOracle {
public:
    GaugeOracle(const CgSpace& space)
        : space_(space),
          d_(space.dim()),
          n_strategies_(space.scenario().strategy_count()),
          scratch_(space.make_strategy_scratch()) {
        const auto& sc = space_.scenario();
        m_last_ = sc.settings(sc.parties() - 1);
        prefix_count_ = n_strategies_ >> m_last_;
    }

    int rows() const override { return d_; }
    std::int64_t columns() const override { return n_strategies_; }
    double cost(std::int64_t) const override { return 1.0; }

    void column(std::int64_t j, double* out) const override {
        space_.strategy_column(j, out, scratch_);
    }

    std::pair<double, std::int64_t> price(const double* y, bool use_costs) const override {
        std::vector<std::pair<double, std::int64_t>> out;
        price_top_k(y, use_costs, 1, out);
        return out.empty() ? std::pair<double, std::int64_t>{0.0, -1} : out.front();
    }

    // Reduced cost of strategy l is (1 - y.c_l) in phase 2; maximizing
    // y.c_l over all strategies also yields the exact dual scaling bound
    // used for early termination.
    void price_top_k(const double* y, bool use_costs, int k,
                     std::vector<std::pair<double, std::int64_t>>& out) const override {
        const double base_cost = use_costs ? 1.0 : 0.0;
        out.clear();
        auto offer = [&](double value, std::int64_t j) {
            const double rc = base_cost - value;
            if (static_cast<int>(out.size()) == k && rc >= out.back().first) return;
            auto pos = out.begin();
            while (pos != out.end() && pos->first <= rc) ++pos;
            out.emplace(pos, rc, j);
            if (static_cast<int>(out.size()) > k) out.pop_back();
        };
        if (space_.scenario().parties() == 2)
            price_bipartite(y, offer);
        else
            price_generic(y, offer);
    }

private:
    // Alice's sign vectors walked in Gray-code order so `base` (marginal
    // part) and `w` (Bob's per-setting accumulators) update in O(m_B) per
    // step; Bob's block is then the per-setting best response.
    template <typename Offer>
    void price_bipartite(const double* y, Offer&& offer) const {
        const auto& sc = space_.scenario();
        const int m_a = sc.settings(0);
        const int m_b = sc.settings(1);
        const bool has_marginals = d_ > m_a * m_b;  // full vs joint-only space
        const double* y_a = has_marginals ? y : nullptr;
        const double* y_b = has_marginals ? y + m_a : nullptr;
        const double* y_joint = has_marginals ? y + m_a + m_b : y;

        std::vector<double> w(m_b, 0.0);
        double base = 0.0;
        for (int x = 0; x < m_a; ++x) {
            if (has_marginals) base += y_a[x];
            for (int yy = 0; yy < m_b; ++yy) w[yy] += y_joint[x * m_b + yy];
        }
        if (has_marginals)
            for (int yy = 0; yy < m_b; ++yy) w[yy] += y_b[yy];

        std::int64_t a_mask = 0;  // bit x set -> a_x = -1
        for (std::int64_t k = 0;; ++k) {
            double value = base;
            std::int64_t b_block = 0;
            for (int yy = 0; yy < m_b; ++yy) {
                if (w[yy] >= 0.0)
                    value += w[yy];
                else {
                    value -= w[yy];
                    b_block |= std::int64_t{1} << yy;
                }
            }
            offer(value, (a_mask << m_b) | b_block);
            if (k + 1 >= prefix_count_) break;
            const int flip = std::countr_zero(static_cast<std::uint64_t>(k + 1));
            a_mask ^= std::int64_t{1} << flip;
            const double sign = (a_mask >> flip) & 1 ? -2.0 : 2.0;
            if (has_marginals) base += sign * y_a[flip];
            for (int yy = 0; yy < m_b; ++yy) w[yy] += sign * y_joint[flip * m_b + yy];
        }
    }

    template <typename Offer>
    void price_generic(const double* y, Offer&& offer) const {
        const auto& sc = space_.scenario();
        const int n = sc.parties();
        const auto& coords = space_.coords();
        std::vector<double> w(m_last_);
        for (std::int64_t prefix = 0; prefix < prefix_count_; ++prefix) {
            space_.decode_strategy(prefix << m_last_, scratch_);
            double base = 0.0;
            for (double& v : w) v = 0.0;
            for (std::size_t c = 0; c < coords.size(); ++c) {
                const auto& coord = coords[c];
                int prod = 1;
                int k = 0;
                int last_setting = -1;
                for (int p = 0; p < n; ++p)
                    if (coord.mask & (1u << p)) {
                        if (p == n - 1)
                            last_setting = coord.settings[k++];
                        else
                            prod *= scratch_[p][coord.settings[k++]];
                    }
                const double contrib = y[c] * prod;
                if (last_setting >= 0)
                    w[last_setting] += contrib;
                else
                    base += contrib;
            }
            double value = base;
            std::int64_t last_block = 0;
            for (int x = 0; x < m_last_; ++x) {
                if (w[x] >= 0.0)
                    value += w[x];
                else {
                    value -= w[x];
                    last_block |= std::int64_t{1} << x;
                }
            }
            offer(value, (prefix << m_last_) | last_block);
        }
    }

    const CgSpace& space_;
    int d_;
    std::int64_t n_strategies_;
    int m_last_ = 0;
    std::int64_t prefix_count_ = 0;
    mutable CgSpace::StrategySigns scratch_;  // oracle is used by one solve at a time
};

// Membership queries against one fixed scenario polytope. Consecutive
// classify() calls warm-start from the previous optimal basis; because the
// gauge LP's constraint matrix does not depend on the target, a basis from
// one target often stays feasible for the next. The verdict for a target
// never depends on earlier calls beyond the simplex path taken.
class MembershipSolver {
public:
    explicit MembershipSolver(const CgSpace& space) : space_(space), oracle_(space) {
        if (space_.scenario().strategy_count() > kEnumerationCap)
            throw std::invalid_argument("membership: enumeration cap exceeded");
    }

    // Starting basis for the next classify() call (e.g. the final basis of
    // a related solve); ignored if it turns out infeasible for the target.
    void seed_basis(std::vector<std::int64_t> basis) { last_basis_ = std::move(basis); }
    const std::vector<std::int64_t>& basis() const { return last_basis_; }

    // Exact visibility plus a certifying model when local.
    LocalityVerdict classify(const std::vector<double>& target) {
        const SimplexSolution sol = solve(target, SimplexOptions{});
        LocalityVerdict verdict = verdict_from_gauge(sol.objective);
        if (verdict.is_local) verdict.model = build_model(sol);
        return verdict;
    }

    // Locality verdict only. Stops as soon as the primal value (an upper
    // bound on the gauge) or the scaled dual value (a lower bound) prove
    // the verdict; both bounds are exact, so the answer always matches the
    // converged one. `visibility` carries the certified bound at the stop.
    bool is_local(const std::vector<double>& target) {
        const double threshold = 1.0 / (1.0 - kVisibilityTolerance);  // on the gauge
        SimplexOptions options;
        options.stop_rule = [threshold](double objective, double rc_min) {
            if (objective <= threshold) return true;  // gauge <= thr: local
            // rc_min = 1 - max_l y.c_l; dual bound gauge >= objective / max
            const double max_value = 1.0 - rc_min;
            return max_value > 0.0 && objective > threshold * max_value;  // nonlocal
        };
        const SimplexSolution sol = solve(target, options);
        return sol.objective <= threshold;
    }

private:
    SimplexSolution solve(const std::vector<double>& target, SimplexOptions options) {
        SimplexSolver solver(oracle_, target, options);
        SimplexSolution sol;
        try {
            sol = solver.solve(last_basis_);
        } catch (const SimplexStallError&) {
            last_basis_.clear();
            throw;
        }
        if (sol.status != SimplexSolution::Status::Optimal) {
            last_basis_.clear();
            throw SimplexStallError("membership: gauge LP reported infeasible");
        }
        last_basis_ = sol.basis;
        return sol;
    }

    LocalityVerdict verdict_from_gauge(double gauge) const {
        LocalityVerdict verdict;
        verdict.visibility = gauge <= 1.0 ? 1.0 : 1.0 / gauge;
        verdict.is_local = verdict.visibility >= 1.0 - kVisibilityTolerance;
        return verdict;
    }

    // Decomposition of the target itself: the gauge weights (summing to
    // gamma <= 1) padded with the uniform distribution, which is the even
    // mixture of the 2^n per-party sign flips of the all-plus strategy.
    LocalModel build_model(const SimplexSolution& sol) const {
        LocalModel model;
        double total = 0.0;
        for (const auto& [j, value] : sol.basic)
            if (value > 1e-12) {
                model.weights.emplace_back(j, value);
                total += value;
            }
        const Scenario& sc = space_.scenario();
        const int n = sc.parties();
        const double pad = (1.0 - total) / (1 << n);
        if (pad > 1e-15) {
            for (int flips = 0; flips < (1 << n); ++flips) {
                std::int64_t index = 0;
                for (int p = 0; p < n; ++p) {
                    const int m = sc.settings(p);
                    const std::int64_t block =
                        (flips >> p) & 1 ? (std::int64_t{1} << m) - 1 : 0;
                    index = (index << m) | block;
                }
                model.weights.emplace_back(index, pad);
            }
        }
        return model;
    }

    const CgSpace& space_;
    GaugeOracle oracle_;
    std::vector<std::int64_t> last_basis_;
};

inline LocalityVerdict membership_lp(const CgSpace& space, const std::vector<double>& target) {
    MembershipSolver solver(space);
    return solver.classify(target);
}

}  // namespace detail

// Largest v with v.b + (1-v).uniform local, solved as an LP over strategy
// weights in full correlator coordinates. Numerical LP breakdown raises
// SimplexStallError and is never reported as "nonlocal".
inline LocalityVerdict visibility(const Behavior& b) {
    const CgSpace space = CgSpace::full(b.scenario());
    return detail::membership_lp(space, space.from_behavior(b));
}

inline bool is_nonlocal(const Behavior& b) { return !visibility(b).is_local; }

// Membership of the joint correlator matrix in the hull of the rank-one
// sign matrices a.b^T (marginals ignored). Never stricter than full
// membership: correlator-nonlocal implies behavior-nonlocal.
inline LocalityVerdict correlation_membership(const CorrelatorTable& t) {
    if (t.scenario.parties() != 2)
        throw std::invalid_argument("correlation_membership: bipartite only");
    if (t.scenario.settings(0) + t.scenario.settings(1) > 30)
        throw std::invalid_argument("correlation_membership: cap exceeded");
    const CgSpace space = CgSpace::joint_only(t.scenario);
    return detail::membership_lp(space, t.joint);
}

enum class IndicatorVariant { Full, Correlation };

// Locality verdict for a (state, measurement set) pair; the Monte-Carlo
// hot path, bypassing the probability table.
inline LocalityVerdict classify_measurements(const StateVector& state, const MeasurementSet& ms,
                                             IndicatorVariant variant) {
    const Scenario scenario = ms.scenario();
    if (variant == IndicatorVariant::Correlation) {
        if (scenario.parties() != 2)
            throw std::invalid_argument("classify_measurements: correlation variant is bipartite");
        const CgSpace space = CgSpace::joint_only(scenario);
        return detail::membership_lp(space, space.from_state(state, ms));
    }
    const CgSpace space = CgSpace::full(scenario);
    return detail::membership_lp(space, space.from_state(state, ms));
}

}  // namespace nlvol
