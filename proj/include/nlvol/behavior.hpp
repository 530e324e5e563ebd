#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "nlvol/inequality.hpp"
#include "nlvol/linalg.hpp"
#include "nlvol/measurement.hpp"
#include "nlvol/scenario.hpp"
#include "nlvol/state.hpp"

namespace nlvol {

// Joint conditional outcome table p(a|x) for a scenario. Outcomes are +-1;
// outcome-tuple bit 0 means +1 (party 0 is the top bit). Entries are
// clamped to [0,1] within a 1e-10 guard; larger positivity violations, bad
// normalization or signaling raise instead of being repaired.
class Behavior {
public:
    Behavior(Scenario scenario, std::vector<double> table, bool validate = true)
        : scenario_(std::move(scenario)), p_(std::move(table)) {
        const auto expected = static_cast<std::size_t>(scenario_.setting_tuples()) *
                              static_cast<std::size_t>(scenario_.outcome_tuples());
        if (p_.size() != expected) throw std::invalid_argument("Behavior: table size mismatch");
        for (double& v : p_) {
            if (v < -1e-10 || v > 1.0 + 1e-10)
                throw std::invalid_argument("Behavior: entry outside [0,1] beyond guard");
            v = std::clamp(v, 0.0, 1.0);
        }
        if (validate) {
            check_normalization();
            check_no_signaling();
        }
    }

    static Behavior uniform(const Scenario& scenario) {
        const double u = 1.0 / scenario.outcome_tuples();
        return Behavior(scenario,
                        std::vector<double>(static_cast<std::size_t>(scenario.setting_tuples()) *
                                                scenario.outcome_tuples(),
                                            u),
                        false);
    }

    const Scenario& scenario() const { return scenario_; }
    const std::vector<double>& table() const { return p_; }

    double p(std::int64_t setting_idx, int outcome_idx) const {
        return p_[static_cast<std::size_t>(setting_idx) * scenario_.outcome_tuples() + outcome_idx];
    }

    // Sign of party `p`'s outcome inside outcome tuple `a`: +1 or -1.
    int outcome_sign(int outcome_idx, int party) const {
        return ((outcome_idx >> (scenario_.parties() - 1 - party)) & 1) ? -1 : 1;
    }

    // Marginal of `party` for outcome +1, given the full setting tuple.
    double marginal_plus(int party, std::int64_t setting_idx) const {
        double s = 0.0;
        for (int a = 0; a < scenario_.outcome_tuples(); ++a)
            if (outcome_sign(a, party) == 1) s += p(setting_idx, a);
        return s;
    }

private:
    void check_normalization() const {
        for (std::int64_t x = 0; x < scenario_.setting_tuples(); ++x) {
            double s = 0.0;
            for (int a = 0; a < scenario_.outcome_tuples(); ++a) s += p(x, a);
            if (std::abs(s - 1.0) > 1e-9)
                throw std::invalid_argument("Behavior: setting tuple not normalized");
        }
    }

    // Every party's marginal must not depend on the other parties' settings.
    void check_no_signaling() const {
        const int n = scenario_.parties();
        std::vector<int> x(n);
        for (int party = 0; party < n; ++party) {
            std::vector<double> reference(scenario_.settings(party),
                                          std::numeric_limits<double>::quiet_NaN());
            for (std::int64_t idx = 0; idx < scenario_.setting_tuples(); ++idx) {
                scenario_.decode_setting(idx, x);
                const double m = marginal_plus(party, idx);
                double& ref = reference[x[party]];
                if (std::isnan(ref)) {
                    ref = m;
                } else if (std::abs(m - ref) > 1e-9) {
                    throw std::invalid_argument("Behavior: signaling marginal detected");
                }
            }
        }
    }

    Scenario scenario_;
    std::vector<double> p_;
};

// p(a|x) from Born-rule projections of the state. `validate` may be turned
// off in hot loops once the pipeline is trusted.
inline Behavior compute_behavior(const StateVector& state, const MeasurementSet& ms,
                                 bool validate = true) {
    const Scenario scenario = ms.scenario();
    const int n = scenario.parties();
    if (n != state.n_qubits())
        throw std::invalid_argument("compute_behavior: party count != qubit count");

    std::vector<double> table(static_cast<std::size_t>(scenario.setting_tuples()) *
                              scenario.outcome_tuples());
    std::vector<int> x(n);
    CVector work;
    for (std::int64_t idx = 0; idx < scenario.setting_tuples(); ++idx) {
        scenario.decode_setting(idx, x);
        for (int a = 0; a < scenario.outcome_tuples(); ++a) {
            work = state.amplitudes();
            for (int p = 0; p < n; ++p) {
                const int sign = ((a >> (n - 1 - p)) & 1) ? -1 : 1;
                apply_single_qubit(projector(ms.parties[p][x[p]], sign), work, n, p);
            }
            table[static_cast<std::size_t>(idx) * scenario.outcome_tuples() + a] = norm2(work);
        }
    }
    return Behavior(scenario, std::move(table), validate);
}

// Full-body correlators plus per-party marginals. For bipartite scenarios
// this determines the behavior completely; for n > 2 parties the
// intermediate (proper-subset) correlators are not stored.
struct CorrelatorTable {
    Scenario scenario;
    std::vector<double> joint;                  // [setting_index], product over all parties
    std::vector<std::vector<double>> marginal;  // [party][setting]
};

inline CorrelatorTable to_correlators(const Behavior& b) {
    const Scenario& sc = b.scenario();
    const int n = sc.parties();
    CorrelatorTable t{sc, std::vector<double>(sc.setting_tuples()), {}};
    for (std::int64_t x = 0; x < sc.setting_tuples(); ++x) {
        double s = 0.0;
        for (int a = 0; a < sc.outcome_tuples(); ++a) {
            int prod = 1;
            for (int p = 0; p < n; ++p) prod *= b.outcome_sign(a, p);
            s += prod * b.p(x, a);
        }
        t.joint[x] = s;
    }
    // Marginals averaged over the other parties' settings; for a valid
    // (no-signaling) behavior the average equals each individual value.
    t.marginal.resize(n);
    std::vector<int> x(n);
    for (int p = 0; p < n; ++p) {
        t.marginal[p].assign(sc.settings(p), 0.0);
        std::vector<std::int64_t> counts(sc.settings(p), 0);
        for (std::int64_t idx = 0; idx < sc.setting_tuples(); ++idx) {
            sc.decode_setting(idx, x);
            t.marginal[p][x[p]] += 2.0 * b.marginal_plus(p, idx) - 1.0;
            ++counts[x[p]];
        }
        for (int s = 0; s < sc.settings(p); ++s) t.marginal[p][s] /= counts[s];
    }
    return t;
}

// Inverse of to_correlators for bipartite scenarios:
// p(ab|xy) = (1 + a<A_x> + b<B_y> + ab<A_x B_y>)/4.
inline Behavior behavior_from_correlators(const CorrelatorTable& t, bool validate = true) {
    if (t.scenario.parties() != 2)
        throw std::invalid_argument("behavior_from_correlators: bipartite only");
    const Scenario& sc = t.scenario;
    const int m_b = sc.settings(1);
    std::vector<double> table(static_cast<std::size_t>(sc.setting_tuples()) * 4);
    for (int x = 0; x < sc.settings(0); ++x)
        for (int y = 0; y < m_b; ++y) {
            const std::int64_t idx = static_cast<std::int64_t>(x) * m_b + y;
            for (int a_idx = 0; a_idx < 4; ++a_idx) {
                const int a = (a_idx & 2) ? -1 : 1;
                const int b = (a_idx & 1) ? -1 : 1;
                table[static_cast<std::size_t>(idx) * 4 + a_idx] =
                    0.25 * (1.0 + a * t.marginal[0][x] + b * t.marginal[1][y] +
                            a * b * t.joint[idx]);
            }
        }
    return Behavior(sc, std::move(table), validate);
}

// v.b + (1-v).uniform
inline Behavior mix_with_uniform(const Behavior& b, double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("mix_with_uniform: v outside [0,1]");
    const double u = (1.0 - v) / b.scenario().outcome_tuples();
    std::vector<double> table = b.table();
    for (double& e : table) e = v * e + u;
    return Behavior(b.scenario(), std::move(table), false);
}

// Drops settings: keeps tuples whose setting for every party is below the
// sub-scenario's count. Yields a valid behavior of the sub-scenario.
inline Behavior restrict_settings(const Behavior& b, const Scenario& sub) {
    const Scenario& sc = b.scenario();
    if (sub.parties() != sc.parties())
        throw std::invalid_argument("restrict_settings: party count mismatch");
    for (int p = 0; p < sc.parties(); ++p)
        if (sub.settings(p) > sc.settings(p))
            throw std::invalid_argument("restrict_settings: sub-scenario not contained");
    std::vector<double> table(static_cast<std::size_t>(sub.setting_tuples()) *
                              sub.outcome_tuples());
    std::vector<int> x(sub.parties());
    for (std::int64_t idx = 0; idx < sub.setting_tuples(); ++idx) {
        sub.decode_setting(idx, x);
        const std::int64_t full_idx = sc.setting_index(x);
        for (int a = 0; a < sub.outcome_tuples(); ++a)
            table[static_cast<std::size_t>(idx) * sub.outcome_tuples() + a] = b.p(full_idx, a);
    }
    return Behavior(sub, std::move(table), false);
}

inline double evaluate_on_correlators(const BellInequality& ineq, const CorrelatorTable& t) {
    if (ineq.scenario != t.scenario)
        throw std::invalid_argument("evaluate_on_correlators: scenario mismatch");
    double v = 0.0;
    for (std::int64_t x = 0; x < ineq.scenario.setting_tuples(); ++x)
        v += ineq.joint[x] * t.joint[x];
    for (int p = 0; p < ineq.scenario.parties(); ++p)
        for (int s = 0; s < ineq.scenario.settings(p); ++s)
            v += ineq.marginal[p][s] * t.marginal[p][s];
    return v;
}

inline double evaluate_inequality(const BellInequality& ineq, const Behavior& b) {
    if (ineq.scenario != b.scenario())
        throw std::invalid_argument("evaluate_inequality: scenario mismatch");
    return evaluate_on_correlators(ineq, to_correlators(b));
}

}  // namespace nlvol
