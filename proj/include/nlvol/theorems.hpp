#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlvol/behavior.hpp"
#include "nlvol/bell_operator.hpp"
#include "nlvol/inequality.hpp"
#include "nlvol/measurement.hpp"
#include "nlvol/polytope.hpp"
#include "nlvol/state.hpp"
#include "nlvol/volume.hpp"

namespace nlvol {

// --- Bell-value decomposition over the GHZ family ---------------------------
//
// For a correlation Bell operator B and the states cos(t)|0..0>+sin(t)|1..1>
// on an even number of parties,
//
//     b_t = (b+ + b-)/2 + sin(2t)/2 (b+ - b-)
//
// where b+- are the expectations of B on (|0..0> +- |1..1>)/sqrt(2). The
// identity fails for odd party counts whenever the all-z Pauli word of B is
// populated, and check_decomposition exposes that residual.

struct DecompositionReport {
    double b_plus = 0.0;
    double b_minus = 0.0;
    double theta = 0.0;
    double b_theta_direct = 0.0;
    double b_theta_reconstructed = 0.0;
    double residual = 0.0;
};

inline DecompositionReport check_decomposition(const BellInequality& ineq,
                                               const MeasurementSet& ms, double theta,
                                               bool require_even = true) {
    if (!ineq.is_correlation_inequality())
        throw std::invalid_argument("check_decomposition: inequality has marginal terms");
    const int n = ineq.scenario.parties();
    if (require_even && n >= 3 && n % 2 != 0)
        throw std::invalid_argument("check_decomposition: odd party count not covered");

    const BellOperator op = bell_operator(ineq, ms);
    DecompositionReport r;
    r.theta = theta;
    r.b_plus = expectation(ghz_plus(n), op);
    r.b_minus = expectation(ghz_minus(n), op);
    r.b_theta_direct = expectation(make_ghz_family(n, theta), op);
    r.b_theta_reconstructed =
        0.5 * (r.b_plus + r.b_minus) + 0.5 * std::sin(2.0 * theta) * (r.b_plus - r.b_minus);
    r.residual = std::abs(r.b_theta_direct - r.b_theta_reconstructed);
    return r;
}

// --- Entanglement monotonicity of correlation Bell values -------------------

struct Theorem1Report {
    double g_loc = 0.0;
    double b_theta1 = 0.0;
    double b_theta2 = 0.0;
    bool vacuous = true;   // theta1 does not violate, nothing to check
    bool holds = true;     // when non-vacuous: b_theta2 > b_theta1
};

// If the less entangled state violates the correlation inequality, the more
// entangled state must violate it strictly more, for the same measurements.
inline Theorem1Report check_theorem1(const BellInequality& ineq, const MeasurementSet& ms,
                                     double theta1, double theta2) {
    if (!ineq.is_correlation_inequality())
        throw std::invalid_argument("check_theorem1: inequality has marginal terms");
    if (!(theta1 < theta2))
        throw std::invalid_argument("check_theorem1: need theta1 < theta2");

    Theorem1Report r;
    r.g_loc = ineq.local_bound ? *ineq.local_bound : local_bound(ineq);
    const int n = ineq.scenario.parties();
    const BellOperator op = bell_operator(ineq, ms);
    r.b_theta1 = expectation(make_ghz_family(n, theta1), op);
    r.b_theta2 = expectation(make_ghz_family(n, theta2), op);
    r.vacuous = !(r.b_theta1 > r.g_loc);
    r.holds = r.vacuous || r.b_theta2 > r.b_theta1;
    return r;
}

// --- The one-parameter CHSH measurement family -------------------------------
//
//   A0 = sx, A1 = sz, B0 = cos(xi) sx + sin(xi) sz, B1 = cos(xi) sx - sin(xi) sz
//
// whose CHSH value on cos(t)|00>+sin(t)|11> is 2(sin(xi) + sin(2t) cos(xi)).

struct CHSHFamilyPoint {
    double theta = 0.0;
    double xi = 0.0;
    double value = 0.0;
};

inline MeasurementSet chsh_family_measurements(double xi) {
    MeasurementSet ms;
    ms.parties.resize(2);
    ms.parties[0].push_back(Observable::from_bloch({1.0, 0.0, 0.0}));
    ms.parties[0].push_back(Observable::from_bloch({0.0, 0.0, 1.0}));
    ms.parties[1].push_back(Observable::from_bloch({std::cos(xi), 0.0, std::sin(xi)}));
    ms.parties[1].push_back(Observable::from_bloch({std::cos(xi), 0.0, -std::sin(xi)}));
    return ms;
}

// Evaluates the family point through the behavior pipeline and checks it
// against the closed form within 1e-12 before returning.
inline CHSHFamilyPoint chsh_family_value(double theta, double xi) {
    const MeasurementSet ms = chsh_family_measurements(xi);
    const Behavior b = compute_behavior(make_pure_two_qubit(theta), ms);
    const double via_behavior = evaluate_inequality(chsh(), b);
    const double closed_form = 2.0 * (std::sin(xi) + std::sin(2.0 * theta) * std::cos(xi));
    if (std::abs(via_behavior - closed_form) > 1e-12)
        throw std::runtime_error("chsh_family_value: behavior and closed form disagree");
    return CHSHFamilyPoint{theta, xi, closed_form};
}

// Threshold t(xi) = (1 - sin(xi))/cos(xi): the family point violates CHSH
// exactly when sin(2 theta) > t(xi).
inline double chsh_violation_threshold(double xi) {
    if (!(xi > 0.0 && xi < std::numbers::pi / 2))
        throw std::invalid_argument("chsh_violation_threshold: xi must be inside (0, pi/2)");
    return (1.0 - std::sin(xi)) / std::cos(xi);
}

// --- Counterexample: marginal terms break the monotonicity ------------------
//
// A [3,4] configuration of measurements that makes the maximally entangled
// state behave locally while cos(t)|00>+sin(t)|11> at t = 3 pi/16 is
// nonlocal; the inequality separating the latter carries marginal terms.
// Directions and coefficients are stored at 4-decimal print precision; the
// vectors are re-normalized on construction.

inline double counterexample_theta() { return 3.0 * std::numbers::pi / 16.0; }

inline MeasurementSet counterexample_measurements() {
    const std::vector<Vec3> alice = {
        {0.0213, 0.9599, -0.2795}, {0.3539, 0.9320, -0.0780}, {0.8786, -0.4772, 0.0176}};
    const std::vector<Vec3> bob = {{0.8685, 0.2420, 0.4326},
                                   {0.0095, 0.6762, 0.7367},
                                   {-0.0025, 0.6456, -0.7636},
                                   {0.6437, 0.0175, -0.7651}};
    MeasurementSet ms;
    ms.parties.resize(2);
    for (const Vec3& v : alice) {
        if (std::abs(norm(v) - 1.0) > 1e-3)
            throw std::logic_error("counterexample: stored vector drifted from unit length");
        ms.parties[0].push_back(Observable::from_bloch(normalized(v)));
    }
    for (const Vec3& v : bob) {
        if (std::abs(norm(v) - 1.0) > 1e-3)
            throw std::logic_error("counterexample: stored vector drifted from unit length");
        ms.parties[1].push_back(Observable::from_bloch(normalized(v)));
    }
    return ms;
}

inline BellInequality counterexample_inequality() {
    Scenario sc({3, 4});
    // joint[x*4 + y] multiplies <A_x B_y>
    const std::vector<double> joint = {
        0.25, 0.25, 0.0, -0.25,   // x = 0
        -0.25, 0.25, 0.0, 0.0,    // x = 1
        -0.25, -0.25, 0.0, 0.25,  // x = 2
    };
    const std::vector<std::vector<double>> marg = {{-0.25, 0.0, 0.25},
                                                   {-0.13, -0.13, -0.01, 0.0}};
    return BellInequality(std::move(sc), joint, marg);
}

struct CounterexampleReport {
    bool partial_state_nonlocal = false;   // clause (a)
    bool maximal_state_local = false;      // clause (b)
    bool value_exceeds_bound = false;      // clause (c)
    bool has_marginal_terms = false;       // clause (d)
    double visibility_partial = 0.0;
    double visibility_maximal = 0.0;
    double inequality_value = 0.0;
    double enumerated_bound = 0.0;

    bool all_passed() const {
        return partial_state_nonlocal && maximal_state_local && value_exceeds_bound &&
               has_marginal_terms;
    }

    std::string failing_clause() const {
        if (!partial_state_nonlocal) return "(a) partially entangled state not flagged nonlocal";
        if (!maximal_state_local) return "(b) maximally entangled state not flagged local";
        if (!value_exceeds_bound) return "(c) inequality value does not exceed enumerated bound";
        if (!has_marginal_terms) return "(d) inequality has no marginal terms";
        return "";
    }
};

inline CounterexampleReport verify_counterexample() {
    const MeasurementSet ms = counterexample_measurements();
    const BellInequality ineq = counterexample_inequality();

    CounterexampleReport r;
    const Behavior partial = compute_behavior(make_pure_two_qubit(counterexample_theta()), ms);
    const Behavior maximal = compute_behavior(phi_plus(), ms);

    const LocalityVerdict v_partial = visibility(partial);
    const LocalityVerdict v_maximal = visibility(maximal);
    r.visibility_partial = v_partial.visibility;
    r.visibility_maximal = v_maximal.visibility;
    r.partial_state_nonlocal = !v_partial.is_local;
    r.maximal_state_local = v_maximal.is_local;

    r.inequality_value = evaluate_inequality(ineq, partial);
    r.enumerated_bound = local_bound(ineq);  // 128-vertex enumeration
    r.value_exceeds_bound = r.inequality_value > r.enumerated_bound + 1e-6;
    r.has_marginal_terms = !ineq.is_correlation_inequality();
    return r;
}

// --- Saturation trend under nested scenarios ---------------------------------

struct TrendReport {
    std::vector<VolumeEstimate> estimates;  // one per scenario, smallest first
    bool per_sample_monotone = true;
};

// Shared measurement stream across nested scenarios: each sample's
// indicator may only switch on as settings are added, since a sub-behavior
// being nonlocal forces every extension to be nonlocal.
inline TrendReport check_property3_trend(const StateVector& state,
                                         const std::vector<Scenario>& nested,
                                         std::int64_t samples, std::uint64_t seed,
                                         int workers = 1) {
    if (nested.empty()) throw std::invalid_argument("check_property3_trend: no scenarios");
    for (std::size_t k = 1; k < nested.size(); ++k) {
        if (nested[k].parties() != nested[0].parties())
            throw std::invalid_argument("check_property3_trend: party counts differ");
        for (int p = 0; p < nested[0].parties(); ++p)
            if (nested[k].settings(p) < nested[k - 1].settings(p))
                throw std::invalid_argument("check_property3_trend: scenarios not nested");
    }

    TrendReport report;
    std::vector<std::vector<std::uint8_t>> indicators;
    for (const Scenario& sc : nested) {
        auto run = detail::run_paired_samples({state}, sc, samples, seed, IndicatorVariant::Full,
                                              workers);
        VolumeEstimate est = detail::summarize(run.indicators[0], sc, seed);
        report.estimates.push_back(std::move(est));
        indicators.push_back(std::move(run.indicators[0]));
    }
    for (std::int64_t i = 0; i < samples; ++i)
        for (std::size_t k = 1; k < indicators.size(); ++k)
            if (indicators[k - 1][i] == detail::kNonlocal && indicators[k][i] == detail::kLocal)
                report.per_sample_monotone = false;
    return report;
}

}  // namespace nlvol
