#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "nlvol/theorems.hpp"

namespace nlvol {

// Randomized verification suites. Each trial is seeded from its index, so
// suites shard across threads and reproduce exactly.

struct SuiteResult {
    std::string name;
    std::int64_t trials = 0;
    std::int64_t violations = 0;
    std::int64_t vacuous = 0;
    bool passed = true;
    std::string detail;
};

namespace detail {

// Lane for auxiliary draws (coefficients, angles); measurement lanes only
// use the low bits, so this cannot collide.
inline constexpr std::uint32_t kAuxLane = 0xA0000000u;

inline CMatrix random_su2(CounterRng& rng) {
    // unit quaternion (w, x, y, z) -> w 1 + i (x sx + y sy + z sz)
    double q[4];
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (double& v : q) {
            v = rng.normal();
            n2 += v * v;
        }
    } while (n2 < 1e-12);
    const double inv = 1.0 / std::sqrt(n2);
    for (double& v : q) v *= inv;
    CMatrix u(2, 2);
    u(0, 0) = Complex(q[0], q[3]);
    u(0, 1) = Complex(q[2], q[1]);
    u(1, 0) = Complex(-q[2], q[1]);
    u(1, 1) = Complex(q[0], -q[3]);
    return u;
}

// Rotation acting on Bloch vectors by conjugation: R_ij = Tr(s_i U s_j U+)/2.
inline Mat3 bloch_rotation(const CMatrix& u) {
    const CMatrix* sigma[3] = {&pauli_x(), &pauli_y(), &pauli_z()};
    const CMatrix ud = u.dagger();
    Mat3 r;
    for (int j = 0; j < 3; ++j) {
        const CMatrix conj = u * (*sigma[j]) * ud;
        for (int i = 0; i < 3; ++i) r[i][j] = 0.5 * ((*sigma[i]) * conj).trace().real();
    }
    return r;
}

inline Mat3 transpose(const Mat3& r) {
    Mat3 t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t[i][j] = r[j][i];
    return t;
}

inline StateVector apply_local_unitaries(const StateVector& state,
                                         const std::vector<CMatrix>& units) {
    CVector amps = state.amplitudes();
    for (int p = 0; p < state.n_qubits(); ++p)
        apply_single_qubit(units[p], amps, state.n_qubits(), p);
    return StateVector(state.n_qubits(), std::move(amps));
}

}  // namespace detail

// Monotonicity of correlation Bell values in the entanglement parameter,
// plus the two side conditions the argument rests on: the separable value
// (b+ + b-)/2 never exceeds the local bound, and a violation forces b+ > b-.
inline SuiteResult run_theorem_monotonicity_suite(const Scenario& scenario, std::int64_t trials,
                                                  std::uint64_t seed,
                                                  const std::string& name = "theorem1") {
    SuiteResult res;
    res.name = name + "[" + scenario.to_string() + "]";
    res.trials = trials;
    const int n = scenario.parties();
    std::int64_t side_condition_violations = 0;
    double worst_margin = std::numeric_limits<double>::infinity();

    for (std::int64_t trial = 0; trial < trials; ++trial) {
        const SeedSpec spec{seed, static_cast<std::uint64_t>(trial)};
        CounterRng aux(spec, detail::kAuxLane);
        const BellInequality ineq = random_correlation_inequality(scenario, aux);
        const MeasurementSet ms = sample_measurement_set(scenario, spec);
        const double u1 = aux.uniform() * std::numbers::pi / 4;
        const double u2 = aux.uniform() * std::numbers::pi / 4;
        if (u1 == u2) {
            ++res.vacuous;
            continue;
        }
        const double g_loc = local_bound(ineq);
        const BellOperator op = bell_operator(ineq, ms);
        const double b_plus = expectation(ghz_plus(n), op);
        const double b_minus = expectation(ghz_minus(n), op);
        if (0.5 * (b_plus + b_minus) > g_loc + 1e-9) ++side_condition_violations;

        const double theta1 = std::min(u1, u2);
        const double theta2 = std::max(u1, u2);
        const double b1 = expectation(make_ghz_family(n, theta1), op);
        const double b2 = expectation(make_ghz_family(n, theta2), op);
        if (!(b1 > g_loc)) {
            ++res.vacuous;
            continue;
        }
        if (!(b_plus > b_minus)) ++side_condition_violations;
        if (!(b2 > b1)) {
            ++res.violations;
        } else {
            worst_margin = std::min(worst_margin, b2 - b1);
        }
    }
    res.violations += side_condition_violations;
    res.passed = res.violations == 0;
    std::ostringstream os;
    os << "non-vacuous " << (res.trials - res.vacuous) << ", side-condition violations "
       << side_condition_violations;
    res.detail = os.str();
    return res;
}

// GHZ-family decomposition residual over random correlation operators.
inline SuiteResult run_decomposition_suite(int n_parties, std::int64_t trials, std::uint64_t seed,
                                           double tol = 1e-10) {
    SuiteResult res;
    Scenario scenario(std::vector<int>(n_parties, 2));
    res.name = "decomposition[n=" + std::to_string(n_parties) + "]";
    res.trials = trials;
    double max_residual = 0.0;
    for (std::int64_t trial = 0; trial < trials; ++trial) {
        const SeedSpec spec{seed, static_cast<std::uint64_t>(trial)};
        CounterRng aux(spec, detail::kAuxLane);
        const BellInequality ineq = random_correlation_inequality(scenario, aux);
        const MeasurementSet ms = sample_measurement_set(scenario, spec);
        const double theta = aux.uniform() * std::numbers::pi / 4;
        const DecompositionReport rep = check_decomposition(ineq, ms, theta);
        max_residual = std::max(max_residual, rep.residual);
        if (rep.residual >= tol) ++res.violations;
    }
    res.passed = res.violations == 0;
    std::ostringstream os;
    os << "max residual " << max_residual;
    res.detail = os.str();
    return res;
}

// For three parties the decomposition must fail: the all-z correlation
// operator leaves a residual of |cos(2 theta)|.
inline SuiteResult run_odd_parties_exhibit() {
    SuiteResult res;
    res.name = "decomposition-odd-exhibit[n=3]";
    res.trials = 1;
    Scenario sc({2, 2, 2});
    std::vector<double> joint(sc.setting_tuples(), 0.0);
    joint[0] = 1.0;  // <A_0 B_0 C_0>
    BellInequality ineq(sc, std::move(joint), {{0, 0}, {0, 0}, {0, 0}});
    MeasurementSet ms;
    ms.parties.assign(3, {Observable::from_bloch({0, 0, 1}), Observable::from_bloch({0, 0, 1})});
    const DecompositionReport rep =
        check_decomposition(ineq, ms, std::numbers::pi / 8, /*require_even=*/false);
    res.passed = rep.residual > 1e-3;
    if (!res.passed) ++res.violations;
    std::ostringstream os;
    os << "residual " << rep.residual << " (must exceed 1e-3)";
    res.detail = os.str();
    return res;
}

// Behavior-route CHSH against the closed form on a (theta, xi) grid, and
// the violation region against the threshold rule.
inline SuiteResult run_chsh_family_grid(int resolution = 50) {
    SuiteResult res;
    res.name = "chsh-family-grid";
    res.trials = static_cast<std::int64_t>(resolution) * resolution;
    double max_gap = 0.0;
    std::int64_t misclassified = 0;
    for (int i = 0; i < resolution; ++i) {
        const double theta = (i + 0.5) * (std::numbers::pi / 4) / resolution;
        for (int j = 0; j < resolution; ++j) {
            const double xi = (j + 0.5) * (std::numbers::pi / 2) / resolution;
            const CHSHFamilyPoint pt = chsh_family_value(theta, xi);  // checks 1e-12 internally
            const double closed = 2.0 * (std::sin(xi) + std::sin(2.0 * theta) * std::cos(xi));
            max_gap = std::max(max_gap, std::abs(pt.value - closed));
            const bool violates = pt.value > 2.0;
            const bool predicted = std::sin(2.0 * theta) > chsh_violation_threshold(xi);
            if (violates != predicted) ++misclassified;
        }
    }
    res.violations = misclassified;
    res.passed = misclassified == 0;
    std::ostringstream os;
    os << "max closed-form gap " << max_gap;
    res.detail = os.str();
    return res;
}

// Local unitaries on the state versus transposed Bloch rotations on the
// measurements: the behavior table must match entrywise.
inline SuiteResult run_lu_invariance_suite(std::int64_t trials, std::uint64_t seed,
                                           double tol = 1e-10) {
    SuiteResult res;
    res.name = "lu-invariance";
    res.trials = trials;
    const Scenario scenario({2, 2});
    double max_dev = 0.0;
    for (std::int64_t trial = 0; trial < trials; ++trial) {
        const SeedSpec spec{seed, static_cast<std::uint64_t>(trial)};
        CounterRng aux(spec, detail::kAuxLane);
        const StateVector psi = random_state(2, aux);
        const MeasurementSet ms = sample_measurement_set(scenario, spec);
        const std::vector<CMatrix> units = {detail::random_su2(aux), detail::random_su2(aux)};
        const std::vector<Mat3> rotations = {detail::transpose(detail::bloch_rotation(units[0])),
                                             detail::transpose(detail::bloch_rotation(units[1]))};
        const Behavior lhs = compute_behavior(detail::apply_local_unitaries(psi, units), ms);
        const Behavior rhs = compute_behavior(psi, rotate_measurement_set(ms, rotations));
        for (std::size_t k = 0; k < lhs.table().size(); ++k)
            max_dev = std::max(max_dev, std::abs(lhs.table()[k] - rhs.table()[k]));
    }
    res.violations = max_dev > tol ? 1 : 0;
    res.passed = res.violations == 0;
    std::ostringstream os;
    os << "max entrywise deviation " << max_dev;
    res.detail = os.str();
    return res;
}

inline SuiteResult run_counterexample_suite() {
    SuiteResult res;
    res.name = "counterexample";
    res.trials = 1;
    const CounterexampleReport rep = verify_counterexample();
    res.passed = rep.all_passed();
    if (!res.passed) {
        res.violations = 1;
        res.detail = rep.failing_clause();
    } else {
        std::ostringstream os;
        os << "value " << rep.inequality_value << " > bound " << rep.enumerated_bound
           << ", visibilities " << rep.visibility_partial << " / " << rep.visibility_maximal;
        res.detail = os.str();
    }
    return res;
}

struct TheoremRunConfig {
    std::int64_t trials = 10'000;
    std::uint64_t seed = 1;
    int workers = 1;
    std::int64_t trend_samples = 2'000;
};

// The full verification battery in report order.
inline std::vector<SuiteResult> run_all_suites(const TheoremRunConfig& cfg) {
    std::vector<SuiteResult> out;
    out.push_back(run_theorem_monotonicity_suite(Scenario({2, 2}), cfg.trials, cfg.seed));
    out.push_back(run_theorem_monotonicity_suite(Scenario({3, 3}), cfg.trials, cfg.seed + 1));
    out.push_back(run_theorem_monotonicity_suite(Scenario({2, 2, 2, 2}), cfg.trials, cfg.seed + 2,
                                                 "theorem2"));
    out.push_back(run_decomposition_suite(2, cfg.trials, cfg.seed + 3));
    out.push_back(run_decomposition_suite(4, cfg.trials, cfg.seed + 4));
    out.push_back(run_odd_parties_exhibit());
    out.push_back(run_chsh_family_grid());
    out.push_back(run_lu_invariance_suite(std::min<std::int64_t>(cfg.trials, 1000), cfg.seed + 5));
    out.push_back(run_counterexample_suite());

    // Saturation trend on nested scenarios, paired per sample.
    SuiteResult trend;
    trend.name = "settings-saturation-trend";
    trend.trials = cfg.trend_samples;
    const TrendReport rep = check_property3_trend(
        phi_plus(), {Scenario({2, 2}), Scenario({3, 4}), Scenario({8, 8})}, cfg.trend_samples,
        cfg.seed + 6, cfg.workers);
    trend.passed = rep.per_sample_monotone;
    std::ostringstream os;
    for (const auto& est : rep.estimates)
        os << "[" << est.scenario.to_string() << "] p=" << est.p_hat << " ";
    for (std::size_t k = 1; k < rep.estimates.size(); ++k)
        if (rep.estimates[k].p_hat < rep.estimates[k - 1].p_hat) trend.passed = false;
    if (!trend.passed) trend.violations = 1;
    trend.detail = os.str();
    out.push_back(std::move(trend));
    return out;
}

}  // namespace nlvol
