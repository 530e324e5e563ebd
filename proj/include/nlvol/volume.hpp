#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "nlvol/cg.hpp"
#include "nlvol/measurement.hpp"
#include "nlvol/polytope.hpp"
#include "nlvol/scenario.hpp"
#include "nlvol/state.hpp"

namespace nlvol {

// Two-sided 95% Wilson score interval for a binomial proportion. Behaves
// properly at hits = 0 and hits = n (one-sided, endpoint pinned).
inline std::pair<double, double> wilson_interval(std::int64_t hits, std::int64_t samples) {
    if (samples <= 0) throw std::invalid_argument("wilson_interval: need samples >= 1");
    constexpr double z = 1.959963984540054;
    const double n = static_cast<double>(samples);
    const double p = static_cast<double>(hits) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct VolumeEstimate {
    VolumeEstimate(Scenario sc, std::uint64_t seed) : scenario(std::move(sc)), master_seed(seed) {}

    std::int64_t hits = 0;
    std::int64_t samples = 0;   // valid samples (failed LP solves excluded)
    std::int64_t failures = 0;
    double p_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    Scenario scenario;
    double theta = std::numeric_limits<double>::quiet_NaN();
    std::string state_label;
    std::uint64_t master_seed = 0;
};

namespace detail {

inline constexpr std::uint8_t kLocal = 0;
inline constexpr std::uint8_t kNonlocal = 1;
inline constexpr std::uint8_t kFailed = 2;

// Per-sample nonlocality indicators for several states sharing one
// measurement stream: sample i draws from SeedSpec(seed, i) regardless of
// which worker runs it, so results are invariant to the worker count.
// indicators[s][i] is the verdict of state s on sample i.
struct PairedRun {
    std::vector<std::vector<std::uint8_t>> indicators;
    std::int64_t failures = 0;
};

inline PairedRun run_paired_samples(const std::vector<StateVector>& states,
                                    const Scenario& scenario, std::int64_t samples,
                                    std::uint64_t seed, IndicatorVariant variant,
                                    int workers) {
    if (samples < 1) throw std::invalid_argument("volume estimate: need samples >= 1");
    if (scenario.strategy_count() > kEnumerationCap)
        throw std::invalid_argument("volume estimate: enumeration cap exceeded");
    for (const auto& s : states)
        if (s.n_qubits() != scenario.parties())
            throw std::invalid_argument("volume estimate: state does not match scenario");
    if (workers < 1) workers = 1;

    PairedRun run;
    run.indicators.assign(states.size(), std::vector<std::uint8_t>(samples, kLocal));
    std::atomic<std::int64_t> next{0};
    std::atomic<std::int64_t> failures{0};

    const CgSpace space = variant == IndicatorVariant::Correlation ? CgSpace::joint_only(scenario)
                                                                   : CgSpace::full(scenario);
    if (variant == IndicatorVariant::Correlation && scenario.parties() != 2)
        throw std::invalid_argument("volume estimate: correlation variant is bipartite");

    // For the full indicator on larger bipartite scenarios, the cheaper
    // joint-correlator LP screens first: a behavior whose correlators
    // already leave the correlation polytope is nonlocal outright, and for
    // Haar draws on entangled states that settles most samples.
    const bool prefilter = variant == IndicatorVariant::Full && scenario.parties() == 2 &&
                           scenario.setting_tuples() >= 12;
    std::optional<CgSpace> joint_space;
    if (prefilter) joint_space = CgSpace::joint_only(scenario);

    auto worker = [&] {
        for (;;) {
            const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= samples) return;
            const MeasurementSet ms =
                sample_measurement_set(scenario, SeedSpec{seed, static_cast<std::uint64_t>(i)});
            // Fresh solvers per sample: the warm-start chain across the
            // states of this sample is a pure function of the sample index,
            // keeping results independent of scheduling.
            MembershipSolver solver(space);
            std::optional<MembershipSolver> joint_solver;
            if (prefilter) joint_solver.emplace(*joint_space);
            for (std::size_t s = 0; s < states.size(); ++s) {
                std::uint8_t verdict;
                try {
                    bool nonlocal = false;
                    if (prefilter)
                        nonlocal = !joint_solver->is_local(joint_space->from_state(states[s], ms));
                    if (!nonlocal)
                        nonlocal = !solver.is_local(space.from_state(states[s], ms));
                    verdict = nonlocal ? kNonlocal : kLocal;
                } catch (const SimplexStallError&) {
                    verdict = kFailed;
                    failures.fetch_add(1, std::memory_order_relaxed);
                }
                run.indicators[s][i] = verdict;
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    run.failures = failures.load();
    return run;
}

inline VolumeEstimate summarize(const std::vector<std::uint8_t>& indicators,
                                const Scenario& scenario, std::uint64_t seed) {
    VolumeEstimate est(scenario, seed);
    for (const std::uint8_t v : indicators) {
        if (v == kFailed) {
            ++est.failures;
        } else {
            ++est.samples;
            if (v == kNonlocal) ++est.hits;
        }
    }
    // Silent exclusion would bias the estimate; more than 0.1% failed
    // solves aborts instead.
    if (est.failures * 1000 > static_cast<std::int64_t>(indicators.size()))
        throw std::runtime_error("volume estimate: LP failure rate above 0.1%");
    est.p_hat = static_cast<double>(est.hits) / static_cast<double>(est.samples);
    const auto [lo, hi] = wilson_interval(est.hits, est.samples);
    est.ci_low = lo;
    est.ci_high = hi;
    return est;
}

}  // namespace detail

// Fraction of Haar-random measurement sets whose behavior on `state` is
// nonlocal, with a 95% Wilson interval.
inline VolumeEstimate estimate_nonlocal_volume(const StateVector& state, const Scenario& scenario,
                                               std::int64_t samples, std::uint64_t seed,
                                               int workers = 1) {
    const auto run =
        detail::run_paired_samples({state}, scenario, samples, seed, IndicatorVariant::Full, workers);
    return detail::summarize(run.indicators[0], scenario, seed);
}

// Same stream of measurement sets as estimate_nonlocal_volume, but with
// nonlocality witnessed by correlation inequalities only.
inline VolumeEstimate estimate_correlation_volume(const StateVector& state,
                                                  const Scenario& scenario, std::int64_t samples,
                                                  std::uint64_t seed, int workers = 1) {
    const auto run = detail::run_paired_samples({state}, scenario, samples, seed,
                                                IndicatorVariant::Correlation, workers);
    return detail::summarize(run.indicators[0], scenario, seed);
}

// One estimate per theta, every theta sharing the same measurement stream,
// so curves differ only through the indicator and never through sampling
// noise. `family` maps theta to the measured state.
inline std::vector<VolumeEstimate> estimate_curve(
    const std::vector<double>& theta_grid, const Scenario& scenario, std::int64_t samples,
    std::uint64_t seed, IndicatorVariant variant = IndicatorVariant::Full, int workers = 1,
    const std::function<StateVector(double)>& family = [](double th) {
        return make_pure_two_qubit(th);
    }) {
    std::vector<StateVector> states;
    states.reserve(theta_grid.size());
    for (double th : theta_grid) states.push_back(family(th));
    const auto run = detail::run_paired_samples(states, scenario, samples, seed, variant, workers);
    std::vector<VolumeEstimate> out;
    out.reserve(theta_grid.size());
    for (std::size_t k = 0; k < theta_grid.size(); ++k) {
        VolumeEstimate est = detail::summarize(run.indicators[k], scenario, seed);
        est.theta = theta_grid[k];
        out.push_back(std::move(est));
    }
    return out;
}

}  // namespace nlvol
