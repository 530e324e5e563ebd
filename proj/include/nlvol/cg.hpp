#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "nlvol/behavior.hpp"
#include "nlvol/linalg.hpp"
#include "nlvol/measurement.hpp"
#include "nlvol/scenario.hpp"
#include "nlvol/state.hpp"

namespace nlvol {

// Correlator (Collins-Gisin) coordinate system for two-outcome behaviors.
//
// A behavior is determined by the correlators <prod_{i in S} A^(i)_{x_i}>
// over nonempty party subsets S and per-subset setting tuples: the
// normalization and no-signaling redundancy of the raw probability table is
// gone, which keeps the membership LP small. `full()` carries every subset
// (dimension prod(1+m_i) - 1); `joint_only()` keeps the all-party block
// (dimension prod m_i), the coordinate system of correlation inequalities.
class CgSpace {
public:
    struct Coord {
        std::uint32_t mask;          // party subset, bit i = party i
        std::vector<int> settings;   // one setting per included party, ascending party order
    };

    static CgSpace full(const Scenario& scenario) {
        CgSpace space(scenario);
        const std::uint32_t top = 1u << scenario.parties();
        for (std::uint32_t mask = 1; mask < top; ++mask) space.append_block(mask);
        return space;
    }

    static CgSpace joint_only(const Scenario& scenario) {
        CgSpace space(scenario);
        space.append_block((1u << scenario.parties()) - 1);
        return space;
    }

    const Scenario& scenario() const { return scenario_; }
    int dim() const { return static_cast<int>(coords_.size()); }
    const std::vector<Coord>& coords() const { return coords_; }

    // Correlators of a state under a measurement set (direct expectations,
    // no intermediate probability table).
    std::vector<double> from_state(const StateVector& state, const MeasurementSet& ms) const {
        if (state.n_qubits() != scenario_.parties())
            throw std::invalid_argument("CgSpace::from_state: party count mismatch");
        std::vector<double> t(coords_.size());
        CVector work;
        for (std::size_t c = 0; c < coords_.size(); ++c) {
            const Coord& coord = coords_[c];
            work = state.amplitudes();
            int k = 0;
            for (int p = 0; p < scenario_.parties(); ++p)
                if (coord.mask & (1u << p))
                    apply_single_qubit(ms.parties[p][coord.settings[k++]].matrix, work,
                                       state.n_qubits(), p);
            t[c] = inner(state.amplitudes(), work).real();
        }
        return t;
    }

    std::vector<double> from_behavior(const Behavior& b) const {
        if (b.scenario() != scenario_)
            throw std::invalid_argument("CgSpace::from_behavior: scenario mismatch");
        const int n = scenario_.parties();
        std::vector<double> t(coords_.size());
        std::vector<int> x(n);
        for (std::size_t c = 0; c < coords_.size(); ++c) {
            const Coord& coord = coords_[c];
            // Average over the settings of parties outside the subset;
            // no-signaling makes every extension agree.
            double sum = 0.0;
            std::int64_t extensions = 0;
            for (std::int64_t idx = 0; idx < scenario_.setting_tuples(); ++idx) {
                scenario_.decode_setting(idx, x);
                bool matches = true;
                int k = 0;
                for (int p = 0; p < n && matches; ++p)
                    if (coord.mask & (1u << p)) matches = (x[p] == coord.settings[k++]);
                if (!matches) continue;
                double corr = 0.0;
                for (int a = 0; a < scenario_.outcome_tuples(); ++a) {
                    int prod = 1;
                    for (int p = 0; p < n; ++p)
                        if (coord.mask & (1u << p)) prod *= b.outcome_sign(a, p);
                    corr += prod * b.p(idx, a);
                }
                sum += corr;
                ++extensions;
            }
            t[c] = sum / extensions;
        }
        return t;
    }

    // Per-party outcome signs, [party][setting].
    using StrategySigns = std::vector<std::vector<int>>;

    StrategySigns make_strategy_scratch() const {
        StrategySigns signs(scenario_.parties());
        for (int p = 0; p < scenario_.parties(); ++p) signs[p].resize(scenario_.settings(p));
        return signs;
    }

    // Strategy indices are lexicographic: party 0 occupies the most
    // significant bit block; within a party, bit x of the block gives the
    // outcome of setting x (0 -> +1, 1 -> -1).
    void decode_strategy(std::int64_t index, StrategySigns& signs) const {
        for (int p = scenario_.parties() - 1; p >= 0; --p) {
            const int m = scenario_.settings(p);
            const auto block = index & ((std::int64_t{1} << m) - 1);
            index >>= m;
            for (int x = 0; x < m; ++x) signs[p][x] = (block >> x) & 1 ? -1 : 1;
        }
    }

    std::int64_t strategy_index(const StrategySigns& signs) const {
        std::int64_t index = 0;
        for (int p = 0; p < scenario_.parties(); ++p) {
            std::int64_t block = 0;
            for (int x = 0; x < scenario_.settings(p); ++x)
                if (signs[p][x] < 0) block |= std::int64_t{1} << x;
            index = (index << scenario_.settings(p)) | block;
        }
        return index;
    }

    // Coordinates of the deterministic strategy with the given index.
    void strategy_column(std::int64_t index, double* out, StrategySigns& scratch) const {
        decode_strategy(index, scratch);
        for (std::size_t c = 0; c < coords_.size(); ++c) {
            const Coord& coord = coords_[c];
            int prod = 1;
            int k = 0;
            for (int p = 0; p < scenario_.parties(); ++p)
                if (coord.mask & (1u << p)) prod *= scratch[p][coord.settings[k++]];
            out[c] = prod;
        }
    }

private:
    explicit CgSpace(Scenario scenario) : scenario_(std::move(scenario)) {}

    void append_block(std::uint32_t mask) {
        std::vector<int> members;
        for (int p = 0; p < scenario_.parties(); ++p)
            if (mask & (1u << p)) members.push_back(p);
        std::vector<int> settings(members.size(), 0);
        for (;;) {
            coords_.push_back(Coord{mask, settings});
            // mixed-radix increment, first included party most significant
            int k = static_cast<int>(members.size()) - 1;
            while (k >= 0) {
                if (++settings[k] < scenario_.settings(members[k])) break;
                settings[k] = 0;
                --k;
            }
            if (k < 0) break;
        }
    }

    Scenario scenario_;
    std::vector<Coord> coords_;
};

}  // namespace nlvol
