#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "nlvol/observable.hpp"
#include "nlvol/rng.hpp"
#include "nlvol/scenario.hpp"

namespace nlvol {

// One projective two-outcome observable per (party, setting).
struct MeasurementSet {
    std::vector<std::vector<Observable>> parties;  // [party][setting]

    Scenario scenario() const {
        std::vector<int> m;
        m.reserve(parties.size());
        for (const auto& p : parties) m.push_back(static_cast<int>(p.size()));
        return Scenario(std::move(m));
    }
};

namespace detail {

// Each (party, setting) pair owns its own counter lane, so the observable
// drawn for a given slot does not depend on the scenario it is drawn for:
// a [3,4] set is literally the prefix of the [8,8] set under the same seed.
inline std::uint32_t measurement_lane(int party, int setting) {
    return (static_cast<std::uint32_t>(party) << 16) | static_cast<std::uint32_t>(setting);
}

inline Vec3 sample_unit_vector(CounterRng& rng) {
    for (;;) {
        const Vec3 v{rng.normal(), rng.normal(), rng.normal()};
        const double n = norm(v);
        if (n >= 1e-6) return {v[0] / n, v[1] / n, v[2] / n};
    }
}

}  // namespace detail

// Uniform direction on the unit sphere: three independent standard normals,
// normalized (exactly rotation invariant by construction).
inline Vec3 sample_bloch_uniform(SeedSpec seed) {
    CounterRng rng(seed, detail::measurement_lane(0, 0));
    return detail::sample_unit_vector(rng);
}

// One independent sphere-uniform observable per (party, setting),
// fully determined by the seed.
inline MeasurementSet sample_measurement_set(const Scenario& scenario, SeedSpec seed) {
    MeasurementSet ms;
    ms.parties.resize(scenario.parties());
    for (int p = 0; p < scenario.parties(); ++p) {
        ms.parties[p].reserve(scenario.settings(p));
        for (int x = 0; x < scenario.settings(p); ++x) {
            CounterRng rng(seed, detail::measurement_lane(p, x));
            ms.parties[p].push_back(Observable::from_bloch(detail::sample_unit_vector(rng)));
        }
    }
    return ms;
}

// Applies one proper rotation per party to every Bloch vector of that party.
inline MeasurementSet rotate_measurement_set(const MeasurementSet& ms,
                                             const std::vector<Mat3>& rotations) {
    if (rotations.size() != ms.parties.size())
        throw std::invalid_argument("rotate_measurement_set: need one rotation per party");
    for (const Mat3& r : rotations) {
        // Gram residual |R^T R - 1| and handedness check.
        double residual = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double g = 0.0;
                for (int k = 0; k < 3; ++k) g += r[k][i] * r[k][j];
                residual = std::max(residual, std::abs(g - (i == j ? 1.0 : 0.0)));
            }
        if (residual > 1e-10)
            throw std::invalid_argument("rotate_measurement_set: matrix is not orthogonal");
        const double det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) -
                           r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0]) +
                           r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
        if (det < 0.0)
            throw std::invalid_argument("rotate_measurement_set: improper rotation (det -1)");
    }
    MeasurementSet out;
    out.parties.resize(ms.parties.size());
    for (std::size_t p = 0; p < ms.parties.size(); ++p) {
        out.parties[p].reserve(ms.parties[p].size());
        for (const Observable& obs : ms.parties[p])
            out.parties[p].push_back(
                Observable::from_bloch(normalized(apply(rotations[p], obs.bloch))));
    }
    return out;
}

}  // namespace nlvol
