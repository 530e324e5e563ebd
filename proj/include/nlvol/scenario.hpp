#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlvol {

// A Bell scenario: per-party measurement-setting counts, two outcomes each.
//
// Index conventions used by every module:
//   - party 0 is the most significant position everywhere: in amplitude
//     indices (qubit 0 = MSB), in setting-tuple indices (mixed radix, party 0
//     varies slowest) and in outcome-tuple indices (party 0 = top bit).
//   - outcome bit 0 means +1, bit 1 means -1.
class Scenario {
public:
    explicit Scenario(std::vector<int> settings) : settings_(std::move(settings)) {
        if (settings_.size() < 2) throw std::invalid_argument("Scenario: need at least 2 parties");
        for (int m : settings_)
            if (m < 1) throw std::invalid_argument("Scenario: every setting count must be >= 1");
    }

    int parties() const { return static_cast<int>(settings_.size()); }
    int settings(int party) const { return settings_.at(party); }
    const std::vector<int>& all_settings() const { return settings_; }

    std::int64_t setting_tuples() const {
        std::int64_t n = 1;
        for (int m : settings_) n *= m;
        return n;
    }

    int outcome_tuples() const { return 1 << parties(); }

    // Number of deterministic local strategies, 2^(sum of settings).
    std::int64_t strategy_count() const {
        int total = 0;
        for (int m : settings_) total += m;
        if (total >= 63) throw std::invalid_argument("Scenario: strategy count overflows");
        return std::int64_t{1} << total;
    }

    std::int64_t setting_index(std::span<const int> x) const {
        if (static_cast<int>(x.size()) != parties())
            throw std::invalid_argument("setting_index: tuple length mismatch");
        std::int64_t idx = 0;
        for (int i = 0; i < parties(); ++i) {
            if (x[i] < 0 || x[i] >= settings_[i])
                throw std::invalid_argument("setting_index: setting out of range");
            idx = idx * settings_[i] + x[i];
        }
        return idx;
    }

    void decode_setting(std::int64_t idx, std::span<int> out) const {
        for (int i = parties() - 1; i >= 0; --i) {
            out[i] = static_cast<int>(idx % settings_[i]);
            idx /= settings_[i];
        }
    }

    bool operator==(const Scenario& o) const { return settings_ == o.settings_; }
    bool operator!=(const Scenario& o) const { return !(*this == o); }

    std::string to_string() const {
        std::string s;
        for (std::size_t i = 0; i < settings_.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(settings_[i]);
        }
        return s;
    }

private:
    std::vector<int> settings_;
};

}  // namespace nlvol
