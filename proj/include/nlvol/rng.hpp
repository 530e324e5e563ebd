#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace nlvol {

// Philox-4x32-10 keyed permutation (counter-based generator). Every draw is
// a pure function of (key, counter), so logical streams can be sharded
// across any number of threads and always reproduce bit-identically.
namespace philox {

inline constexpr std::uint32_t kMul0 = 0xD2511F53u;
inline constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
        if (round != 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
               static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
               static_cast<std::uint32_t>(p0)};
    }
    return ctr;
}

}  // namespace philox

// Addresses one logical random stream. Distinct stream_index values under
// the same master_seed give statistically independent streams.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
};

// Sequential view of one (seed, lane) stream. `lane` carves independent
// sub-streams out of a SeedSpec (e.g. one per measurement direction) so a
// sampled object is invariant under how much of it a caller consumes.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(SeedSpec seed, std::uint32_t lane = 0)
        : key_{static_cast<std::uint32_t>(seed.master_seed),
               static_cast<std::uint32_t>(seed.master_seed >> 32)},
          lane_(lane),
          stream_lo_(static_cast<std::uint32_t>(seed.stream_index)),
          stream_hi_(static_cast<std::uint32_t>(seed.stream_index >> 32)) {}

    std::uint64_t next_u64() {
        if (word_ > 2) refill();
        const std::uint64_t lo = buf_[word_];
        const std::uint64_t hi = buf_[word_ + 1];
        word_ += 2;
        return lo | (hi << 32);
    }

    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }
    std::uint64_t operator()() { return next_u64(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; one spare value is buffered.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

private:
    void refill() {
        buf_ = philox::block({block_, lane_, stream_lo_, stream_hi_}, key_);
        ++block_;
        word_ = 0;
    }

    philox::Key key_;
    std::uint32_t lane_;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
    std::uint32_t block_ = 0;
    philox::Counter buf_{};
    int word_ = 4;  // forces refill on first use
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace nlvol
