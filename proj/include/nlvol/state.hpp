#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nlvol/linalg.hpp"
#include "nlvol/rng.hpp"

namespace nlvol {

inline constexpr int kMaxQubits = 10;

// Pure n-qubit state. Amplitudes are basis-ordered with party 0 as the most
// significant qubit; the L2 norm must be 1 within 1e-12.
class StateVector {
public:
    StateVector(int n_qubits, CVector amplitudes)
        : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
        if (n_qubits < 1 || n_qubits > kMaxQubits)
            throw std::invalid_argument("StateVector: unsupported qubit count");
        if (amps_.size() != (std::size_t{1} << n_qubits))
            throw std::invalid_argument("StateVector: amplitude length is not 2^n");
        if (std::abs(std::sqrt(norm2(amps_)) - 1.0) > 1e-12)
            throw std::invalid_argument("StateVector: not normalized");
    }

    int n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    const CVector& amplitudes() const { return amps_; }
    const Complex& operator[](std::size_t i) const { return amps_[i]; }

private:
    int n_qubits_;
    CVector amps_;
};

// cos(theta)|00> + sin(theta)|11>. Angles outside [0, pi/4] are accepted;
// they leave the Schmidt-ordered parametrization but are still valid states.
inline StateVector make_pure_two_qubit(double theta) {
    if (!std::isfinite(theta)) throw std::invalid_argument("make_pure_two_qubit: theta not finite");
    CVector a(4);
    a[0] = std::cos(theta);
    a[3] = std::sin(theta);
    return StateVector(2, std::move(a));
}

// cos(theta)|0...0> + sin(theta)|1...1> on n >= 2 qubits.
inline StateVector make_ghz_family(int n, double theta) {
    if (n < 2) throw std::invalid_argument("make_ghz_family: need n >= 2");
    if (!std::isfinite(theta)) throw std::invalid_argument("make_ghz_family: theta not finite");
    CVector a(std::size_t{1} << n);
    a.front() = std::cos(theta);
    a.back() = std::sin(theta);
    return StateVector(n, std::move(a));
}

inline StateVector phi_plus() { return make_pure_two_qubit(std::numbers::pi / 4); }

inline StateVector phi_minus() {
    const double r = 1.0 / std::numbers::sqrt2;
    return StateVector(2, CVector{r, 0.0, 0.0, -r});
}

inline StateVector ghz_plus(int n) { return make_ghz_family(n, std::numbers::pi / 4); }

inline StateVector ghz_minus(int n) {
    if (n < 2) throw std::invalid_argument("ghz_minus: need n >= 2");
    CVector a(std::size_t{1} << n);
    const double r = 1.0 / std::numbers::sqrt2;
    a.front() = r;
    a.back() = -r;
    return StateVector(n, std::move(a));
}

// Haar-random pure state (normalized complex Gaussian vector).
inline StateVector random_state(int n_qubits, CounterRng& rng) {
    CVector a(std::size_t{1} << n_qubits);
    for (auto& v : a) v = Complex(rng.normal(), rng.normal());
    const double n = std::sqrt(norm2(a));
    for (auto& v : a) v /= n;
    return StateVector(n_qubits, std::move(a));
}

}  // namespace nlvol
