#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "nlvol/linalg.hpp"

namespace nlvol {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 normalized(const Vec3& a) {
    const double n = norm(a);
    if (n < 1e-6) throw std::invalid_argument("normalized: vector too short");
    return {a[0] / n, a[1] / n, a[2] / n};
}

inline Vec3 apply(const Mat3& r, const Vec3& v) {
    return {dot(r[0], v), dot(r[1], v), dot(r[2], v)};
}

inline const CMatrix& pauli_i() {
    static const CMatrix m = CMatrix::identity(2);
    return m;
}

inline const CMatrix& pauli_x() {
    static const CMatrix m = [] {
        CMatrix p(2, 2);
        p(0, 1) = 1.0;
        p(1, 0) = 1.0;
        return p;
    }();
    return m;
}

inline const CMatrix& pauli_y() {
    static const CMatrix m = [] {
        CMatrix p(2, 2);
        p(0, 1) = Complex(0.0, -1.0);
        p(1, 0) = Complex(0.0, 1.0);
        return p;
    }();
    return m;
}

inline const CMatrix& pauli_z() {
    static const CMatrix m = [] {
        CMatrix p(2, 2);
        p(0, 0) = 1.0;
        p(1, 1) = -1.0;
        return p;
    }();
    return m;
}

// A +-1-outcome qubit observable n.sigma for a unit Bloch vector n.
// Outcome +1 corresponds to the projector (1 + n.sigma)/2; sampling the
// whole sphere makes this labeling convention immaterial to volume
// estimates (antipodal vectors merely relabel outcomes).
struct Observable {
    Vec3 bloch;
    CMatrix matrix;  // 2x2 Hermitian, traceless, squares to identity

    static Observable from_bloch(const Vec3& n) {
        if (std::abs(norm(n) - 1.0) > 1e-12)
            throw std::invalid_argument("Observable: Bloch vector must be unit length");
        CMatrix m(2, 2);
        m(0, 0) = n[2];
        m(0, 1) = Complex(n[0], -n[1]);
        m(1, 0) = Complex(n[0], n[1]);
        m(1, 1) = -n[2];
        return Observable{n, std::move(m)};
    }
};

// Projector onto the `outcome` (+1 or -1) eigenspace.
inline CMatrix projector(const Observable& obs, int outcome) {
    if (outcome != 1 && outcome != -1) throw std::invalid_argument("projector: outcome must be +-1");
    CMatrix p = CMatrix::identity(2);
    p += Complex(outcome) * obs.matrix;
    p *= Complex(0.5);
    return p;
}

}  // namespace nlvol
