#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace nlvol {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

// Dense row-major complex matrix. Sized for desk-scale operators
// (at most 2^10 x 2^10); no sparsity, value semantics throughout.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}

    static CMatrix identity(int n) {
        CMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Complex& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
    const Complex& operator()(int r, int c) const {
        return a_[static_cast<std::size_t>(r) * cols_ + c];
    }

    std::span<const Complex> data() const { return a_; }

    CMatrix& operator+=(const CMatrix& o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }

    CMatrix& operator-=(const CMatrix& o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }

    CMatrix& operator*=(Complex s) {
        for (auto& v : a_) v *= s;
        return *this;
    }

    friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
    friend CMatrix operator*(CMatrix a, Complex s) { return a *= s; }
    friend CMatrix operator*(Complex s, CMatrix a) { return a *= s; }

    friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("CMatrix multiply: shape mismatch");
        CMatrix c(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                const Complex aik = a(i, k);
                if (aik == 0.0) continue;
                for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    CMatrix dagger() const {
        CMatrix d(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) d(j, i) = std::conj((*this)(i, j));
        return d;
    }

    Complex trace() const {
        Complex t = 0.0;
        for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs_diff(const CMatrix& o) const {
        require_same_shape(o);
        double m = 0.0;
        for (std::size_t i = 0; i < a_.size(); ++i) m = std::max(m, std::abs(a_[i] - o.a_[i]));
        return m;
    }

private:
    void require_same_shape(const CMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("CMatrix op: shape mismatch");
    }

    int rows_ = 0;
    int cols_ = 0;
    CVector a_;
};

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const Complex aij = a(i, j);
            if (aij == 0.0) continue;
            for (int r = 0; r < b.rows(); ++r)
                for (int c = 0; c < b.cols(); ++c)
                    k(i * b.rows() + r, j * b.cols() + c) = aij * b(r, c);
        }
    return k;
}

inline CVector matvec(const CMatrix& m, std::span<const Complex> v) {
    if (m.cols() != static_cast<int>(v.size()))
        throw std::invalid_argument("matvec: shape mismatch");
    CVector out(m.rows());
    for (int i = 0; i < m.rows(); ++i) {
        Complex s = 0.0;
        for (int j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

// <a|b>
inline Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size()) throw std::invalid_argument("inner: length mismatch");
    Complex s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline double norm2(std::span<const Complex> a) {
    double s = 0.0;
    for (const auto& v : a) s += std::norm(v);
    return s;
}

// Symmetrize (m + m^dagger)/2 in place; rejects matrices whose asymmetry
// exceeds `tol` so rounding cleanup cannot mask a construction bug.
inline void hermitize(CMatrix& m, double tol = 1e-10) {
    if (m.rows() != m.cols()) throw std::invalid_argument("hermitize: not square");
    double asym = 0.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = i; j < m.cols(); ++j) {
            const Complex avg = 0.5 * (m(i, j) + std::conj(m(j, i)));
            asym = std::max(asym, std::abs(m(i, j) - avg));
            m(i, j) = avg;
            m(j, i) = std::conj(avg);
        }
    if (asym > tol) throw std::runtime_error("hermitize: asymmetry above tolerance");
}

// Applies a single-qubit operator to `party` of an n-qubit amplitude vector.
// Party 0 is the most significant qubit of the basis index.
inline void apply_single_qubit(const CMatrix& op, std::span<Complex> amps, int n_qubits,
                               int party) {
    if (op.rows() != 2 || op.cols() != 2) throw std::invalid_argument("apply_single_qubit: op not 2x2");
    if (party < 0 || party >= n_qubits) throw std::invalid_argument("apply_single_qubit: bad party");
    if (amps.size() != (std::size_t{1} << n_qubits))
        throw std::invalid_argument("apply_single_qubit: bad state length");
    const std::size_t stride = std::size_t{1} << (n_qubits - 1 - party);
    for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const Complex a0 = amps[i];
            const Complex a1 = amps[i + stride];
            amps[i] = op(0, 0) * a0 + op(0, 1) * a1;
            amps[i + stride] = op(1, 0) * a0 + op(1, 1) * a1;
        }
    }
}

}  // namespace nlvol
