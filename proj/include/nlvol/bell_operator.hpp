#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "nlvol/inequality.hpp"
#include "nlvol/linalg.hpp"
#include "nlvol/measurement.hpp"
#include "nlvol/state.hpp"

namespace nlvol {

// Hermitian operator whose expectation on a state equals the inequality
// value of the behavior generated by the same measurements.
struct BellOperator {
    int n_parties;
    CMatrix matrix;  // 2^n x 2^n
};

namespace detail {

// Tensor product with `op` at `party` and identity elsewhere, accumulated
// into `acc` with weight g.
inline void add_product_term(CMatrix& acc, double g, const std::vector<const CMatrix*>& factors) {
    CMatrix term = *factors[0];
    for (std::size_t i = 1; i < factors.size(); ++i) term = kron(term, *factors[i]);
    term *= Complex(g);
    acc += term;
}

}  // namespace detail

inline BellOperator bell_operator(const BellInequality& ineq, const MeasurementSet& ms) {
    if (ms.scenario() != ineq.scenario)
        throw std::invalid_argument("bell_operator: inequality and measurements disagree");
    const int n = ineq.scenario.parties();
    const int dim = 1 << n;
    CMatrix acc(dim, dim);

    std::vector<int> x(n);
    std::vector<const CMatrix*> factors(n);
    for (std::int64_t idx = 0; idx < ineq.scenario.setting_tuples(); ++idx) {
        const double g = ineq.joint[idx];
        if (g == 0.0) continue;
        ineq.scenario.decode_setting(idx, x);
        for (int p = 0; p < n; ++p) factors[p] = &ms.parties[p][x[p]].matrix;
        detail::add_product_term(acc, g, factors);
    }
    for (int p = 0; p < n; ++p)
        for (int s = 0; s < ineq.scenario.settings(p); ++s) {
            const double g = ineq.marginal[p][s];
            if (g == 0.0) continue;
            for (int q = 0; q < n; ++q) factors[q] = (q == p) ? &ms.parties[p][s].matrix : &pauli_i();
            detail::add_product_term(acc, g, factors);
        }

    hermitize(acc);
    return BellOperator{n, std::move(acc)};
}

inline double expectation(const StateVector& state, const BellOperator& op) {
    if (state.dim() != static_cast<std::size_t>(op.matrix.rows()))
        throw std::invalid_argument("expectation: dimension mismatch");
    const Complex v = inner(state.amplitudes(), matvec(op.matrix, state.amplitudes()));
    if (std::abs(v.imag()) > 1e-10)
        throw std::runtime_error("expectation: imaginary residue above tolerance");
    return v.real();
}

// Coefficients over n-fold Pauli words. Word index is base-4 with party 0
// as the most significant digit; digits 0,1,2,3 mean I,x,y,z.
struct PauliDecomposition {
    int n_parties;
    std::vector<double> coeffs;  // length 4^n

    double coeff(std::initializer_list<int> word) const {
        if (static_cast<int>(word.size()) != n_parties)
            throw std::invalid_argument("PauliDecomposition: word length mismatch");
        std::size_t idx = 0;
        for (int d : word) {
            if (d < 0 || d > 3) throw std::invalid_argument("PauliDecomposition: bad digit");
            idx = idx * 4 + static_cast<std::size_t>(d);
        }
        return coeffs[idx];
    }
};

namespace detail {

// A Pauli word has exactly one nonzero entry per row: column = row ^ xmask
// where xmask marks the x/y parties. Walking rows once replaces the dense
// 2^n x 2^n product.
struct PauliWord {
    std::size_t xmask = 0;
    std::vector<int> digits;  // per party

    // (sigma_word)_{row ^ xmask, row}
    Complex entry_col_row(std::size_t row, int n) const {
        Complex phase = 1.0;
        for (int p = 0; p < n; ++p) {
            const int bit = static_cast<int>((row >> (n - 1 - p)) & 1);
            switch (digits[p]) {
                case 0: break;
                case 1: break;                                             // sigma_x
                case 2: phase *= Complex(0.0, bit ? -1.0 : 1.0); break;    // sigma_y
                case 3: if (bit) phase = -phase; break;                    // sigma_z
            }
        }
        return phase;
    }
};

inline PauliWord decode_word(std::size_t word_index, int n) {
    PauliWord w;
    w.digits.resize(n);
    for (int p = n - 1; p >= 0; --p) {
        w.digits[p] = static_cast<int>(word_index % 4);
        word_index /= 4;
    }
    for (int p = 0; p < n; ++p)
        if (w.digits[p] == 1 || w.digits[p] == 2) w.xmask |= std::size_t{1} << (n - 1 - p);
    return w;
}

}  // namespace detail

// c_word = Tr(op . sigma_word) / 2^n for every Pauli word.
inline PauliDecomposition pauli_decompose(const BellOperator& op) {
    const int n = op.n_parties;
    const std::size_t dim = std::size_t{1} << n;
    const std::size_t words = std::size_t{1} << (2 * n);
    PauliDecomposition dec{n, std::vector<double>(words)};
    for (std::size_t w = 0; w < words; ++w) {
        const auto word = detail::decode_word(w, n);
        Complex tr = 0.0;
        for (std::size_t row = 0; row < dim; ++row)
            tr += op.matrix(static_cast<int>(row), static_cast<int>(row ^ word.xmask)) *
                  word.entry_col_row(row, n);
        const Complex c = tr / static_cast<double>(dim);
        if (std::abs(c.imag()) > 1e-10)
            throw std::runtime_error("pauli_decompose: non-real coefficient (operator not Hermitian?)");
        dec.coeffs[w] = c.real();
    }
    return dec;
}

inline CMatrix pauli_reconstruct(const PauliDecomposition& dec) {
    const int n = dec.n_parties;
    const std::size_t dim = std::size_t{1} << n;
    CMatrix m(static_cast<int>(dim), static_cast<int>(dim));
    for (std::size_t w = 0; w < dec.coeffs.size(); ++w) {
        const double c = dec.coeffs[w];
        if (c == 0.0) continue;
        const auto word = detail::decode_word(w, n);
        for (std::size_t row = 0; row < dim; ++row) {
            // (sigma_word)_{row, row ^ xmask} = conj of the col/row entry
            const Complex e = std::conj(word.entry_col_row(row, n));
            m(static_cast<int>(row), static_cast<int>(row ^ word.xmask)) += c * e;
        }
    }
    return m;
}

}  // namespace nlvol
