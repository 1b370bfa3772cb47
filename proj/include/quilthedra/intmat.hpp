#ifndef QUILTHEDRA_INTMAT_HPP
#define QUILTHEDRA_INTMAT_HPP

#include <quilthedra/rational.hpp>
#include <vector>

namespace quilthedra {

/*
 * Exact integer/rational matrix rank via fraction-free (Bareiss) elimination.
 *
 * Matrices here are tiny (edge counts of trees, log-linear delay systems),
 * so O(n^3) with big integers is more than fast enough and gives exact
 * singularity detection.
 */
inline int rank_bareiss(std::vector<std::vector<Int>> m) {
    const size_t rows = m.size();
    if (rows == 0) return 0;
    const size_t cols = m[0].size();
    Int prev = 1;
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t piv = r;
        while (piv < rows && m[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        if (piv != r) std::swap(m[piv], m[r]);
        for (size_t i = r + 1; i < rows; ++i) {
            for (size_t j = c + 1; j < cols; ++j)
                m[i][j] = (m[i][j] * m[r][c] - m[i][c] * m[r][j]) / prev;
            m[i][c] = 0;
        }
        prev = m[r][c];
        ++r;
    }
    return static_cast<int>(r);
}

inline int rank_rational(const std::vector<std::vector<Rational>>& m) {
    // clear denominators row by row, then run the integer elimination
    std::vector<std::vector<Int>> z;
    z.reserve(m.size());
    for (const auto& row : m) {
        Int lcm = 1;
        for (const auto& x : row) lcm = boost::multiprecision::lcm(lcm, x.den());
        std::vector<Int> zr;
        zr.reserve(row.size());
        for (const auto& x : row) zr.push_back(x.num() * (lcm / x.den()));
        z.push_back(std::move(zr));
    }
    return rank_bareiss(std::move(z));
}

// Sign of the determinant of a square rational matrix: +1, -1, or 0.
inline int det_sign(std::vector<std::vector<Rational>> m) {
    const size_t n = m.size();
    int sign = 1;
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        while (piv < n && m[piv][c].is_zero()) ++piv;
        if (piv == n) return 0;
        if (piv != c) { std::swap(m[piv], m[c]); sign = -sign; }
        if (!m[c][c].is_positive()) sign = -sign;
        for (size_t i = c + 1; i < n; ++i) {
            if (m[i][c].is_zero()) continue;
            Rational f = m[i][c] / m[c][c];
            for (size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
        }
    }
    return sign;
}

} // namespace quilthedra

#endif // QUILTHEDRA_INTMAT_HPP
