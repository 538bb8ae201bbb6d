#pragma once

#include <cstddef>
#include <vector>

#include "echelon/errors.hpp"

namespace echelon::linalg {

// Dense row-major matrix; just enough for the recurrent nets here.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

// out = M * x
inline void matvec(const Matrix& m, const std::vector<double>& x, std::vector<double>& out) {
    if (x.size() != m.cols) throw DomainError("matvec shape mismatch");
    out.assign(m.rows, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* row = &m.data[r * m.cols];
        double s = 0.0;
        for (std::size_t c = 0; c < m.cols; ++c) s += row[c] * x[c];
        out[r] = s;
    }
}

// out += M^T * x
inline void matvec_transpose_add(const Matrix& m, const std::vector<double>& x, std::vector<double>& out) {
    if (x.size() != m.rows) throw DomainError("matvec_transpose shape mismatch");
    if (out.size() != m.cols) throw DomainError("matvec_transpose output shape mismatch");
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double xr = x[r];
        if (xr == 0.0) continue;
        const double* row = &m.data[r * m.cols];
        for (std::size_t c = 0; c < m.cols; ++c) out[c] += row[c] * xr;
    }
}

// M += a * b^T
inline void outer_add(Matrix& m, const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != m.rows || b.size() != m.cols) throw DomainError("outer_add shape mismatch");
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double ar = a[r];
        if (ar == 0.0) continue;
        double* row = &m.data[r * m.cols];
        for (std::size_t c = 0; c < m.cols; ++c) row[c] += ar * b[c];
    }
}

}  // namespace echelon::linalg
