#pragma once

#include <cstddef>
#include <vector>

#include "hotelml/error.hpp"

namespace hotelml {

/// Dense row-major matrix of doubles. Just enough linear algebra for the
/// learners in this library; not a general-purpose type.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }

    friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// C = A * B, loop order chosen for sequential access on row-major storage.
inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw ArgumentError("matmul: inner dimensions differ");
    Matrix c(a.rows, b.cols, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.row(i);
        double* crow = c.row(i);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = b.row(k);
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

/// C = A^T * B where A is n x d and B is n x k.
inline Matrix transpose_matmul(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows) throw ArgumentError("transpose_matmul: row counts differ");
    Matrix c(a.cols, b.cols, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.row(i);
        const double* brow = b.row(i);
        for (std::size_t d = 0; d < a.cols; ++d) {
            const double aid = arow[d];
            if (aid == 0.0) continue;
            double* crow = c.row(d);
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aid * brow[j];
        }
    }
    return c;
}

inline double squared_distance(const double* x, const double* y, std::size_t d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = x[i] - y[i];
        s += diff * diff;
    }
    return s;
}

}  // namespace hotelml
