#pragma once

#include <cstddef>
#include <vector>

#include "eduqa/error.hpp"

namespace eduqa {

using Vector = std::vector<double>;

// Dense row-major matrix. Kept deliberately small: the attention kernels
// and encoder projections are the only heavy users.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // rows * cols, row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    const double* row(std::size_t i) const { return data.data() + i * cols; }
    double* row(std::size_t i) { return data.data() + i * cols; }
};

double dot(const Vector& u, const Vector& v);
double norm(const Vector& v);

// dot(u,v) / (|u||v|); 0 when either norm is 0. Throws on dim mismatch.
double cosine(const Vector& u, const Vector& v);

// out = m * v  (m.cols == v.size())
Vector matvec(const Matrix& m, const Vector& v);

// c = a * b
Matrix matmul(const Matrix& a, const Matrix& b);

// In-place numerically stable softmax over a contiguous range.
void softmax_inplace(double* begin, std::size_t n);
Vector softmax(const Vector& logits);

}  // namespace eduqa
