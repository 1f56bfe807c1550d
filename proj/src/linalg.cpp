#include "eduqa/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace eduqa {

double dot(const Vector& u, const Vector& v) {
    if (u.size() != v.size())
        throw Error("dot: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                    std::to_string(v.size()) + ")");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

double norm(const Vector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double cosine(const Vector& u, const Vector& v) {
    if (u.size() != v.size())
        throw Error("cosine: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                    std::to_string(v.size()) + ")");
    double nu = norm(u);
    double nv = norm(v);
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return dot(u, v) / (nu * nv);
}

Vector matvec(const Matrix& m, const Vector& v) {
    if (m.cols != v.size())
        throw Error("matvec: dimension mismatch (" + std::to_string(m.cols) + " vs " +
                    std::to_string(v.size()) + ")");
    Vector out(m.rows, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double* r = m.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) s += r[j] * v[j];
        out[i] = s;
    }
    return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows)
        throw Error("matmul: dimension mismatch (" + std::to_string(a.cols) + " vs " +
                    std::to_string(b.rows) + ")");
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t k = 0; k < a.cols; ++k) {
            double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* brow = b.row(k);
            double* crow = c.row(i);
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

void softmax_inplace(double* begin, std::size_t n) {
    if (n == 0) return;
    double mx = *std::max_element(begin, begin + n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        begin[i] = std::exp(begin[i] - mx);
        sum += begin[i];
    }
    for (std::size_t i = 0; i < n; ++i) begin[i] /= sum;
}

Vector softmax(const Vector& logits) {
    Vector out = logits;
    softmax_inplace(out.data(), out.size());
    return out;
}

}  // namespace eduqa
