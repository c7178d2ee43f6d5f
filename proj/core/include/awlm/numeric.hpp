#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace awlm {

/// Minimal dense row-major matrix. Heavy linear algebra is delegated to an
/// internal backend; this type only carries results across the public API.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), 0.0) {}

    double& operator()(int i, int j) { return data[static_cast<size_t>(i) * static_cast<size_t>(cols) + static_cast<size_t>(j)]; }
    double operator()(int i, int j) const { return data[static_cast<size_t>(i) * static_cast<size_t>(cols) + static_cast<size_t>(j)]; }
};

double sup_norm(std::span<const double> v);
double l2_norm(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

/// Euclidean projection of v onto the probability simplex.
std::vector<double> project_to_simplex(std::span<const double> v);

/// Singular values of a dense matrix, descending.
std::vector<double> singular_values(const Matrix& m);

/// Number of singular values strictly above `threshold`.
int numerical_rank(const Matrix& m, double threshold);

/// FNV-1a 64-bit digest of a byte string, as fixed-width lowercase hex.
std::string fnv1a_hex(const std::string& bytes);

} // namespace awlm
