#include "awlm/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace awlm {

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double l2_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> project_to_simplex(std::span<const double> v) {
    // Sort-and-threshold projection onto {x >= 0, sum x = 1}.
    const int n = static_cast<int>(v.size());
    std::vector<double> u(v.begin(), v.end());
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (int i = 0; i < n; ++i) {
        cumsum += u[static_cast<size_t>(i)];
        const double t = (cumsum - 1.0) / (i + 1);
        if (u[static_cast<size_t>(i)] - t > 0.0) theta = t;
    }
    std::vector<double> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
    return out;
}

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd e(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) e(i, j) = m(i, j);
    return e;
}

} // namespace

std::vector<double> singular_values(const Matrix& m) {
    if (m.rows == 0 || m.cols == 0) return {};
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m));
    const auto& sv = svd.singularValues();
    return std::vector<double>(sv.data(), sv.data() + sv.size());
}

int numerical_rank(const Matrix& m, double threshold) {
    int rank = 0;
    for (double s : singular_values(m)) {
        if (s > threshold) ++rank;
    }
    return rank;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace awlm
