#pragma once

// Reference implementations used only by the tests. They are written with plain
// loops over std::vector so they share no code path with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "edamcc/benchmarks.hpp"

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>; // row-major

inline Mat to_rows(const Eigen::MatrixXd& m) {
    Mat out(static_cast<std::size_t>(m.rows()), Vec(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out[i][j] = m(i, j);
    return out;
}

inline Vec to_vec(const Eigen::VectorXd& v) {
    return Vec(v.data(), v.data() + v.size());
}

// Two-pass column means and ML variances.
inline std::pair<Vec, Vec> mean_var(const Mat& rows) {
    const std::size_t m = rows.size(), n = rows[0].size();
    Vec mean(n, 0.0), var(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i)
            mean[j] += rows[i][j];
        mean[j] /= static_cast<double>(m);
        for (std::size_t i = 0; i < m; ++i)
            var[j] += (rows[i][j] - mean[j]) * (rows[i][j] - mean[j]);
        var[j] /= static_cast<double>(m);
    }
    return {mean, var};
}

inline Mat covariance(const Mat& rows) {
    const std::size_t m = rows.size(), n = rows[0].size();
    const Vec mean = mean_var(rows).first;
    Mat cov(n, Vec(n, 0.0));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                s += (rows[i][a] - mean[a]) * (rows[i][b] - mean[b]);
            cov[a][b] = s / static_cast<double>(m);
        }
    return cov;
}

// Textbook Pearson formula.
inline Mat pearson(const Mat& rows) {
    const std::size_t m = rows.size(), n = rows[0].size();
    Mat c(n, Vec(n, 0.0));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
            for (std::size_t i = 0; i < m; ++i) {
                const double x = rows[i][a], y = rows[i][b];
                sx += x;
                sy += y;
            }
            const double mx = sx / static_cast<double>(m), my = sy / static_cast<double>(m);
            for (std::size_t i = 0; i < m; ++i) {
                const double dx = rows[i][a] - mx, dy = rows[i][b] - my;
                sxx += dx * dx;
                syy += dy * dy;
                sxy += dx * dy;
            }
            c[a][b] = sxy / std::sqrt(sxx * syy);
        }
    return c;
}

// Cyclic Jacobi eigenvalue iteration for a symmetric matrix.
// Returns eigenvalues and eigenvectors (columns of the second result).
inline std::pair<Vec, Mat> jacobi_eigen(Mat a) {
    const std::size_t n = a.size();
    Mat v(n, Vec(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        v[i][i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                off += a[p][q] * a[p][q];
        if (off < 1e-30)
            break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300)
                    continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
    }
    Vec values(n);
    for (std::size_t i = 0; i < n; ++i)
        values[i] = a[i][i];
    return {values, v};
}

// Two-sided exact Mann-Whitney p by enumerating every split of the pooled
// ranks. Assumes distinct values.
inline double exact_u_p(const Vec& a, const Vec& b) {
    const std::size_t na = a.size(), nb = b.size(), n = na + nb;
    Vec pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });
    std::vector<int> rank(n);
    for (std::size_t r = 0; r < n; ++r)
        rank[order[r]] = static_cast<int>(r) + 1;
    int observed = 0;
    for (std::size_t i = 0; i < na; ++i)
        observed += rank[i];
    const int shift = static_cast<int>(na * (na + 1) / 2);
    const int u_obs = observed - shift;

    long long le = 0, ge = 0, total = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != na)
            continue;
        int sum = 0;
        for (std::size_t r = 0; r < n; ++r)
            if (mask & (1u << r))
                sum += static_cast<int>(r) + 1;
        const int u = sum - shift;
        ++total;
        if (u <= u_obs)
            ++le;
        if (u >= u_obs)
            ++ge;
    }
    return std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(total));
}

// Second implementation of the benchmark suite. Takes the instance data
// (shift, rotation, linear system) from `p` and evaluates the textbook
// expressions with the row-vector convention z = (x - o) M.
inline double benchmark(const edamcc::BenchmarkProblem& p, const Vec& x) {
    using edamcc::FunctionId;
    const std::size_t n = x.size();
    const double pi = std::numbers::pi;

    if (p.id == FunctionId::F10) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double ax = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                ax += p.linear_system->a(i, j) * x[j];
            worst = std::max(worst, std::abs(ax - p.linear_system->b[i]));
        }
        return worst + p.bias;
    }

    Vec d(n);
    for (std::size_t i = 0; i < n; ++i)
        d[i] = x[i] - (p.shift ? (*p.shift)[i] : 0.0);
    if (p.id == FunctionId::F6 || p.id == FunctionId::F8 || p.id == FunctionId::F13)
        for (auto& v : d)
            v += 1.0;
    Vec z = d;
    if (p.rotation) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += d[i] * (*p.rotation)(i, j);
            z[j] = s;
        }
    }

    double f = 0.0;
    switch (p.id) {
    case FunctionId::F1:
    case FunctionId::F2:
        for (double v : z)
            f += v * v;
        break;
    case FunctionId::F3:
    case FunctionId::F4:
        for (double v : z)
            f = std::max(f, std::abs(v));
        break;
    case FunctionId::F5:
    case FunctionId::F6:
        for (std::size_t i = 0; i < n; ++i)
            f += std::pow(z[0] - z[i] * z[i], 2) + std::pow(z[i] - 1.0, 2);
        break;
    case FunctionId::F7:
    case FunctionId::F8:
        for (std::size_t i = 0; i + 1 < n; ++i)
            f += 100.0 * std::pow(z[i + 1] - z[i] * z[i], 2) + std::pow(z[i] - 1.0, 2);
        break;
    case FunctionId::F9:
        for (std::size_t i = 0; i < n; ++i)
            f += std::pow(10.0, 6.0 * static_cast<double>(i) / static_cast<double>(n - 1)) * z[i] * z[i];
        break;
    case FunctionId::F11:
    case FunctionId::F12:
        for (double v : z)
            f += v * v - 10.0 * std::cos(2.0 * pi * v) + 10.0;
        break;
    case FunctionId::F13:
        for (std::size_t i = 0; i < n; ++i) {
            const double a = z[i], b = z[(i + 1) % n];
            const double r = 100.0 * std::pow(a * a - b, 2) + std::pow(a - 1.0, 2);
            f += r * r / 4000.0 - std::cos(r / std::sqrt(1.0)) + 1.0;
        }
        break;
    case FunctionId::F10:
        break;
    }
    return f + p.bias;
}

} // namespace oracle
