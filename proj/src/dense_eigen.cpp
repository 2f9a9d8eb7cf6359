#include "eigopt/dense_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace eigopt {

namespace {

double hypot2(double a, double b) { return std::sqrt(a * a + b * b); }

// In-place lower Cholesky factor of a symmetric positive definite matrix.
void cholesky_lower(std::size_t n, std::vector<double>& a) {
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
        if (!(d > 0.0))
            throw std::runtime_error("dense_generalized_eigen: mass matrix is not positive "
                                     "definite (pivot " + std::to_string(d) + " at row " +
                                     std::to_string(j) + ")");
        const double ljj = std::sqrt(d);
        a[j * n + j] = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = s / ljj;
        }
        for (std::size_t i = 0; i < j; ++i) a[i * n + j] = 0.0;
    }
}

// Householder reduction of a symmetric matrix to tridiagonal form with
// accumulation of the orthogonal transform (tred2 lineage).
void tridiagonalize(std::size_t n, std::vector<double>& z, std::vector<double>& d,
                    std::vector<double>& e) {
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) d[j] = z[(n - 1) * n + j];

    for (std::size_t i = n - 1; i > 0; --i) {
        double scale = 0.0;
        double h = 0.0;
        if (i > 1) {
            for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
            if (scale == 0.0) {
                e[i] = d[i - 1];
                for (std::size_t j = 0; j < i; ++j) {
                    d[j] = z[(i - 1) * n + j];
                    z[i * n + j] = 0.0;
                    z[j * n + i] = 0.0;
                }
            } else {
                for (std::size_t k = 0; k < i; ++k) {
                    d[k] /= scale;
                    h += d[k] * d[k];
                }
                double f = d[i - 1];
                double g = f > 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                d[i - 1] = f - g;
                for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

                for (std::size_t j = 0; j < i; ++j) {
                    f = d[j];
                    z[j * n + i] = f;
                    g = e[j] + z[j * n + j] * f;
                    for (std::size_t k = j + 1; k < i; ++k) {
                        g += z[k * n + j] * d[k];
                        e[k] += z[k * n + j] * f;
                    }
                    e[j] = g;
                }
                f = 0.0;
                for (std::size_t j = 0; j < i; ++j) {
                    e[j] /= h;
                    f += e[j] * d[j];
                }
                const double hh = f / (h + h);
                for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
                for (std::size_t j = 0; j < i; ++j) {
                    f = d[j];
                    g = e[j];
                    for (std::size_t k = j; k < i; ++k)
                        z[k * n + j] -= f * e[k] + g * d[k];
                    d[j] = z[(i - 1) * n + j];
                    z[i * n + j] = 0.0;
                }
            }
        } else {
            e[i] = d[i - 1];
            for (std::size_t j = 0; j < i; ++j) {
                d[j] = z[(i - 1) * n + j];
                z[i * n + j] = 0.0;
                z[j * n + i] = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate transformations.
    d[0] = 0.0;
    e[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] != 0.0) {
            for (std::size_t j = 0; j < i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k < i; ++k) g += z[i * n + k] * z[k * n + j];
                for (std::size_t k = 0; k < i; ++k) z[k * n + j] -= g * z[k * n + i];
            }
        }
        d[i] = z[i * n + i];
        z[i * n + i] = 1.0;
        for (std::size_t j = 0; j < i; ++j) {
            z[j * n + i] = 0.0;
            z[i * n + j] = 0.0;
        }
    }
}

// Implicit QL iteration with shifts on a symmetric tridiagonal matrix,
// updating the eigenvector matrix in place (tql2 lineage). Returns the total
// iteration count.
int ql_implicit(std::size_t n, std::vector<double>& d, std::vector<double>& e,
                std::vector<double>& z) {
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    int total_iter = 0;

    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-300 || std::abs(e[m]) <= 2.3e-16 * dd) break;
            }
            if (m != l) {
                if (++iter > 50)
                    throw std::runtime_error("dense_generalized_eigen: QL iteration failed to "
                                             "converge at row " + std::to_string(l));
                ++total_iter;
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = hypot2(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
                double s = 1.0;
                double c = 1.0;
                double p = 0.0;
                bool underflow = false;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = hypot2(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (std::size_t k = 0; k < n; ++k) {
                        f = z[k * n + i + 1];
                        z[k * n + i + 1] = s * z[k * n + i] + c * f;
                        z[k * n + i] = c * z[k * n + i] - s * f;
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    return total_iter;
}

} // namespace

DenseGeneralizedEigen dense_generalized_eigen(std::size_t n, std::vector<double> K,
                                              std::vector<double> M) {
    if (K.size() != n * n || M.size() != n * n)
        throw std::invalid_argument("dense_generalized_eigen: matrix size mismatch");
    if (n == 0) throw std::invalid_argument("dense_generalized_eigen: empty problem");

    // M = L L^T, then C = L^{-1} K L^{-T} is symmetric with the same
    // eigenvalues; eigenvectors map back through L^T y = q.
    std::vector<double> L = M;
    cholesky_lower(n, L);

    // X = L^{-1} K  (forward substitution on each column of K).
    std::vector<double> X(n * n);
    for (std::size_t col = 0; col < n; ++col) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = K[i * n + col];
            for (std::size_t k = 0; k < i; ++k) s -= L[i * n + k] * X[k * n + col];
            X[i * n + col] = s / L[i * n + i];
        }
    }
    // C = X L^{-T}: solve row-wise  C L^T = X,  i.e. per row c L^T = x.
    std::vector<double> C(n * n);
    for (std::size_t row = 0; row < n; ++row) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = X[row * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= C[row * n + k] * L[j * n + k];
            C[row * n + j] = s / L[j * n + j];
        }
    }
    // Enforce exact symmetry against accumulated roundoff.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (C[i * n + j] + C[j * n + i]);
            C[i * n + j] = v;
            C[j * n + i] = v;
        }

    DenseGeneralizedEigen out;
    std::vector<double> d, e;
    tridiagonalize(n, C, d, e);
    out.ql_iterations = ql_implicit(n, d, e, C);

    // Back-transform: y = L^{-T} q for each eigenvector column q.
    std::vector<double> Y(n * n);
    for (std::size_t col = 0; col < n; ++col) {
        for (std::size_t ii = n; ii-- > 0;) {
            double s = C[ii * n + col];
            for (std::size_t k = ii + 1; k < n; ++k) s -= L[k * n + ii] * Y[k * n + col];
            Y[ii * n + col] = s / L[ii * n + ii];
        }
    }

    // Sort ascending by eigenvalue.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    out.values.resize(n);
    out.vectors.assign(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = d[order[j]];
        for (std::size_t i = 0; i < n; ++i) out.vectors[i * n + j] = Y[i * n + order[j]];
    }
    return out;
}

} // namespace eigopt
