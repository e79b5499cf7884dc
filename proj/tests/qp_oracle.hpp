#pragma once

// Test-only ground truth for small QPs: enumerate every subset of
// constraints as a candidate active set, solve the equality-constrained
// problem with plain Gaussian elimination, and keep the KKT-consistent
// candidate with the smallest objective. Deliberately independent of the
// production solver (no shared linear algebra).

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "mrsim/qp.hpp"
#include "mrsim/rng.hpp"

namespace mrsim::testoracle {

// Gaussian elimination with partial pivoting; returns false on a tiny pivot.
inline bool gauss_solve(std::vector<double> M, std::vector<double>& x, int k) {
    std::vector<int> perm(k);
    for (int i = 0; i < k; ++i) perm[i] = i;
    for (int col = 0; col < k; ++col) {
        int best = col;
        for (int r = col + 1; r < k; ++r)
            if (std::fabs(M[r * k + col]) > std::fabs(M[best * k + col])) best = r;
        if (std::fabs(M[best * k + col]) < 1e-10) return false;
        if (best != col) {
            for (int c = 0; c < k; ++c) std::swap(M[best * k + c], M[col * k + c]);
            std::swap(x[best], x[col]);
        }
        for (int r = col + 1; r < k; ++r) {
            double f = M[r * k + col] / M[col * k + col];
            for (int c = col; c < k; ++c) M[r * k + c] -= f * M[col * k + c];
            x[r] -= f * x[col];
        }
    }
    for (int r = k - 1; r >= 0; --r) {
        double s = x[r];
        for (int c = r + 1; c < k; ++c) s -= M[r * k + c] * x[c];
        x[r] = s / M[r * k + r];
    }
    return true;
}

struct OracleSolution {
    std::vector<double> u;
    double objective = std::numeric_limits<double>::infinity();
};

/// Brute-force optimum of min 0.5||u - u_nom||^2 s.t. A u <= b (boxes must
/// be folded into rows by the caller or left unbounded).
inline std::optional<OracleSolution> active_set_enumeration(const QuadraticProgram& qp) {
    const int n = qp.n;
    const int m = qp.rows();
    const double tol = 1e-8;
    OracleSolution best;
    bool found = false;

    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        std::vector<int> subset;
        for (int r = 0; r < m; ++r)
            if (mask & (1u << r)) subset.push_back(r);
        if (static_cast<int>(subset.size()) > n) continue;
        const int k = static_cast<int>(subset.size());

        std::vector<double> u(qp.u_nom);
        std::vector<double> lambda;
        if (k > 0) {
            // (A_S A_S^T) lambda = A_S u_nom - b_S
            std::vector<double> M(static_cast<std::size_t>(k) * k, 0.0);
            std::vector<double> rhs(k, 0.0);
            for (int a = 0; a < k; ++a) {
                for (int c = 0; c < k; ++c) {
                    double s = 0.0;
                    for (int i = 0; i < n; ++i)
                        s += qp.A[static_cast<std::size_t>(subset[a]) * n + i] *
                             qp.A[static_cast<std::size_t>(subset[c]) * n + i];
                    M[a * k + c] = s;
                }
                double s = -qp.b[subset[a]];
                for (int i = 0; i < n; ++i)
                    s += qp.A[static_cast<std::size_t>(subset[a]) * n + i] * qp.u_nom[i];
                rhs[a] = s;
            }
            lambda = rhs;
            if (!gauss_solve(M, lambda, k)) continue;
            bool dual_ok = true;
            for (double l : lambda) dual_ok = dual_ok && l >= -tol;
            if (!dual_ok) continue;
            for (int a = 0; a < k; ++a)
                for (int i = 0; i < n; ++i)
                    u[i] -= lambda[a] * qp.A[static_cast<std::size_t>(subset[a]) * n + i];
        }

        bool feasible = true;
        for (int r = 0; r < m && feasible; ++r) {
            double au = 0.0;
            for (int i = 0; i < n; ++i) au += qp.A[static_cast<std::size_t>(r) * n + i] * u[i];
            feasible = au <= qp.b[r] + tol;
        }
        if (!feasible) continue;

        double obj = 0.0;
        for (int i = 0; i < n; ++i) obj += 0.5 * (u[i] - qp.u_nom[i]) * (u[i] - qp.u_nom[i]);
        if (obj < best.objective) {
            best.objective = obj;
            best.u = u;
            found = true;
        }
    }
    if (!found) return std::nullopt;
    return best;
}

/// Random strictly feasible QP: n <= 8 variables, m <= 12 rows, a known
/// interior point, unbounded boxes.
inline QuadraticProgram random_feasible_qp(SplitRng& rng, int max_n = 8, int max_m = 12) {
    QuadraticProgram qp;
    qp.n = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(max_n)));
    int m = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(max_m)));
    std::vector<double> z(qp.n);
    for (auto& v : z) v = rng.uniform(-1, 1);
    for (int r = 0; r < m; ++r) {
        double az = 0.0;
        std::vector<double> row(qp.n);
        for (int i = 0; i < qp.n; ++i) {
            row[i] = rng.uniform(-1, 1);
            az += row[i] * z[i];
        }
        qp.A.insert(qp.A.end(), row.begin(), row.end());
        qp.b.push_back(az + rng.uniform(0.1, 1.0));
    }
    qp.u_nom.resize(qp.n);
    for (auto& v : qp.u_nom) v = rng.uniform(-2, 2);
    qp.lo.assign(qp.n, -kQpInf);
    qp.hi.assign(qp.n, kQpInf);
    return qp;
}

inline double qp_objective(const QuadraticProgram& qp, const std::vector<double>& u) {
    double obj = 0.0;
    for (int i = 0; i < qp.n; ++i) obj += 0.5 * (u[i] - qp.u_nom[i]) * (u[i] - qp.u_nom[i]);
    return obj;
}

} // namespace mrsim::testoracle
