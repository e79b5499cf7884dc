#pragma once

// Dense strictly convex QP with identity Hessian:
//
//   minimize   0.5 * ||u - u_nom||^2
//   subject to A u <= b,   lo <= u <= hi
//
// Solved with a dual active-set iteration (Goldfarb-Idnani specialised to
// H = I): start at the unconstrained optimum u_nom, repeatedly add the most
// violated constraint and take the dual-feasible step toward it, dropping
// active constraints whose multipliers would go negative. Detects
// infeasibility when a violated constraint is a nonpositive combination of
// the active normals. Sizes here are tiny (n <= a few dozen), so the
// active-set Gram system is re-factorised from scratch every iteration.

#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mrsim/core.hpp"

namespace mrsim {

inline constexpr double kQpInf = 1e30;

struct QuadraticProgram {
    int n = 0;
    std::vector<double> u_nom;  // size n
    std::vector<double> A;      // m x n, row-major
    std::vector<double> b;      // size m
    std::vector<double> lo;     // size n; -kQpInf when unbounded
    std::vector<double> hi;     // size n; +kQpInf when unbounded

    int rows() const { return static_cast<int>(b.size()); }

    void validate() const {
        if (n <= 0) throw std::invalid_argument("QuadraticProgram: n must be positive");
        if (static_cast<int>(u_nom.size()) != n)
            throw std::invalid_argument("QuadraticProgram: u_nom size mismatch");
        if (A.size() != b.size() * static_cast<std::size_t>(n))
            throw std::invalid_argument("QuadraticProgram: A/b size mismatch");
        if (static_cast<int>(lo.size()) != n || static_cast<int>(hi.size()) != n)
            throw std::invalid_argument("QuadraticProgram: box size mismatch");
        for (int i = 0; i < n; ++i)
            if (lo[i] > hi[i]) throw std::invalid_argument("QuadraticProgram: lo > hi");
    }
};

enum class QpStatus { Optimal, Infeasible, IterationLimit };

struct QpResult {
    std::vector<double> u;
    QpStatus status = QpStatus::Optimal;
    double kkt_residual = 0.0;
    int iterations = 0;
};

namespace qpdetail {

// Solve the SPD system M x = rhs in place via Cholesky. Returns false if a
// pivot collapses (dependent active set; callers treat that as degeneracy).
inline bool cholesky_solve(std::vector<double>& M, std::vector<double>& x, int k) {
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = M[i * k + j];
            for (int p = 0; p < j; ++p) s -= M[i * k + p] * M[j * k + p];
            if (i == j) {
                if (s <= 1e-14) return false;
                M[i * k + i] = std::sqrt(s);
            } else {
                M[i * k + j] = s / M[j * k + j];
            }
        }
    }
    for (int i = 0; i < k; ++i) {
        double s = x[i];
        for (int p = 0; p < i; ++p) s -= M[i * k + p] * x[p];
        x[i] = s / M[i * k + i];
    }
    for (int i = k - 1; i >= 0; --i) {
        double s = x[i];
        for (int p = i + 1; p < k; ++p) s -= M[p * k + i] * x[p];
        x[i] = s / M[i * k + i];
    }
    return true;
}

// All constraints (rows then finite box sides) as unit-norm rows g.u <= h.
struct RowSet {
    std::vector<double> G;  // rows x n
    std::vector<double> h;
    int n = 0;

    double dot_u(int r, const std::vector<double>& u) const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += G[static_cast<std::size_t>(r) * n + i] * u[i];
        return s;
    }
};

inline RowSet fold_rows(const QuadraticProgram& qp) {
    RowSet rs;
    rs.n = qp.n;
    const int m = qp.rows();
    for (int r = 0; r < m; ++r) {
        double norm = 0.0;
        for (int i = 0; i < qp.n; ++i) {
            double a = qp.A[static_cast<std::size_t>(r) * qp.n + i];
            norm += a * a;
        }
        norm = std::sqrt(norm);
        if (norm < 1e-14) {
            // 0.u <= b: vacuous if b >= 0, else globally infeasible; keep the
            // row so the main loop reports it.
            rs.G.insert(rs.G.end(), static_cast<std::size_t>(qp.n), 0.0);
            rs.h.push_back(qp.b[r]);
            continue;
        }
        for (int i = 0; i < qp.n; ++i)
            rs.G.push_back(qp.A[static_cast<std::size_t>(r) * qp.n + i] / norm);
        rs.h.push_back(qp.b[r] / norm);
    }
    for (int i = 0; i < qp.n; ++i) {
        if (qp.hi[i] < kQpInf) {
            std::vector<double> row(qp.n, 0.0);
            row[i] = 1.0;
            rs.G.insert(rs.G.end(), row.begin(), row.end());
            rs.h.push_back(qp.hi[i]);
        }
        if (qp.lo[i] > -kQpInf) {
            std::vector<double> row(qp.n, 0.0);
            row[i] = -1.0;
            rs.G.insert(rs.G.end(), row.begin(), row.end());
            rs.h.push_back(-qp.lo[i]);
        }
    }
    return rs;
}

} // namespace qpdetail

/// KKT residual of a candidate solution: max of primal violation, dual
/// negativity, complementary slackness, and stationarity mismatch.
inline double qp_kkt_residual(const QuadraticProgram& qp, const std::vector<double>& u,
                              const std::vector<double>& lambda_rows) {
    using std::fabs;
    const int m = qp.rows();
    double res = 0.0;
    std::vector<double> grad(qp.n);
    for (int i = 0; i < qp.n; ++i) grad[i] = u[i] - qp.u_nom[i];
    for (int r = 0; r < m; ++r) {
        double au = 0.0;
        for (int i = 0; i < qp.n; ++i) au += qp.A[static_cast<std::size_t>(r) * qp.n + i] * u[i];
        double slack = au - qp.b[r];
        res = std::max(res, slack);                         // primal feasibility
        res = std::max(res, -lambda_rows[r]);               // dual feasibility
        res = std::max(res, fabs(lambda_rows[r] * slack));  // complementarity
        for (int i = 0; i < qp.n; ++i)
            grad[i] += lambda_rows[r] * qp.A[static_cast<std::size_t>(r) * qp.n + i];
    }
    // The leftover gradient must be explained by multipliers on active box
    // sides: mu_hi = max(0, -grad), mu_lo = max(0, grad), both complementary.
    for (int i = 0; i < qp.n; ++i) {
        double g = grad[i];
        if (g < 0.0) {
            if (qp.hi[i] >= kQpInf) res = std::max(res, -g);
            else res = std::max(res, fabs(g) * std::max(0.0, qp.hi[i] - u[i]));
        } else if (g > 0.0) {
            if (qp.lo[i] <= -kQpInf) res = std::max(res, g);
            else res = std::max(res, g * std::max(0.0, u[i] - qp.lo[i]));
        }
        res = std::max(res, u[i] - qp.hi[i]);
        res = std::max(res, qp.lo[i] - u[i]);
    }
    return res;
}

/// Solve the QP. `tolerance` bounds the accepted constraint violation and
/// KKT residual; `max_iterations` caps active-set changes (0 = automatic).
inline QpResult solve_qp(const QuadraticProgram& qp, double tolerance = 1e-9,
                         int max_iterations = 0) {
    qp.validate();
    using namespace qpdetail;

    QpResult out;
    out.u = qp.u_nom;

    RowSet rs = fold_rows(qp);
    const int total = static_cast<int>(rs.h.size());
    if (max_iterations <= 0) max_iterations = 100 + 20 * total;

    std::vector<int> active;          // indices into rs
    std::vector<double> lambda;       // multipliers, aligned with `active`
    std::vector<double>& u = out.u;

    auto solve_gram = [&](const std::vector<double>& target, std::vector<double>& r) -> bool {
        // r = (N^T N)^{-1} N^T target, N = columns of active normals.
        const int k = static_cast<int>(active.size());
        r.assign(k, 0.0);
        if (k == 0) return true;
        std::vector<double> M(static_cast<std::size_t>(k) * k);
        for (int a = 0; a < k; ++a)
            for (int c = 0; c <= a; ++c) {
                double s = 0.0;
                for (int i = 0; i < rs.n; ++i)
                    s += rs.G[static_cast<std::size_t>(active[a]) * rs.n + i] *
                         rs.G[static_cast<std::size_t>(active[c]) * rs.n + i];
                M[a * k + c] = s;
                M[c * k + a] = s;
            }
        for (int a = 0; a < k; ++a) {
            double s = 0.0;
            for (int i = 0; i < rs.n; ++i)
                s += rs.G[static_cast<std::size_t>(active[a]) * rs.n + i] * target[i];
            r[a] = s;
        }
        return cholesky_solve(M, r, k);
    };

    int iter = 0;
    for (; iter < max_iterations; ++iter) {
        // Most violated inactive constraint.
        int p = -1;
        double worst = tolerance;
        for (int r = 0; r < total; ++r) {
            bool is_active = false;
            for (int a : active)
                if (a == r) { is_active = true; break; }
            if (is_active) continue;
            double v = rs.dot_u(r, u) - rs.h[r];
            if (v > worst) {
                worst = v;
                p = r;
            }
        }
        if (p < 0) break;  // feasible and dual-feasible: done

        // Zero-norm row that is violated means b < 0 on a vacuous row.
        {
            double gnorm = 0.0;
            for (int i = 0; i < rs.n; ++i) {
                double g = rs.G[static_cast<std::size_t>(p) * rs.n + i];
                gnorm += g * g;
            }
            if (gnorm < 1e-14) {
                out.status = QpStatus::Infeasible;
                out.iterations = iter;
                return out;
            }
        }

        std::vector<double> np(rs.n);
        for (int i = 0; i < rs.n; ++i) np[i] = rs.G[static_cast<std::size_t>(p) * rs.n + i];

        // Inner loop: step toward constraint p, dropping blockers. The
        // incoming constraint's multiplier accumulates across partial steps.
        bool added = false;
        double lam_p = 0.0;
        for (int guard = 0; guard <= total && !added; ++guard) {
            std::vector<double> r;
            if (!solve_gram(np, r)) {
                // Dependent active set should not happen (rows are only added
                // with independent normals); drop the weakest multiplier.
                int drop = 0;
                for (std::size_t i = 1; i < lambda.size(); ++i)
                    if (lambda[i] < lambda[drop]) drop = static_cast<int>(i);
                active.erase(active.begin() + drop);
                lambda.erase(lambda.begin() + drop);
                continue;
            }
            std::vector<double> z = np;
            for (std::size_t a = 0; a < active.size(); ++a)
                for (int i = 0; i < rs.n; ++i)
                    z[i] -= r[a] * rs.G[static_cast<std::size_t>(active[a]) * rs.n + i];
            double z2 = 0.0;
            for (int i = 0; i < rs.n; ++i) z2 += z[i] * z[i];

            double viol = rs.dot_u(p, u) - rs.h[p];
            if (viol <= tolerance) {
                if (lam_p > 0.0) {
                    active.push_back(p);
                    lambda.push_back(lam_p);
                }
                added = true;
                break;
            }

            // Max dual step before an active multiplier hits zero.
            double t1 = std::numeric_limits<double>::infinity();
            int blocker = -1;
            for (std::size_t a = 0; a < active.size(); ++a) {
                if (r[a] > 1e-12) {
                    double t = lambda[a] / r[a];
                    if (t < t1) {
                        t1 = t;
                        blocker = static_cast<int>(a);
                    }
                }
            }

            if (z2 <= 1e-14) {
                if (blocker < 0) {
                    out.status = QpStatus::Infeasible;
                    out.iterations = iter;
                    return out;
                }
                for (std::size_t a = 0; a < active.size(); ++a) lambda[a] -= t1 * r[a];
                lam_p += t1;
                active.erase(active.begin() + blocker);
                lambda.erase(lambda.begin() + blocker);
                continue;
            }

            double t2 = viol / z2;
            double t = std::min(t1, t2);
            for (int i = 0; i < rs.n; ++i) u[i] -= t * z[i];
            for (std::size_t a = 0; a < active.size(); ++a) lambda[a] -= t * r[a];
            lam_p += t;
            if (t2 <= t1) {
                active.push_back(p);
                lambda.push_back(lam_p);
                added = true;
            } else {
                active.erase(active.begin() + blocker);
                lambda.erase(lambda.begin() + blocker);
            }
        }
        if (!added) {
            // Walked the whole guard loop without resolving; treat as stall.
            break;
        }
    }

    if (iter >= max_iterations) out.status = QpStatus::IterationLimit;
    out.iterations = iter;

    // Map multipliers back to original rows for the residual report (the
    // folded rows were normalised, box rows handled inside the residual).
    std::vector<double> lam_rows(qp.rows(), 0.0);
    for (std::size_t a = 0; a < active.size(); ++a) {
        int idx = active[a];
        if (idx < qp.rows()) {
            double norm = 0.0;
            for (int i = 0; i < qp.n; ++i) {
                double v = qp.A[static_cast<std::size_t>(idx) * qp.n + i];
                norm += v * v;
            }
            norm = std::sqrt(norm);
            if (norm > 1e-14) lam_rows[idx] = lambda[a] / norm;
        }
    }
    out.kkt_residual = qp_kkt_residual(qp, u, lam_rows);
    return out;
}

} // namespace mrsim
