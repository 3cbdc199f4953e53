#include "moskit/mapping.hpp"

#include "moskit/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <set>
#include <string>

namespace moskit {

namespace {

using Vec4 = std::array<double, 4>;
using Mat4 = std::array<std::array<double, 4>, 4>;

// Derivative-constraint row at grid point t: d/dt of the polynomial basis.
Vec4 constraint_row(double t, int n) {
    Vec4 c{0.0, 0.0, 0.0, 0.0};
    if (n > 1) c[1] = 1.0;
    if (n > 2) c[2] = 2.0 * t;
    if (n > 3) c[3] = 3.0 * t * t;
    return c;
}

double dot(const Vec4& a, const Vec4& b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
    return s;
}

// Cholesky solve of the symmetric system A x = rhs, with a small diagonal
// jitter escalation when A is numerically semidefinite (clustered inputs).
bool solve_spd(Mat4 a, Vec4 rhs, int n, Vec4& out) {
    double max_diag = 0.0;
    for (int i = 0; i < n; ++i)
        max_diag = std::max(max_diag, std::abs(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]));
    if (max_diag == 0.0) max_diag = 1.0;

    for (double jitter = 0.0; jitter <= 1e-6 * max_diag;
         jitter = (jitter == 0.0) ? 1e-12 * max_diag : jitter * 100.0) {
        Mat4 l{};
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            for (int j = 0; j <= i; ++j) {
                double s = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (i == j) s += jitter;
                for (int k = 0; k < j; ++k)
                    s -= l[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                         l[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
                if (i == j) {
                    if (s <= 0.0 || !std::isfinite(s)) {
                        ok = false;
                        break;
                    }
                    l[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::sqrt(s);
                } else {
                    l[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                        s / l[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];
                }
            }
        }
        if (!ok) continue;

        Vec4 y{};
        for (int i = 0; i < n; ++i) {
            double s = rhs[static_cast<std::size_t>(i)];
            for (int k = 0; k < i; ++k)
                s -= l[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] * y[static_cast<std::size_t>(k)];
            y[static_cast<std::size_t>(i)] = s / l[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = y[static_cast<std::size_t>(i)];
            for (int k = i + 1; k < n; ++k)
                s -= l[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] * out[static_cast<std::size_t>(k)];
            out[static_cast<std::size_t>(i)] = s / l[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
        }
        return true;
    }
    return false;
}

struct Standardized {
    std::vector<double> z; // predictions mapped to [-1, 1]
    double mu = 0.0;
    double sigma = 1.0;
};

struct QpProblem {
    Mat4 h{};          // 2 Z'Z
    Vec4 g0{};         // -2 Z'x
    double x_sq = 0.0; // sum x_i^2, to report the true residual objective
    int n = 0;
    std::vector<double> grid; // constraint abscissae in [-1, 1]
};

// Objective sum_i (x_i - q(z_i))^2 written as al'(Z'Z)al + g0'al + x'x.
double objective(const QpProblem& p, const Vec4& al) {
    double quad = 0.0;
    for (int i = 0; i < p.n; ++i)
        for (int j = 0; j < p.n; ++j)
            quad += al[static_cast<std::size_t>(i)] * p.h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                    al[static_cast<std::size_t>(j)];
    return 0.5 * quad + dot(p.g0, al, p.n) + p.x_sq;
}

double min_constraint_value(const QpProblem& p, const Vec4& al) {
    double lo = std::numeric_limits<double>::infinity();
    for (double t : p.grid) lo = std::min(lo, dot(constraint_row(t, p.n), al, p.n));
    return lo;
}

struct IpmOutcome {
    Vec4 alpha{};
    bool converged = false;
};

// Feasible-start primal-dual interior point method for
//   min 0.5 al'H al + g0'al   s.t.  C al >= 0
// with strictly feasible start al0 (identity slope keeps every slack at 1).
IpmOutcome solve_qp(const QpProblem& p, const Vec4& alpha0) {
    const int n = p.n;
    const std::size_t m = p.grid.size();
    const double sigma_c = 0.2;
    const double tau = 0.995;

    Vec4 alpha = alpha0;
    std::vector<double> lambda(m, 1.0);
    std::vector<double> slack(m, 0.0);
    std::vector<double> crow_dot(m, 0.0);

    double g_inf = 0.0;
    for (int i = 0; i < n; ++i) g_inf = std::max(g_inf, std::abs(p.g0[static_cast<std::size_t>(i)]));
    const double scale_f = 1.0 + std::abs(objective(p, alpha0));
    const double tol_gap = 1e-11 * scale_f;
    const double tol_rd = 1e-9 * (1.0 + g_inf);

    for (int iter = 0; iter < 200; ++iter) {
        double gap = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            slack[k] = dot(constraint_row(p.grid[k], n), alpha, n);
            gap += slack[k] * lambda[k];
        }
        const double mu = gap / static_cast<double>(m);

        Vec4 rd{};
        for (int i = 0; i < n; ++i) {
            double v = p.g0[static_cast<std::size_t>(i)];
            for (int j = 0; j < n; ++j)
                v += p.h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * alpha[static_cast<std::size_t>(j)];
            rd[static_cast<std::size_t>(i)] = v;
        }
        for (std::size_t k = 0; k < m; ++k) {
            const Vec4 c = constraint_row(p.grid[k], n);
            for (int i = 0; i < n; ++i) rd[static_cast<std::size_t>(i)] -= lambda[k] * c[static_cast<std::size_t>(i)];
        }
        double rd_inf = 0.0;
        for (int i = 0; i < n; ++i) rd_inf = std::max(rd_inf, std::abs(rd[static_cast<std::size_t>(i)]));

        if (gap <= tol_gap && rd_inf <= tol_rd) return {alpha, true};

        Mat4 mmat = p.h;
        Vec4 rhs{};
        for (int i = 0; i < n; ++i) rhs[static_cast<std::size_t>(i)] = -rd[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < m; ++k) {
            const Vec4 c = constraint_row(p.grid[k], n);
            const double w = lambda[k] / slack[k];
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j)
                    mmat[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                        w * c[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(j)];
                rhs[static_cast<std::size_t>(i)] +=
                    (sigma_c * mu / slack[k] - lambda[k]) * c[static_cast<std::size_t>(i)];
            }
        }

        Vec4 dalpha{};
        if (!solve_spd(mmat, rhs, n, dalpha)) return {alpha, false};

        double step = 1.0;
        for (std::size_t k = 0; k < m; ++k) {
            crow_dot[k] = dot(constraint_row(p.grid[k], n), dalpha, n);
            if (crow_dot[k] < 0.0) step = std::min(step, -tau * slack[k] / crow_dot[k]);
        }
        std::vector<double> dlambda(m, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            dlambda[k] = sigma_c * mu / slack[k] - lambda[k] - lambda[k] / slack[k] * crow_dot[k];
            if (dlambda[k] < 0.0) step = std::min(step, -tau * lambda[k] / dlambda[k]);
        }
        if (!(step > 1e-14)) return {alpha, gap <= 1e-6 * scale_f};

        for (int i = 0; i < n; ++i) alpha[static_cast<std::size_t>(i)] += step * dalpha[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < m; ++k) lambda[k] += step * dlambda[k];
    }
    return {alpha, false};
}

// Expand q(z) with z = (y - mu)/sigma into coefficients over raw y.
MappingCoefficients expand(const Vec4& al, double mu, double sigma, double ymin, double ymax) {
    const double e = 1.0 / sigma;
    const double f0 = -mu / sigma;
    MappingCoefficients out;
    out.a = al[0] + al[1] * f0 + al[2] * f0 * f0 + al[3] * f0 * f0 * f0;
    out.b = e * (al[1] + 2.0 * al[2] * f0 + 3.0 * al[3] * f0 * f0);
    out.c = e * e * (al[2] + 3.0 * al[3] * f0);
    out.d = e * e * e * al[3];
    out.range_lo = ymin;
    out.range_hi = ymax;
    return out;
}

} // namespace

MappingCoefficients fit_monotone_cubic(const std::vector<double>& subjective,
                                       const std::vector<double>& predicted, int grid_points) {
    const std::size_t count = subjective.size();
    if (count != predicted.size())
        throw ValidationError("fit_monotone_cubic: subjective and predicted lengths differ (" +
                              std::to_string(count) + " vs " + std::to_string(predicted.size()) + ")");
    if (count < 2)
        throw ValidationError("fit_monotone_cubic: need at least 2 points, got " + std::to_string(count));
    if (grid_points < 2)
        throw ValidationError("fit_monotone_cubic: grid_points must be >= 2");
    for (std::size_t i = 0; i < count; ++i) {
        if (!std::isfinite(subjective[i]) || !std::isfinite(predicted[i]))
            throw ValidationError("fit_monotone_cubic: non-finite value at index " + std::to_string(i));
    }

    const double ymin = *std::min_element(predicted.begin(), predicted.end());
    const double ymax = *std::max_element(predicted.begin(), predicted.end());
    const double mean_x =
        std::accumulate(subjective.begin(), subjective.end(), 0.0) / static_cast<double>(count);

    std::set<double> distinct(predicted.begin(), predicted.end());
    if (distinct.size() == 1) {
        // Every prediction identical: the only monotone polynomial information
        // is the level, so fit the constant least-squares solution.
        return MappingCoefficients{mean_x, 0.0, 0.0, 0.0, ymin, ymax};
    }

    const double mu = 0.5 * (ymin + ymax);
    const double sigma = 0.5 * (ymax - ymin);
    std::vector<double> z(count);
    for (std::size_t i = 0; i < count; ++i) z[i] = (predicted[i] - mu) / sigma;

    const int order = static_cast<int>(std::min<std::size_t>(3, distinct.size() - 1));

    if (order == 1) {
        // Closed form: constrained linear regression over z, slope clamped at 0.
        double sz = 0.0, szz = 0.0, sx = 0.0, szx = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            sz += z[i];
            szz += z[i] * z[i];
            sx += subjective[i];
            szx += z[i] * subjective[i];
        }
        const double nd = static_cast<double>(count);
        double slope = (nd * szx - sz * sx) / (nd * szz - sz * sz);
        if (!(slope > 0.0)) slope = 0.0;
        const double intercept = (sx - slope * sz) / nd;
        return expand(Vec4{intercept, slope, 0.0, 0.0}, mu, sigma, ymin, ymax);
    }

    QpProblem prob;
    prob.n = order + 1;
    for (std::size_t i = 0; i < count; ++i) {
        Vec4 row{1.0, z[i], z[i] * z[i], z[i] * z[i] * z[i]};
        for (int a = 0; a < prob.n; ++a) {
            for (int b = 0; b < prob.n; ++b)
                prob.h[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] +=
                    2.0 * row[static_cast<std::size_t>(a)] * row[static_cast<std::size_t>(b)];
            prob.g0[static_cast<std::size_t>(a)] -= 2.0 * row[static_cast<std::size_t>(a)] * subjective[i];
        }
        prob.x_sq += subjective[i] * subjective[i];
    }
    prob.grid.resize(static_cast<std::size_t>(grid_points));
    for (int k = 0; k < grid_points; ++k)
        prob.grid[static_cast<std::size_t>(k)] =
            -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(grid_points - 1);

    // Start at the flat-slope interior point: every derivative slack is 1.
    const Vec4 alpha0{mean_x, 1.0, 0.0, 0.0};
    const IpmOutcome ipm = solve_qp(prob, alpha0);

    Vec4 best = ipm.alpha;
    double best_f = objective(prob, best);
    bool certified = ipm.converged;

    // Unconstrained least squares, kept only when it already satisfies the
    // derivative grid; in that case it is the global constrained optimum.
    {
        Mat4 ztz = prob.h;
        Vec4 ztx{};
        for (int i = 0; i < prob.n; ++i) {
            for (int j = 0; j < prob.n; ++j)
                ztz[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *= 0.5;
            ztx[static_cast<std::size_t>(i)] = -0.5 * prob.g0[static_cast<std::size_t>(i)];
        }
        Vec4 ols{};
        if (solve_spd(ztz, ztx, prob.n, ols) && min_constraint_value(prob, ols) >= 0.0) {
            const double f = objective(prob, ols);
            certified = true;
            if (f < best_f) {
                best = ols;
                best_f = f;
            }
        }
    }

    // Identity over raw predictions, expressed in z.
    {
        const Vec4 ident{mu, sigma, 0.0, 0.0};
        if (prob.n >= 2) {
            const double f = objective(prob, ident);
            if (f < best_f) {
                best = ident;
                best_f = f;
            }
        }
    }

    MappingCoefficients out = expand(best, mu, sigma, ymin, ymax);
    if (!certified) {
        throw SolverError("fit_monotone_cubic: interior point iteration did not converge", out);
    }
    return out;
}

std::vector<double> apply_mapping(const MappingCoefficients& coeffs,
                                  const std::vector<double>& predicted) {
    std::vector<double> out(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) out[i] = coeffs.evaluate(predicted[i]);
    return out;
}

std::pair<double, MappingCoefficients> rmse_map(const std::vector<double>& subjective,
                                                const std::vector<double>& predicted,
                                                int grid_points, RmseDenominator denom) {
    MappingCoefficients coeffs = fit_monotone_cubic(subjective, predicted, grid_points);
    const double value = rmse(subjective, apply_mapping(coeffs, predicted), denom);
    return {value, coeffs};
}

} // namespace moskit
