#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "omtnet/types.hpp"

namespace omtnet {

/// Eigenvalues sorted by ascending imaginary part (frequency), ties broken by
/// ascending real part, so mode labels are deterministic. Columns of
/// `vectors` follow the same order.
struct EigenDecomposition {
    CVector eigenvalues;
    CMatrix vectors;
};

namespace detail {

// Fuzzy lexicographic compare on (Im, Re). Two imaginary parts closer than
// 1e-12 of the spectral scale count as a tie.
inline bool eig_order_less(const Complex& a, const Complex& b, double scale) {
    const double tol = 1e-12 * scale;
    if (std::abs(a.imag() - b.imag()) > tol) return a.imag() < b.imag();
    return a.real() < b.real();
}

}  // namespace detail

inline CMatrix inverse(const CMatrix& m) {
    if (m.rows() != m.cols()) throw NumericalError("inverse: matrix not square");
    require_finite(m, "inverse");
    Eigen::FullPivLU<CMatrix> lu(m);
    lu.setThreshold(1e-13);
    if (!lu.isInvertible())
        throw NumericalError("inverse: singular matrix (pivot underflow)");
    return lu.inverse();
}

inline EigenDecomposition eig(const CMatrix& m) {
    if (m.rows() != m.cols()) throw NumericalError("eig: matrix not square");
    require_finite(m, "eig");
    Eigen::ComplexEigenSolver<CMatrix> solver(m, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eig: QR iteration did not converge");

    const CVector vals = solver.eigenvalues();
    const CMatrix vecs = solver.eigenvectors();
    const double scale = std::max(vals.cwiseAbs().maxCoeff(), 1e-300);

    std::vector<int> order(static_cast<size_t>(vals.size()));
    for (size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return detail::eig_order_less(vals(a), vals(b), scale);
    });

    EigenDecomposition out;
    out.eigenvalues.resize(vals.size());
    out.vectors.resize(vecs.rows(), vecs.cols());
    for (size_t k = 0; k < order.size(); ++k) {
        out.eigenvalues(static_cast<Eigen::Index>(k)) = vals(order[k]);
        out.vectors.col(static_cast<Eigen::Index>(k)) = vecs.col(order[k]);
    }
    return out;
}

/// Solves m C + C m^H = d for C. Requires every eigenvalue of m to have a
/// positive real part (stable drift) and d Hermitian.
///
/// Route: eigendecompose m, divide by lambda_i + conj(lambda_j), transform
/// back. Matrices here are tiny, so robustness beats speed; if the
/// eigenbasis is too ill-conditioned to meet the residual contract the
/// vectorized linear solve is used instead.
inline CMatrix lyapunov_solve(const CMatrix& m, const CMatrix& d) {
    const auto n = m.rows();
    if (n != m.cols() || d.rows() != n || d.cols() != n)
        throw NumericalError("lyapunov_solve: dimension mismatch");
    require_finite(m, "lyapunov_solve");
    require_finite(d, "lyapunov_solve");

    const EigenDecomposition ed = eig(m);
    for (Eigen::Index k = 0; k < n; ++k) {
        if (ed.eigenvalues(k).real() <= 0.0)
            throw RegimeError("lyapunov_solve: drift matrix is not stable");
    }

    CMatrix c;
    bool eigen_route_ok = true;
    try {
        const CMatrix vinv = inverse(ed.vectors);
        CMatrix dt = vinv * d * vinv.adjoint();
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                dt(i, j) /= ed.eigenvalues(i) + std::conj(ed.eigenvalues(j));
        c = ed.vectors * dt * ed.vectors.adjoint();
    } catch (const NumericalError&) {
        eigen_route_ok = false;  // defective drift (e.g. identical cascaded blocks)
        c = CMatrix::Zero(n, n);
    }

    const double dnorm = std::max(d.norm(), 1e-300);
    if (!eigen_route_ok ||
        (m * c + c * m.adjoint() - d).norm() > 1e-10 * std::max(dnorm, (m * c).norm())) {
        // Near-defective drift (exceptional point); fall back to the
        // Kronecker-form linear system.
        CMatrix id = CMatrix::Identity(n, n);
        CMatrix big(n * n, n * n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                for (Eigen::Index k = 0; k < n; ++k)
                    for (Eigen::Index l = 0; l < n; ++l) {
                        // vec column-major: entry C(k,l) at index l*n+k.
                        Complex v = 0.0;
                        if (l == j) v += m(i, k);
                        if (k == i) v += std::conj(m(j, l));
                        big(j * n + i, l * n + k) = v;
                    }
        CVector rhs(n * n);
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i) rhs(j * n + i) = d(i, j);
        CVector x = big.fullPivLu().solve(rhs);
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i) c(i, j) = x(j * n + i);
    }
    return c;
}

namespace detail {

struct QuadState {
    const std::function<Complex(double)>* f;
    double abs_tol;
    int max_depth;
};

inline Complex adaptive_simpson(const QuadState& st, double a, double b, Complex fa,
                                Complex fm, Complex fb, Complex whole, double tol,
                                int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const Complex flm = (*st.f)(lm);
    const Complex frm = (*st.f)(rm);
    const Complex left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const Complex right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const Complex delta = left + right - whole;
    if (depth >= st.max_depth || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           adaptive_simpson(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

inline Complex integrate_segment(const QuadState& st, double a, double b) {
    const Complex fa = (*st.f)(a);
    const Complex fb = (*st.f)(b);
    const Complex fm = (*st.f)(0.5 * (a + b));
    const Complex whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(st, a, b, fa, fm, fb, whole, st.abs_tol, 0);
}

}  // namespace detail

/// Integral of f over the whole real axis, for spectra decaying at least as
/// 1/omega^2 beyond `cutoff`. The finite window [-cutoff, cutoff] is done by
/// adaptive Simpson (split at `breakpoints`, e.g. normal-mode frequencies);
/// the tails are folded in exactly through the substitution u = 1/omega.
inline Complex quad_spectrum(const std::function<Complex(double)>& f, double cutoff,
                             std::vector<double> breakpoints = {},
                             double rel_tol = 1e-9) {
    if (!(cutoff > 0.0)) throw NumericalError("quad_spectrum: cutoff must be positive");

    // Decay probe: the tail treatment assumes |f| falls at least ~1/omega^2.
    const double f_hi = std::abs(f(cutoff)) + std::abs(f(-cutoff));
    const double f_hi2 = std::abs(f(2.0 * cutoff)) + std::abs(f(-2.0 * cutoff));
    if (f_hi > 0.0 && 3.0 * f_hi2 > f_hi)
        throw NumericalError(
            "quad_spectrum: integrand decays slower than 1/omega^2 at the cutoff; "
            "increase the cutoff");

    std::vector<double> pts;
    pts.push_back(-cutoff);
    for (double x : breakpoints)
        if (x > -cutoff && x < cutoff) pts.push_back(x);
    pts.push_back(cutoff);
    std::sort(pts.begin(), pts.end());

    auto run = [&](double abs_tol) {
        detail::QuadState st{&f, abs_tol, 48};
        Complex total = 0.0;
        for (size_t k = 0; k + 1 < pts.size(); ++k)
            total += detail::integrate_segment(st, pts[k], pts[k + 1]);

        // Tails via u = 1/omega: int_c^inf f = int_0^{1/c} f(1/u)/u^2 du.
        const double eps_u = 1e-9 / cutoff;
        std::function<Complex(double)> tp = [&](double u) { return f(1.0 / u) / (u * u); };
        std::function<Complex(double)> tn = [&](double u) { return f(-1.0 / u) / (u * u); };
        detail::QuadState stp{&tp, abs_tol, 48};
        detail::QuadState stn{&tn, abs_tol, 48};
        total += detail::integrate_segment(stp, eps_u, 1.0 / cutoff);
        total += detail::integrate_segment(stn, eps_u, 1.0 / cutoff);
        return total;
    };

    // Coarse pass fixes the initial tolerance scale; narrow peaks make it a
    // large overestimate, in which case the result of the first full pass
    // resets the scale for a second one.
    double scale = 0.0;
    for (size_t k = 0; k + 1 < pts.size(); ++k) {
        const double a = pts[k], b = pts[k + 1], m = 0.5 * (a + b);
        scale += std::abs((b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b)));
    }
    scale = std::max(scale, f_hi * cutoff);
    if (scale == 0.0) return Complex(0.0, 0.0);

    Complex total = run(std::max(rel_tol * scale, 1e-300));
    if (std::abs(total) < 0.1 * scale)
        total = run(std::max(rel_tol * std::abs(total), 1e-300));
    return total;
}

/// Classic fixed-step RK4. One step per grid interval; the caller owns the
/// resolution. Error falls as dt^4 on smooth problems.
template <class State, class Rhs>
std::vector<State> ode_rk4(Rhs&& rhs, const State& y0, const std::vector<double>& t_grid) {
    if (t_grid.size() < 2) throw NumericalError("ode_rk4: need at least two grid points");
    std::vector<State> traj;
    traj.reserve(t_grid.size());
    traj.push_back(y0);
    State y = y0;
    for (size_t k = 0; k + 1 < t_grid.size(); ++k) {
        const double t = t_grid[k];
        const double dt = t_grid[k + 1] - t;
        const State k1 = rhs(t, y);
        const State k2 = rhs(t + 0.5 * dt, State(y + 0.5 * dt * k1));
        const State k3 = rhs(t + 0.5 * dt, State(y + 0.5 * dt * k2));
        const State k4 = rhs(t + dt, State(y + dt * k3));
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        traj.push_back(y);
    }
    return traj;
}

inline double root_bisect(const std::function<double(double)>& g, double lo, double hi,
                          double tol) {
    double glo = g(lo);
    double ghi = g(hi);
    if (std::abs(glo) <= tol) return lo;
    if (std::abs(ghi) <= tol) return hi;
    if (glo * ghi > 0.0)
        throw NumericalError("root_bisect: no sign change on the bracket");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (std::abs(gm) <= tol) return mid;
        if (glo * gm <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            glo = gm;
        }
        if (hi - lo < 1e-16 * std::max(1.0, std::abs(lo) + std::abs(hi))) return 0.5 * (lo + hi);
    }
    return 0.5 * (lo + hi);
}

/// Distinct positive real roots of c3 x^3 + c2 x^2 + c1 x + c0, via the
/// companion matrix. Roots closer than 1e-9 of the root scale are merged.
inline std::vector<double> positive_real_cubic_roots(double c3, double c2, double c1,
                                                     double c0) {
    std::vector<double> out;
    if (c3 == 0.0) throw NumericalError("cubic: leading coefficient is zero");
    CMatrix comp = CMatrix::Zero(3, 3);
    comp(0, 2) = -c0 / c3;
    comp(1, 2) = -c1 / c3;
    comp(2, 2) = -c2 / c3;
    comp(1, 0) = 1.0;
    comp(2, 1) = 1.0;
    Eigen::ComplexEigenSolver<CMatrix> solver(comp, false);
    double scale = 0.0;
    for (int k = 0; k < 3; ++k) scale = std::max(scale, std::abs(solver.eigenvalues()(k)));
    for (int k = 0; k < 3; ++k) {
        const Complex r = solver.eigenvalues()(k);
        if (std::abs(r.imag()) < 1e-9 * std::max(scale, 1e-300) && r.real() > 0.0)
            out.push_back(r.real());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [&](double a, double b) {
                              return std::abs(a - b) <= 1e-9 * std::max(scale, 1e-300);
                          }),
              out.end());
    return out;
}

}  // namespace omtnet
