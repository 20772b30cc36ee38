// Reference computations used only by the tests. Each one follows a route
// that does not go through the library code it is compared against.
#ifndef OAM_TESTS_ORACLES_HPP
#define OAM_TESTS_ORACLES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle
{
using cplx = std::complex<double>;

// Generator A of da/dt = A a for the coupled-mode equations with constant
// phase, written out entry by entry (lab frame, no drive).
inline Eigen::MatrixXcd generator(int n, double kappa, double omega0, double phi, int num_aux,
                                  const std::vector<double> &gamma)
{
    const cplx I(0.0, 1.0);
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    const cplx fwd = num_aux == 2 ? cplx(kappa * std::cos(phi)) : kappa * std::exp(-I * phi);
    const cplx bwd = num_aux == 2 ? cplx(kappa * std::cos(phi)) : kappa * std::exp(I * phi);
    for (int k = 0; k < n; ++k) {
        A(k, k) = -I * omega0 - 0.5 * gamma[static_cast<std::size_t>(k)];
        if (k + 1 < n) {
            A(k, k + 1) = I * fwd;
        }
        if (k > 0) {
            A(k, k - 1) = I * bwd;
        }
    }
    return A;
}

// exp(A t) a0 through an eigendecomposition of A.
inline Eigen::VectorXcd propagate(const Eigen::MatrixXcd &A, const Eigen::VectorXcd &a0, double t)
{
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A);
    const Eigen::MatrixXcd V = es.eigenvectors();
    Eigen::VectorXcd c = V.partialPivLu().solve(a0);
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        c(k) *= std::exp(es.eigenvalues()(k) * t);
    }
    return V * c;
}

// Root of a monotone function on [lo, hi] by bisection.
inline double bisect(const std::function<double(double)> &f, double lo, double hi, int iters = 200)
{
    double flo = f(lo);
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Group velocity at frequency w of the band w(K) = w0 - 2 kappa cos K by
// locating K on [0, pi] and differentiating numerically.
inline double numeric_group_velocity(double w, double kappa, double w0)
{
    auto band = [&](double K) { return w0 - 2.0 * kappa * std::cos(K); };
    const double K = bisect([&](double k) { return band(k) - w; }, 0.0, M_PI);
    const double h = 1e-6;
    return std::abs((band(K + h) - band(K - h)) / (2.0 * h));
}

// Port reflection of a lattice by a dense linear solve of
//   (w - H + i Gamma/2) x = e0,  f = |1 - i gbar x0|^2.
inline double dense_filter(int half, double kappa, double w0, double gbar, const std::function<double(int)> &gamma,
                           double w)
{
    const int n = 2 * half + 1;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        const int j = k - half;
        M(k, k) = cplx(w - w0, 0.5 * gamma(j));
        if (k + 1 < n) {
            M(k, k + 1) = -kappa;
            M(k + 1, k) = -kappa;
        }
    }
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
    e(half) = 1.0;
    const Eigen::VectorXcd x = M.partialPivLu().solve(e);
    return std::norm(1.0 - cplx(0.0, gbar) * x(half));
}

} // namespace oracle

#endif // OAM_TESTS_ORACLES_HPP
