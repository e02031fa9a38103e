#include "urnflow/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "urnflow/error.hpp"

namespace urnflow {

namespace {

double off_norm(const Matrix& s) {
    double sum = 0;
    for (Eigen::Index i = 0; i < s.rows(); ++i)
        for (Eigen::Index j = 0; j < s.cols(); ++j)
            if (i != j) sum += s(i, j) * s(i, j);
    return std::sqrt(sum);
}

}  // namespace

std::vector<double> jacobi_eigenvalues(Matrix s, double offdiag_tol, int max_sweeps) {
    if (s.rows() != s.cols()) throw Error(Errc::domain, "matrix is not square");
    const Eigen::Index n = s.rows();
    const double scale = std::max(1.0, s.norm());

    int sweep = 0;
    while (off_norm(s) > offdiag_tol * scale) {
        if (++sweep > max_sweeps) throw Error(Errc::no_convergence, "Jacobi sweeps exhausted");
        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = s(p, q);
                if (apq == 0) continue;
                // Rotation angle that annihilates s(p, q).
                const double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double skp = s(k, p);
                    const double skq = s(k, q);
                    s(k, p) = c * skp - sn * skq;
                    s(k, q) = sn * skp + c * skq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double spk = s(p, k);
                    const double sqk = s(q, k);
                    s(p, k) = c * spk - sn * sqk;
                    s(q, k) = sn * spk + c * sqk;
                }
                s(p, q) = s(q, p) = 0.0;
            }
        }
    }
    std::vector<double> eig(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = s(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

}  // namespace urnflow
