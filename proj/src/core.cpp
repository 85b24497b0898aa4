#include "torpair/core.hpp"

#include <algorithm>
#include <cmath>

namespace torpair {

double operator_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() <= 32 && m.cols() <= 32) {
        Eigen::JacobiSVD<Matrix> svd(m);
        return svd.singularValues()(0);
    }
    Eigen::BDCSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

std::vector<double> singular_values(const Matrix& m) {
    Eigen::BDCSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    return std::vector<double>(s.data(), s.data() + s.size());
}

EighResult eigh(const Matrix& m) {
    const double scale = std::max(1e-300, m.cwiseAbs().maxCoeff());
    const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (dev > kSymTol * scale)
        throw NotSelfAdjoint("eigh: ||M - M*|| = " + std::to_string(dev) +
                             " exceeds " + std::to_string(kSymTol) + " * ||M||");

    Eigen::SelfAdjointEigenSolver<Matrix> es((m + m.adjoint()) / 2.0);
    EighResult r;
    const auto& ev = es.eigenvalues();
    r.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    r.eigenvectors = es.eigenvectors();

    // Phase fixing: rotate each column so its first component of significant
    // modulus is real positive.
    for (Eigen::Index j = 0; j < r.eigenvectors.cols(); ++j) {
        auto col = r.eigenvectors.col(j);
        const double top = col.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < col.size(); ++i) {
            if (std::abs(col(i)) > 1e-8 * top) {
                col *= std::conj(col(i)) / std::abs(col(i));
                break;
            }
        }
    }
    return r;
}

int kernel_dimension(const Matrix& m, double tol) {
    if (tol <= 0) throw Error("kernel_dimension: tol must be positive");
    const auto s = singular_values(m);
    int below = 0;
    double smallest_retained = -1.0;
    for (double v : s) {
        if (v < tol)
            ++below;
        else
            smallest_retained = (smallest_retained < 0) ? v : std::min(smallest_retained, v);
    }
    if (smallest_retained >= 0 && smallest_retained <= 10.0 * tol)
        throw GapTooSmall("kernel_dimension: smallest retained singular value " +
                          std::to_string(smallest_retained) + " within 10x of tol " +
                          std::to_string(tol));
    const int dim = static_cast<int>(std::min(m.rows(), m.cols()));
    // Singular values are only computed down to min(rows, cols); a wide/tall
    // kernel question is the caller's bookkeeping.
    (void)dim;
    return below;
}

int certified_rank(const Matrix& m, double tol) {
    const int k = kernel_dimension(m, tol);
    return static_cast<int>(std::min(m.rows(), m.cols())) - k;
}

}  // namespace torpair
