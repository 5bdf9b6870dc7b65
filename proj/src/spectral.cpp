#include "drne/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace drne {

namespace {

constexpr double kOffDiagonalTolerance = 1e-12;
constexpr int kMaxSweeps = 100;
constexpr double kOrientationThreshold = 1e-12;

double off_diagonal_norm(const Matrix& a) {
    double sum = 0.0;
    for (Eigen::Index p = 0; p < a.rows(); ++p)
        for (Eigen::Index q = 0; q < a.cols(); ++q)
            if (p != q) sum += a(p, q) * a(p, q);
    return std::sqrt(sum);
}

// Applies the rotation J (J_pp = J_qq = c, J_pq = s, J_qp = -s): a <- J^T a J, v <- v J.
void rotate(Matrix& a, Matrix& v, Eigen::Index p, Eigen::Index q, double c, double s) {
    const Eigen::Index m = a.rows();
    for (Eigen::Index k = 0; k < m; ++k) {
        const double akp = a(k, p);
        const double akq = a(k, q);
        a(k, p) = c * akp - s * akq;
        a(k, q) = s * akp + c * akq;
    }
    for (Eigen::Index k = 0; k < m; ++k) {
        const double apk = a(p, k);
        const double aqk = a(q, k);
        a(p, k) = c * apk - s * aqk;
        a(q, k) = s * apk + c * aqk;
    }
    for (Eigen::Index k = 0; k < m; ++k) {
        const double vkp = v(k, p);
        const double vkq = v(k, q);
        v(k, p) = c * vkp - s * vkq;
        v(k, q) = s * vkp + c * vkq;
    }
}

} // namespace

SpectralDecomposition eigendecompose(const Matrix& Q) {
    if (Q.rows() != Q.cols())
        throw std::invalid_argument("eigendecompose: matrix is not square");
    const Eigen::Index m = Q.rows();
    if (m == 0) return {Matrix(0, 0), Vector(0)};

    const double max_abs = Q.cwiseAbs().maxCoeff();
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, max_abs))
        throw std::invalid_argument("eigendecompose: matrix is not symmetric");

    Matrix a = 0.5 * (Q + Q.transpose());
    Matrix v = Matrix::Identity(m, m);
    const double scale = a.norm();
    const double target = kOffDiagonalTolerance * scale;

    int sweep = 0;
    while (off_diagonal_norm(a) > target) {
        if (sweep++ >= kMaxSweeps)
            throw std::runtime_error("eigendecompose: Jacobi sweeps did not converge");
        for (Eigen::Index p = 0; p + 1 < m; ++p) {
            for (Eigen::Index q = p + 1; q < m; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                rotate(a, v, p, q, c, s);
                a(p, q) = 0.0;
                a(q, p) = 0.0;
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

    SpectralDecomposition out{Matrix(m, m), Vector(m)};
    for (Eigen::Index r = 0; r < m; ++r) {
        const Eigen::Index col = order[static_cast<std::size_t>(r)];
        out.d[r] = a(col, col);
        Vector vec = v.col(col);
        for (Eigen::Index k = 0; k < m; ++k) {
            if (std::abs(vec[k]) > kOrientationThreshold) {
                if (vec[k] < 0.0) vec = -vec;
                break;
            }
        }
        out.L.row(r) = vec.transpose();
    }
    return out;
}

} // namespace drne
