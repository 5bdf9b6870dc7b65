#pragma once

#include "drne/types.hpp"

namespace drne {

/// Q = L^T diag(d) L with L orthogonal (rows are eigenvectors) and d sorted descending.
struct SpectralDecomposition {
    Matrix L;
    Vector d;

    double max_eigenvalue() const { return d.size() ? d[0] : 0.0; }
    double min_eigenvalue() const { return d.size() ? d[d.size() - 1] : 0.0; }
};

/**
 * Cyclic Jacobi eigendecomposition of a small symmetric matrix.
 *
 * Sweeps stop once the off-diagonal Frobenius norm falls below 1e-12 relative
 * to ||Q||_F (at most 100 sweeps). Eigenvalues are sorted descending with a
 * stable sort, so equal eigenvalues keep the order in which the sweep left
 * them. Each eigenvector is oriented so that its first component with
 * magnitude above 1e-12 is positive.
 *
 * Throws std::invalid_argument for non-square or non-symmetric input
 * (tolerance 1e-10 relative to max(1, ||Q||_max)) and std::runtime_error when
 * the sweep cap is hit.
 */
SpectralDecomposition eigendecompose(const Matrix& Q);

} // namespace drne
