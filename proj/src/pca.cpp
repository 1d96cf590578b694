#include "reservoir/pca.hpp"

#include "reservoir/kernels.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace reservoir {

Matrix correlation_matrix(const RateHistory& history) {
    if (history.length() < 2) {
        throw InsufficientHistoryError("correlation matrix needs at least 2 time steps, got " +
                                       std::to_string(history.length()));
    }
    Matrix d;
    kernels::centered_covariance(history.rows, d);
    return d;
}

PcDecomposition pc_decomposition(const Matrix& d) {
    require_same_size(d.rows(), d.cols(), "pc decomposition (square)");
    if (!d.allFinite()) throw ParameterError("pc decomposition: matrix contains non-finite entries");
    const double asym = d.rows() == 0 ? 0.0 : (d - d.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-8) {
        throw ParameterError("pc decomposition: matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");
    }
    const lapack_int n = static_cast<lapack_int>(d.rows());
    PcDecomposition out;
    if (n == 0) return out;

    // Column-major copy; dsyevd returns eigenvectors in place, ascending.
    Eigen::MatrixXd a = d;
    Vector w(n);
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, w.data());
    if (info != 0) throw EigenSolverError("pc decomposition: dsyevd failed (info " + std::to_string(info) + ")");

    out.eigenvalues = w.reverse();
    out.components = a.rowwise().reverse();

    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) total += std::max(0.0, out.eigenvalues[i]);
    out.fractions.resize(n);
    if (total > 0.0) {
        for (Eigen::Index i = 0; i < n; ++i) out.fractions[i] = std::max(0.0, out.eigenvalues[i]) / total;
    } else {
        // No variance at all: every direction contributes equally.
        out.fractions.setConstant(1.0 / static_cast<double>(n));
    }
    return out;
}

Vector project_trajectory(const RateHistory& history, const PcDecomposition& decomposition, std::size_t a) {
    require_same_size(history.neurons(), decomposition.components.rows(), "trajectory projection");
    if (a < 1 || a > static_cast<std::size_t>(decomposition.components.cols())) {
        throw std::out_of_range("principal component index " + std::to_string(a) + " outside [1, " +
                                std::to_string(decomposition.components.cols()) + "]");
    }
    const Eigen::RowVectorXd mean = history.rows.colwise().mean();
    const Vector q = decomposition.components.col(static_cast<Eigen::Index>(a - 1));
    return (history.rows.rowwise() - mean) * q;
}

double fluctuation_score(const Vector& trajectory) {
    const Eigen::Index t_len = trajectory.size();
    if (t_len < 3) throw InsufficientHistoryError("fluctuation score needs at least 3 samples");
    const Vector centered = trajectory.array() - trajectory.mean();
    int previous = 0;
    std::size_t changes = 0;
    for (Eigen::Index t = 0; t < t_len; ++t) {
        const int sign = centered[t] > 0.0 ? 1 : (centered[t] < 0.0 ? -1 : 0);
        if (sign == 0) continue;
        if (previous != 0 && sign != previous) ++changes;
        previous = sign;
    }
    return static_cast<double>(changes) / static_cast<double>(t_len - 1);
}

}  // namespace reservoir
