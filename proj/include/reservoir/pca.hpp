#pragma once

#include "reservoir/types.hpp"

namespace reservoir {

/// Firing rates over time, one row per recorded step.
struct RateHistory {
    Matrix rows;
    std::vector<std::size_t> step_offsets;

    Eigen::Index length() const { return rows.rows(); }
    Eigen::Index neurons() const { return rows.cols(); }
};

struct PcDecomposition {
    /// Descending.
    Vector eigenvalues;
    /// Column a-1 is principal component a.
    Eigen::MatrixXd components;
    Vector fractions;
};

/// Equal-time cross-correlation D_ij = <(r_i - <r_i>)(r_j - <r_j>)>, averaged over T.
Matrix correlation_matrix(const RateHistory& history);

/// Symmetric eigendecomposition of D, sorted by decreasing eigenvalue.
PcDecomposition pc_decomposition(const Matrix& d);

/// Centered history projected on component `a` (1-based).
Vector project_trajectory(const RateHistory& history, const PcDecomposition& decomposition, std::size_t a);

/// Sign changes of the mean-centered series divided by (T - 1).
double fluctuation_score(const Vector& trajectory);

}  // namespace reservoir
