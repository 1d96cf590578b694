#pragma once

// Linearized dynamics and their eigenvalue spectra.
//
// Closed loop:  J = -I + (W + w_fb w_out^T) diag(phi'(x))
// Unrolled:     J = -I + W diag(phi'(x)) + w_fb w_out^T diag(phi'(x_unroll))
//
// The shift by -I only translates the spectrum, so eigenvalues are computed
// on the unshifted matrix and moved afterwards; the radius is the largest
// modulus before the shift (the circle about -1).

#include "reservoir/dynamics.hpp"
#include "reservoir/types.hpp"

namespace reservoir {

struct SpectrumSnapshot {
    std::size_t step = 0;
    /// Eigenvalues of the Jacobian (after the -1 shift).
    std::vector<Complex> eigenvalues;
    /// max |lambda + 1|
    double radius = 0.0;

    /// max Re(lambda), exported alongside the centred radius.
    double max_real() const;
    /// max |lambda|, the radius measured about the origin.
    double radius_origin() const;
};

/// 1 - tanh(x)^2, elementwise.
Vector phi_prime(const Vector& x);

/// W diag(phi'(x_current)) + w_fb (w_out o phi'(x_unroll))^T, i.e. the
/// unrolled Jacobian without the -I.
Matrix unrolled_gain_matrix(const Matrix& w, const Vector& w_fb, const Vector& w_out, const Vector& x_current,
                            const Vector& x_unroll);

Matrix jacobian_unrolled(const Matrix& w, const Vector& w_fb, const Vector& w_out, const Vector& x_current,
                         const Vector& x_unroll);

Matrix jacobian_closed(const Matrix& w, const Vector& w_fb, const Vector& w_out, const Vector& x);

/// All eigenvalues of a dense real matrix (LAPACK dgeev). Throws
/// EigenSolverError on non-finite input or solver failure.
std::vector<Complex> eigenspectrum(const Matrix& m);

/// Spectrum of the unrolled Jacobian at (x_current, x_unroll).
SpectrumSnapshot snapshot(const WeightSet& weights, const Vector& x_current, const Vector& x_unroll, std::size_t step);

/// Spectrum of the closed-loop Jacobian at x.
SpectrumSnapshot closed_loop_snapshot(const WeightSet& weights, const Vector& x, std::size_t step);

/// Symmetric Hausdorff distance between the eigenvalue sets.
double spectra_distance(const SpectrumSnapshot& a, const SpectrumSnapshot& b);
double hausdorff_distance(const std::vector<Complex>& a, const std::vector<Complex>& b);

}  // namespace reservoir
