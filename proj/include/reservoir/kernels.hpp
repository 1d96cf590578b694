#pragma once

// Dense inner loops of the simulator.
//
// Every kernel exists twice: `serial` is the plain reference loop kept for
// testing, `parallel` splits the outer loop across OpenMP threads. Each
// output element is produced by exactly one thread with the same summation
// order as the serial loop, so the two agree bit for bit for any thread
// count. The unqualified functions in `kernels` dispatch to `parallel` when
// OpenMP is compiled in.

#include "reservoir/types.hpp"

namespace reservoir::kernels {

namespace serial {

/// out = m * v
void matvec(const Matrix& m, const Vector& v, Vector& out);

/// x_next = x + dt * (-x + w * tanh(x) + w_fb * z_fb). `rates` must hold tanh(x).
void euler_step(const Vector& x, const Vector& rates, const Matrix& w, const Vector& w_fb, double z_fb,
                double dt, Vector& x_next);

/// p -= c * k k^T, exploiting symmetry of the update.
void rank_one_downdate(Matrix& p, const Vector& k, double c);

/// out = w * diag(col_scale) + u * v^T
void scaled_plus_rank_one(const Matrix& w, const Vector& col_scale, const Vector& u, const Vector& v, Matrix& out);

/// Population covariance of the rows of `history` (T x N): out = Hc^T Hc / T.
void centered_covariance(const Matrix& history, Matrix& out);

}  // namespace serial

namespace parallel {

void matvec(const Matrix& m, const Vector& v, Vector& out);
void euler_step(const Vector& x, const Vector& rates, const Matrix& w, const Vector& w_fb, double z_fb,
                double dt, Vector& x_next);
void rank_one_downdate(Matrix& p, const Vector& k, double c);
void scaled_plus_rank_one(const Matrix& w, const Vector& col_scale, const Vector& u, const Vector& v, Matrix& out);
void centered_covariance(const Matrix& history, Matrix& out);

}  // namespace parallel

/// Number of threads the parallel kernels will use (1 without OpenMP).
int max_threads();

#ifdef RESERVOIR_HAVE_OPENMP
namespace active = parallel;
#else
namespace active = serial;
#endif

using active::centered_covariance;
using active::euler_step;
using active::matvec;
using active::rank_one_downdate;
using active::scaled_plus_rank_one;

}  // namespace reservoir::kernels
