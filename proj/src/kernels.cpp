#include "reservoir/kernels.hpp"

#include <cmath>

#ifdef RESERVOIR_HAVE_OPENMP
#include <omp.h>
#endif

namespace reservoir::kernels {

namespace {

// Fixed four-way split of the reduction. Both kernel flavours go through this
// helper, so their sums associate identically.
inline double dot(const double* a, const double* b, Eigen::Index n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    Eigen::Index i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

inline void check_matvec(const Matrix& m, const Vector& v, Vector& out) {
    require_same_size(m.cols(), v.size(), "matvec");
    if (out.size() != m.rows()) out.resize(m.rows());
}

inline void check_euler(const Vector& x, const Vector& rates, const Matrix& w, const Vector& w_fb, Vector& x_next) {
    require_same_size(x.size(), rates.size(), "euler_step rates");
    require_same_size(w.rows(), x.size(), "euler_step recurrent rows");
    require_same_size(w.cols(), x.size(), "euler_step recurrent cols");
    require_same_size(w_fb.size(), x.size(), "euler_step feedback");
    if (x_next.size() != x.size()) x_next.resize(x.size());
}

inline double euler_row(const Vector& x, const Vector& rates, const Matrix& w, const Vector& w_fb, double z_fb,
                        double dt, Eigen::Index i) {
    const double drive = dot(w.data() + i * w.cols(), rates.data(), w.cols());
    return x[i] + dt * (-x[i] + drive + w_fb[i] * z_fb);
}

inline void check_scaled(const Matrix& w, const Vector& col_scale, const Vector& u, const Vector& v, Matrix& out) {
    require_same_size(w.rows(), w.cols(), "jacobian assembly (square)");
    require_same_size(col_scale.size(), w.cols(), "jacobian assembly column scale");
    require_same_size(u.size(), w.rows(), "jacobian assembly left vector");
    require_same_size(v.size(), w.cols(), "jacobian assembly right vector");
    if (out.rows() != w.rows() || out.cols() != w.cols()) out.resize(w.rows(), w.cols());
}

inline void scaled_row(const Matrix& w, const Vector& col_scale, const Vector& u, const Vector& v, Matrix& out,
                       Eigen::Index i) {
    const Eigen::Index n = w.cols();
    const double* src = w.data() + i * n;
    double* dst = out.data() + i * n;
    const double ui = u[i];
    for (Eigen::Index j = 0; j < n; ++j) dst[j] = src[j] * col_scale[j] + ui * v[j];
}

inline void downdate_row(Matrix& p, const Vector& k, double c, Eigen::Index i) {
    const Eigen::Index n = p.cols();
    double* row = p.data() + i * n;
    const double ki = k[i];
    // (ki * kj) is commutative in IEEE arithmetic, so row i and column i
    // receive identical increments and exact symmetry is preserved.
    for (Eigen::Index j = 0; j < n; ++j) row[j] -= c * (ki * k[j]);
}

// Centered transpose: N x T, row i holds the mean-free series of neuron i.
Matrix centered_transpose(const Matrix& history) {
    const Eigen::Index t_len = history.rows();
    const Eigen::Index n = history.cols();
    Matrix ct(n, t_len);
    for (Eigen::Index i = 0; i < n; ++i) {
        double mean = 0.0;
        for (Eigen::Index t = 0; t < t_len; ++t) mean += history(t, i);
        mean /= static_cast<double>(t_len);
        for (Eigen::Index t = 0; t < t_len; ++t) ct(i, t) = history(t, i) - mean;
    }
    return ct;
}

inline void covariance_row(const Matrix& ct, Matrix& out, Eigen::Index i) {
    const Eigen::Index n = ct.rows();
    const Eigen::Index t_len = ct.cols();
    const double inv_t = 1.0 / static_cast<double>(t_len);
    for (Eigen::Index j = i; j < n; ++j) {
        const double v = dot(ct.data() + i * t_len, ct.data() + j * t_len, t_len) * inv_t;
        out(i, j) = v;
        out(j, i) = v;
    }
}

}  // namespace

namespace serial {

void matvec(const Matrix& m, const Vector& v, Vector& out) {
    check_matvec(m, v, out);
    for (Eigen::Index i = 0; i < m.rows(); ++i) out[i] = dot(m.data() + i * m.cols(), v.data(), m.cols());
}

void euler_step(const Vector& x, const Vector& rates, const Matrix& w, const Vector& w_fb, double z_fb, double dt,
                Vector& x_next) {
    check_euler(x, rates, w, w_fb, x_next);
    for (Eigen::Index i = 0; i < x.size(); ++i) x_next[i] = euler_row(x, rates, w, w_fb, z_fb, dt, i);
}

void rank_one_downdate(Matrix& p, const Vector& k, double c) {
    require_same_size(p.rows(), k.size(), "rank-one downdate");
    require_same_size(p.cols(), k.size(), "rank-one downdate");
    for (Eigen::Index i = 0; i < p.rows(); ++i) downdate_row(p, k, c, i);
}

void scaled_plus_rank_one(const Matrix& w, const Vector& col_scale, const Vector& u, const Vector& v, Matrix& out) {
    check_scaled(w, col_scale, u, v, out);
    for (Eigen::Index i = 0; i < w.rows(); ++i) scaled_row(w, col_scale, u, v, out, i);
}

void centered_covariance(const Matrix& history, Matrix& out) {
    const Matrix ct = centered_transpose(history);
    out.resize(ct.rows(), ct.rows());
    for (Eigen::Index i = 0; i < ct.rows(); ++i) covariance_row(ct, out, i);
}

}  // namespace serial

namespace parallel {

void matvec(const Matrix& m, const Vector& v, Vector& out) {
    check_matvec(m, v, out);
    const Eigen::Index rows = m.rows();
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < rows; ++i) out[i] = dot(m.data() + i * m.cols(), v.data(), m.cols());
}

void euler_step(const Vector& x, const Vector& rates, const Matrix& w, const Vector& w_fb, double z_fb, double dt,
                Vector& x_next) {
    check_euler(x, rates, w, w_fb, x_next);
    const Eigen::Index n = x.size();
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) x_next[i] = euler_row(x, rates, w, w_fb, z_fb, dt, i);
}

void rank_one_downdate(Matrix& p, const Vector& k, double c) {
    require_same_size(p.rows(), k.size(), "rank-one downdate");
    require_same_size(p.cols(), k.size(), "rank-one downdate");
    const Eigen::Index rows = p.rows();
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < rows; ++i) downdate_row(p, k, c, i);
}

void scaled_plus_rank_one(const Matrix& w, const Vector& col_scale, const Vector& u, const Vector& v, Matrix& out) {
    check_scaled(w, col_scale, u, v, out);
    const Eigen::Index rows = w.rows();
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < rows; ++i) scaled_row(w, col_scale, u, v, out, i);
}

void centered_covariance(const Matrix& history, Matrix& out) {
    const Matrix ct = centered_transpose(history);
    const Eigen::Index n = ct.rows();
    out.resize(n, n);
    // Row i writes out(i, j>=i) and its mirror; triangles are disjoint per i.
#pragma omp parallel for schedule(dynamic, 8)
    for (Eigen::Index i = 0; i < n; ++i) covariance_row(ct, out, i);
}

}  // namespace parallel

int max_threads() {
#ifdef RESERVOIR_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace reservoir::kernels
