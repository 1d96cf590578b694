#include "reservoir/spectra.hpp"

#include "reservoir/kernels.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace reservoir {

double SpectrumSnapshot::max_real() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& l : eigenvalues) m = std::max(m, l.real());
    return m;
}

double SpectrumSnapshot::radius_origin() const {
    double m = 0.0;
    for (const auto& l : eigenvalues) m = std::max(m, std::abs(l));
    return m;
}

Vector phi_prime(const Vector& x) {
    Vector out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double t = std::tanh(x[i]);
        out[i] = 1.0 - t * t;
    }
    return out;
}

Matrix unrolled_gain_matrix(const Matrix& w, const Vector& w_fb, const Vector& w_out, const Vector& x_current,
                            const Vector& x_unroll) {
    require_same_size(w_out.size(), w_fb.size(), "jacobian readout");
    require_same_size(x_current.size(), w.cols(), "jacobian current state");
    require_same_size(x_unroll.size(), w.cols(), "jacobian unroll state");
    const Vector v = w_out.cwiseProduct(phi_prime(x_unroll));
    Matrix out;
    kernels::scaled_plus_rank_one(w, phi_prime(x_current), w_fb, v, out);
    return out;
}

Matrix jacobian_unrolled(const Matrix& w, const Vector& w_fb, const Vector& w_out, const Vector& x_current,
                         const Vector& x_unroll) {
    Matrix j = unrolled_gain_matrix(w, w_fb, w_out, x_current, x_unroll);
    j.diagonal().array() -= 1.0;
    return j;
}

Matrix jacobian_closed(const Matrix& w, const Vector& w_fb, const Vector& w_out, const Vector& x) {
    // (W + w_fb w_out^T) diag(phi') expands to the unrolled form with x_unroll = x.
    return jacobian_unrolled(w, w_fb, w_out, x, x);
}

std::vector<Complex> eigenspectrum(const Matrix& m) {
    require_same_size(m.rows(), m.cols(), "eigenspectrum (square)");
    if (!m.allFinite()) throw EigenSolverError("eigenspectrum: matrix contains non-finite entries");
    const lapack_int n = static_cast<lapack_int>(m.rows());
    if (n == 0) return {};

    Matrix a = m;  // dgeev overwrites its input
    std::vector<double> wr(static_cast<std::size_t>(n)), wi(static_cast<std::size_t>(n));
    const lapack_int info = LAPACKE_dgeev(LAPACK_ROW_MAJOR, 'N', 'N', n, a.data(), n, wr.data(), wi.data(), nullptr,
                                          n, nullptr, n);
    if (info != 0) {
        throw EigenSolverError("eigenspectrum: dgeev failed (info " + std::to_string(info) + ") on " +
                               std::to_string(n) + "x" + std::to_string(n) + " matrix with Frobenius norm " +
                               std::to_string(m.norm()));
    }
    std::vector<Complex> out(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {wr[i], wi[i]};
    return out;
}

namespace {

SpectrumSnapshot shifted_snapshot(const Matrix& gain, std::size_t step) {
    SpectrumSnapshot s;
    s.step = step;
    s.eigenvalues = eigenspectrum(gain);
    double radius = 0.0;
    for (auto& l : s.eigenvalues) {
        l -= 1.0;
        radius = std::max(radius, std::abs(l + 1.0));
    }
    s.radius = radius;
    return s;
}

}  // namespace

SpectrumSnapshot snapshot(const WeightSet& weights, const Vector& x_current, const Vector& x_unroll,
                          std::size_t step) {
    return shifted_snapshot(unrolled_gain_matrix(weights.w, weights.w_fb, weights.w_out, x_current, x_unroll), step);
}

SpectrumSnapshot closed_loop_snapshot(const WeightSet& weights, const Vector& x, std::size_t step) {
    return shifted_snapshot(unrolled_gain_matrix(weights.w, weights.w_fb, weights.w_out, x, x), step);
}

double hausdorff_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) throw DimensionError("hausdorff distance: one point set is empty");
    auto directed = [](const std::vector<Complex>& from, const std::vector<Complex>& to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to) best = std::min(best, std::abs(p - q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

double spectra_distance(const SpectrumSnapshot& a, const SpectrumSnapshot& b) {
    require_same_size(static_cast<Eigen::Index>(a.eigenvalues.size()), static_cast<Eigen::Index>(b.eigenvalues.size()),
                      "spectra distance");
    return hausdorff_distance(a.eigenvalues, b.eigenvalues);
}

}  // namespace reservoir
