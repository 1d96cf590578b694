// Full-scale acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails. Pass criterion names as arguments to
// run a subset.

#include "reservoir/experiment.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace reservoir;

namespace {

constexpr std::size_t kSeeds = 10;
const double kGains[] = {0.9, 1.2, 1.5};
// Reference initial and final radii for the fixed-point target.
const double kTableInitial[] = {0.779, 0.963, 1.176};
const double kTableFinal[] = {0.587, 0.708, 0.814};
constexpr double kRadiusBand = 0.2;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string fmt(double v, int precision = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

// Fixed-point runs per gain, shared by several criteria. The g = 0.9 runs come
// from the PCA driver, which trains the same configuration and then records
// the post-training window.
struct FixedPointRuns {
    std::vector<std::vector<ExperimentResult>> by_gain;
    std::vector<PcaResult> pca;
};

const FixedPointRuns& fixed_point_runs() {
    static FixedPointRuns runs = [] {
        FixedPointRuns r;
        r.by_gain.resize(3);
        for (std::size_t gi = 0; gi < 3; ++gi) {
            for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
                if (gi == 0) {
                    auto c = default_config(ExperimentKind::Pca);
                    c.reservoir.g = kGains[gi];
                    r.pca.push_back(run_pca(c, seed));
                    r.by_gain[gi].push_back(r.pca.back().training);
                } else {
                    auto c = default_config(ExperimentKind::FixedPoint);
                    c.reservoir.g = kGains[gi];
                    r.by_gain[gi].push_back(run_fixed_point(c, seed));
                }
            }
        }
        return r;
    }();
    return runs;
}

struct ForceRuns {
    ExperimentResult per_step;
    std::vector<SweepEntry> sweep;
};

const ForceRuns& force_runs() {
    static ForceRuns runs = [] {
        ForceRuns r;
        const auto c = default_config(ExperimentKind::TimeVarying);
        r.per_step = run_time_varying(c, 1);
        auto s = default_config(ExperimentKind::UnrollSweep);
        r.sweep = run_unroll_sweep(s, 1);
        return r;
    }();
    return runs;
}

Outcome spectral_shrinkage() {
    const auto& runs = fixed_point_runs();
    Outcome o{true, ""};
    std::vector<double> med_initial(3), med_final(3);
    for (std::size_t gi = 0; gi < 3; ++gi) {
        std::vector<double> init, fin;
        std::size_t shrunk = 0;
        for (const auto& r : runs.by_gain[gi]) {
            init.push_back(r.initial_spectrum().radius);
            fin.push_back(r.final_spectrum().radius);
            if (fin.back() < init.back()) ++shrunk;
        }
        med_initial[gi] = median(init);
        med_final[gi] = median(fin);
        const bool shrink_ok = shrunk >= 9;
        const bool band_ok = std::abs(med_initial[gi] - kTableInitial[gi]) <= kRadiusBand &&
                             std::abs(med_final[gi] - kTableFinal[gi]) <= kRadiusBand;
        o.pass = o.pass && shrink_ok && band_ok;
        o.detail += "g=" + fmt(kGains[gi], 2) + " shrunk " + std::to_string(shrunk) + "/10, median " +
                    fmt(med_initial[gi]) + "->" + fmt(med_final[gi]) + " (reference " + fmt(kTableInitial[gi]) +
                    "->" + fmt(kTableFinal[gi]) + "); ";
    }
    const bool ordered = med_initial[0] < med_initial[1] && med_initial[1] < med_initial[2];
    o.pass = o.pass && ordered;
    o.detail += std::string("initial medians ordered: ") + (ordered ? "yes" : "no");
    return o;
}

Outcome spectra_coincidence() {
    auto c = default_config(ExperimentKind::ClosedLoopValidation);
    double worst = 0.0;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto v = run_closed_loop_validation(c, seed);
        worst = std::max(worst, v.distance);
        detail += "seed " + std::to_string(seed) + ": " + fmt(v.distance) + " at step " +
                  std::to_string(v.unrolled.step) + "; ";
    }
    return {worst < 0.05, detail + "max distance " + fmt(worst) + " (< 0.05)"};
}

Outcome convergence_ordering() {
    const auto& runs = fixed_point_runs();
    std::vector<double> med(3);
    std::string detail;
    for (std::size_t gi = 0; gi < 3; ++gi) {
        std::vector<double> steps;
        for (const auto& r : runs.by_gain[gi]) {
            steps.push_back(static_cast<double>(r.converged_at ? *r.converged_at : r.training_steps));
        }
        med[gi] = median(steps);
        detail += "g=" + fmt(kGains[gi], 2) + " median " + fmt(med[gi]) + " steps; ";
    }
    return {med[0] < med[1] && med[1] < med[2], detail + "reference 100 / 150 / 250"};
}

Outcome force_sinusoid() {
    const auto& r = force_runs().per_step;
    const double amplitude = default_config(ExperimentKind::TimeVarying).target.amplitude;
    const auto& last = r.spectra.back();
    const auto& before = r.spectra[r.spectra.size() - 2];
    const double distance = spectra_distance(before, last);
    const bool rmse_ok = r.test_rmse < 0.1 * amplitude;
    const bool match_ok = distance < 0.02;
    return {rmse_ok && match_ok, "test RMSE " + fmt(r.test_rmse) + " (< " + fmt(0.1 * amplitude) +
                                     "), distance between spectra at steps " + std::to_string(before.step) + " and " +
                                     std::to_string(last.step) + " = " + fmt(distance) + " (< 0.02)"};
}

Outcome integrated_degradation() {
    const auto& runs = force_runs();
    Outcome o{true, ""};
    std::vector<std::pair<std::size_t, const ExperimentResult*>> all{{1, &runs.per_step}};
    for (const auto& e : runs.sweep) {
        if (!e.result || !e.error.empty()) {
            o.pass = false;
            o.detail += "k=" + std::to_string(e.interval) + " failed: " + e.error + "; ";
            continue;
        }
        all.emplace_back(e.interval, &*e.result);
    }
    bool train_ok = true;
    const ExperimentResult* k100 = nullptr;
    o.detail += "train/test RMSE by k:";
    for (const auto& [k, r] : all) {
        train_ok = train_ok && r->train_rmse < 0.1;
        if (k == 100) k100 = r;
        o.detail += " " + std::to_string(k) + ":" + fmt(r->train_rmse, 3) + "/" + fmt(r->test_rmse, 3);
    }
    o.detail += std::string(" (train < 0.1 for all: ") + (train_ok ? "yes" : "no") + ")";

    const double k1 = runs.per_step.test_rmse;
    const bool degrade_ok = k100 != nullptr && k100->test_rmse > 3.0 * k1;
    o.detail += std::string("; test k=100 > 3x k=1: ") + (degrade_ok ? "yes" : "no");

    // Radii at the first step and at step 5600 of the per-step run.
    const auto* init = runs.per_step.spectrum_at(1);
    const auto* fin = runs.per_step.spectrum_at(5600);
    bool radius_ok = false;
    if (init != nullptr && fin != nullptr) {
        radius_ok = fin->radius < init->radius && std::abs(init->radius - 1.266) <= kRadiusBand &&
                    std::abs(fin->radius - 1.036) <= kRadiusBand;
        o.detail += "; radius " + fmt(init->radius) + "->" + fmt(fin->radius) + " at step 5600 (reference 1.266->1.036)";
    } else {
        o.detail += "; radius snapshots missing";
    }
    o.pass = o.pass && train_ok && degrade_ok && radius_ok;
    return o;
}

Outcome pca_properties() {
    const auto& runs = fixed_point_runs();
    bool invariants = true;
    std::size_t ordered = 0;
    std::string detail;
    for (const auto& p : runs.pca) {
        const auto& d = p.decomposition;
        const auto n = d.components.cols();
        invariants = invariants && d.eigenvalues.minCoeff() >= -1e-8 && std::abs(d.fractions.sum() - 1.0) <= 1e-8 &&
                     d.fractions.minCoeff() >= 0.0 &&
                     (d.components.transpose() * d.components - Eigen::MatrixXd::Identity(n, n))
                             .cwiseAbs()
                             .maxCoeff() <= 1e-8;
        double slow = 0.0, fast = 0.0;
        std::size_t n_slow = 0, n_fast = 0;
        for (const auto& tr : p.trajectories) {
            if (tr.component <= 3) {
                slow += tr.fluctuation;
                ++n_slow;
            } else if (tr.component == 41 || tr.component == 42) {
                fast += tr.fluctuation;
                ++n_fast;
            }
        }
        slow /= static_cast<double>(std::max<std::size_t>(n_slow, 1));
        fast /= static_cast<double>(std::max<std::size_t>(n_fast, 1));
        if (n_slow == 3 && n_fast == 2 && fast > slow) ++ordered;
        detail += fmt(slow, 3) + "<" + fmt(fast, 3) + " ";
    }
    return {invariants && ordered >= 8, std::string("invariants ") + (invariants ? "hold" : "violated") +
                                            "; PCs 41,42 fluctuate more than 1-3 in " + std::to_string(ordered) +
                                            "/10 seeds (need 8): " + detail};
}

// Module-level oracle checks at desk scale.
Outcome oracle_suite() {
    std::vector<std::pair<std::string, std::function<bool()>>> checks;
    auto rng_matrix = [](Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> d(0.0, 1.0);
        Matrix m(r, c);
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(rng);
        return m;
    };

    checks.emplace_back("readout", [] {
        WeightSet ws;
        ws.w_out = Vector(2);
        ws.w_out << 1.0, -2.0;
        Vector r(2);
        r << 0.3, 0.1;
        return std::abs(readout(ws, r) - 0.1) <= 1e-15;
    });
    checks.emplace_back("euler step", [&] {
        WeightSet ws{Matrix::Constant(1, 1, 0.5), Vector::Ones(1), Vector::Zero(1), Vector::Zero(1)};
        if (step(ReservoirState::from_x(Vector::Zero(1)), ws, 1.0, 1.0).x[0] != 1.0) return false;
        const Matrix w = rng_matrix(2, 2, 1);
        WeightSet ws2{w, Vector::Zero(2), Vector::Zero(2), Vector::Zero(2)};
        const Vector x = rng_matrix(2, 1, 2);
        const Vector next = step(ReservoirState::from_x(x), ws2, 0.0, 0.1).x;
        for (int i = 0; i < 2; ++i) {
            const double ref =
                x[i] + 0.1 * (-x[i] + w(i, 0) * std::tanh(x[0]) + w(i, 1) * std::tanh(x[1]));
            if (std::abs(next[i] - ref) > 1e-12) return false;
        }
        return true;
    });
    checks.emplace_back("unrolled segment", [] {
        ReservoirParams p;
        p.n = 3;
        p.dt = 0.1;
        auto [ws, s] = init_network(p);
        const auto seg = run_unrolled_segment(s, ws, 0.3, 5, 0.1);
        auto manual = s;
        for (int i = 0; i < 5; ++i) manual = step(manual, ws, 0.3, 0.1);
        return seg.state.x == manual.x;
    });
    checks.emplace_back("fixed point residual", [] {
        ReservoirParams p;
        p.n = 2;
        p.g = 0.5;
        auto [ws, s] = init_network(p);
        const auto x = solve_fixed_point(ws, 1.5, {});
        double worst = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double rhs = ws.w(i, 0) * std::tanh(x[0]) + ws.w(i, 1) * std::tanh(x[1]) + ws.w_fb[i] * 1.5;
            worst = std::max(worst, std::abs(x[i] - rhs));
        }
        return worst <= 1e-12;
    });
    checks.emplace_back("least-squares update", [] {
        Vector r(2);
        r << 1.0, 1.0;
        const Vector w = lsq_fixed_point_update(Vector::Zero(2), r, 1.5);
        return w == 0.75 * r && w.dot(r) == 1.5;
    });
    checks.emplace_back("RLS 2x2 normal equations", [] {
        Eigen::Matrix2d rates;
        rates << 0.5, -0.2, 0.1, 0.7;
        const Eigen::Vector2d f(1.0, -0.5);
        auto t = force_init(2, 1.0);
        for (int pass = 0; pass < 50; ++pass) {
            for (int i = 0; i < 2; ++i) force_update(t, rates.row(i).transpose(), f[i]);
        }
        const Eigen::Matrix2d a = rates.transpose() * rates + Eigen::Matrix2d::Identity() / 50.0;
        const Eigen::Vector2d w = a.inverse() * (rates.transpose() * f);
        return (t.w_out - Vector(w)).cwiseAbs().maxCoeff() <= 1e-6;
    });
    checks.emplace_back("RLS vs batch, N <= 20, 50 passes", [&] {
        for (Eigen::Index n : {3, 10, 20}) {
            const Eigen::Index m = 2 * n;
            Eigen::MatrixXd rates = rng_matrix(m, n, 10 + n).array().tanh().matrix();
            const Vector f = rng_matrix(m, 1, 20 + n);
            auto t = force_init(static_cast<std::size_t>(n), 1.0);
            for (int pass = 0; pass < 50; ++pass) {
                for (Eigen::Index i = 0; i < m; ++i) force_update(t, rates.row(i).transpose(), f[i]);
            }
            const Eigen::MatrixXd a = rates.transpose() * rates + Eigen::MatrixXd::Identity(n, n) / 50.0;
            const Vector w = a.ldlt().solve(rates.transpose() * f);
            if ((t.w_out - w).cwiseAbs().maxCoeff() > 1e-6) return false;
        }
        return true;
    });
    checks.emplace_back("phi'(1)", [] {
        const double t = std::tanh(1.0);
        return std::abs(phi_prime(Vector::Ones(1))[0] - (1.0 - t * t)) <= 1e-15;
    });
    checks.emplace_back("scalar and diagonal Jacobians", [] {
        const Matrix j = jacobian_unrolled(Matrix::Constant(1, 1, 0.7), Vector::Constant(1, -0.4),
                                           Vector::Constant(1, 2.5), Vector::Zero(1), Vector::Zero(1));
        Matrix w = Matrix::Zero(2, 2);
        w(0, 0) = 0.3;
        w(1, 1) = -1.2;
        const Matrix jd = jacobian_closed(w, Vector::Ones(2), Vector::Zero(2), Vector::Zero(2));
        return std::abs(j(0, 0) - (-1.0 + 0.7 - 1.0)) <= 1e-15 && jd == -Matrix::Identity(2, 2) + w;
    });
    checks.emplace_back("eigen trace/determinant, N <= 8", [&] {
        for (Eigen::Index n = 1; n <= 8; ++n) {
            const Matrix m = rng_matrix(n, n, 100 + n);
            Complex sum = 0.0, prod = 1.0;
            for (Complex z : eigenspectrum(m)) {
                sum += z;
                prod *= z;
            }
            const double det = Eigen::MatrixXd(m).fullPivLu().determinant();
            if (std::abs(sum - m.trace()) > 1e-8 || std::abs(prod - det) > 1e-8 * std::max(1.0, std::abs(det))) {
                return false;
            }
        }
        return true;
    });
    checks.emplace_back("closed loop == unrolled at x_unroll = x", [&] {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const Eigen::Index n = 5 + 10 * static_cast<Eigen::Index>(seed);
            const Matrix w = rng_matrix(n, n, seed) * 0.2;
            const Vector fb = rng_matrix(n, 1, seed + 1), out = rng_matrix(n, 1, seed + 2);
            const Vector x = rng_matrix(n, 1, seed + 3);
            if (jacobian_closed(w, fb, out, x) != jacobian_unrolled(w, fb, out, x, x)) return false;
        }
        return true;
    });
    checks.emplace_back("radius from the unshifted matrix", [&] {
        const Eigen::Index n = 20;
        WeightSet ws{rng_matrix(n, n, 7) * 0.3, rng_matrix(n, 1, 8), rng_matrix(n, 1, 9) * 0.1, Vector::Zero(n)};
        const Vector xc = rng_matrix(n, 1, 10), xu = rng_matrix(n, 1, 11);
        const Eigen::MatrixXd m = Eigen::MatrixXd(ws.w * phi_prime(xc).asDiagonal()) +
                                  ws.w_fb * ws.w_out.cwiseProduct(phi_prime(xu)).transpose();
        Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
        return std::abs(snapshot(ws, xc, xu, 0).radius - es.eigenvalues().cwiseAbs().maxCoeff()) <= 1e-10;
    });
    checks.emplace_back("Hausdorff epsilon", [] {
        const double eps = 1e-3;
        return std::abs(hausdorff_distance({{0, 0}, {1, 0}}, {{0, 0}, {1, eps}}) - eps) <= 1e-15;
    });
    checks.emplace_back("alternating-rate variance", [] {
        RateHistory h;
        h.rows = Matrix(4, 1);
        h.rows << 0.5, -0.5, 0.5, -0.5;
        return correlation_matrix(h)(0, 0) == 0.25;
    });
    checks.emplace_back("PC reconstruction 5x5", [&] {
        const Matrix a = rng_matrix(5, 5, 3);
        const Matrix d = a + a.transpose();
        const auto pc = pc_decomposition(d);
        return (pc.components * pc.eigenvalues.asDiagonal() * pc.components.transpose() - Eigen::MatrixXd(d))
                   .cwiseAbs()
                   .maxCoeff() <= 1e-8;
    });
    checks.emplace_back("PC projection of a 2D history", [] {
        RateHistory h;
        h.rows = Matrix(4, 2);
        h.rows << 0.1, 0.2, 0.6, 0.2, -0.3, 0.2, 0.4, 0.2;
        const auto pc = pc_decomposition(correlation_matrix(h));
        const Vector p = project_trajectory(h, pc, 1);
        const Vector c = h.rows.col(0).array() - h.rows.col(0).mean();
        return std::min((p - c).cwiseAbs().maxCoeff(), (p + c).cwiseAbs().maxCoeff()) <= 1e-12;
    });
    checks.emplace_back("fluctuation score of a slow sinusoid", [] {
        Vector v(100);
        for (Eigen::Index t = 0; t < 100; ++t) v[t] = std::cos(2.0 * std::numbers::pi * t / 100.0 + 0.1);
        return std::abs(fluctuation_score(v) - 2.0 / 99.0) <= 1e-12;
    });
    checks.emplace_back("N=20 end-to-end", [] {
        auto c = default_config(ExperimentKind::FixedPoint);
        c.reservoir.n = 20;
        c.reservoir.g = 0.9;
        const auto r = run_fixed_point(c, 1);
        return r.converged_at && std::abs(readout(r.weights, r.final_state.r) - 1.5) <= 1e-10 &&
               r.spectra.size() >= 2;
    });
    checks.emplace_back("closed-loop threshold at N=50", [] {
        auto c = default_config(ExperimentKind::ClosedLoopValidation);
        c.reservoir.n = 50;
        return run_closed_loop_validation(c, 1).distance < 0.05;
    });

    std::size_t passed = 0;
    std::string failed;
    for (const auto& [name, fn] : checks) {
        bool ok = false;
        try {
            ok = fn();
        } catch (const std::exception& e) {
            failed += name + " (" + e.what() + "); ";
        }
        if (ok) ++passed;
        else if (failed.find(name) == std::string::npos) failed += name + "; ";
    }
    return {passed == checks.size(), std::to_string(passed) + "/" + std::to_string(checks.size()) +
                                         " oracle checks" + (failed.empty() ? "" : ", failed: " + failed)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"spectral-shrinkage", spectral_shrinkage},
        {"spectra-coincidence", spectra_coincidence},
        {"convergence-ordering", convergence_ordering},
        {"force-sinusoid", force_sinusoid},
        {"integrated-unrolling", integrated_degradation},
        {"pca-properties", pca_properties},
        {"oracle-suites", oracle_suite},
    };
    std::set<std::string> only(argv + 1, argv + argc);

    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        if (!only.empty() && only.count(name) == 0) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %s: %s [%.0fs]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
