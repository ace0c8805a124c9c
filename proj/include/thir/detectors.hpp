// detectors.hpp - symbol decisions from the matched statistic y = R A b + n.
//
// MF thresholds y directly; ZF solves R x = y; MMSE solves (R + s^2 A^-2) x = y;
// ML searches all 2^K hypotheses for the largest 2 b'Ay - b'ARAb.  Ties break
// deterministically: sign(0) = +1 and ML prefers the lexicographically
// smallest hypothesis (+1 before -1), so results are platform-independent.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "thir/spreading.hpp"

namespace thir {

enum class DetectorKind { MF, ZF, MMSE, ML };

inline const char* to_string(DetectorKind d) {
    switch (d) {
        case DetectorKind::MF: return "mf";
        case DetectorKind::ZF: return "zf";
        case DetectorKind::MMSE: return "mmse";
        case DetectorKind::ML: return "ml";
    }
    return "?";
}

// Per-user decided symbols, each +1 or -1.
struct Decision {
    std::vector<std::int8_t> symbols;
};

inline constexpr int kMaxMlUsers = 20;

inline std::int8_t sign_decision(double v) { return v < 0.0 ? -1 : 1; }

inline Eigen::MatrixXd to_dense(const CorrelationMatrix& r) {
    Eigen::MatrixXd m(r.users, r.users);
    for (int i = 0; i < r.users; ++i)
        for (int j = 0; j < r.users; ++j) m(i, j) = r.at(i, j);
    return m;
}

inline Decision detect_mf(const Eigen::VectorXd& y) {
    Decision d;
    d.symbols.resize(static_cast<std::size_t>(y.size()));
    for (Eigen::Index k = 0; k < y.size(); ++k) d.symbols[k] = sign_decision(y[k]);
    return d;
}

namespace detail {

// Solves R x = y, falling back to the SVD pseudo-inverse when R is singular
// to working precision.  Sets *used_pinv when the fallback was taken.
inline Eigen::VectorXd solve_symmetric(const Eigen::MatrixXd& r, const Eigen::VectorXd& y,
                                       bool* used_pinv) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(r);
    if (ldlt.info() == Eigen::Success) {
        const auto& d = ldlt.vectorD();
        double dmax = d.cwiseAbs().maxCoeff();
        double dmin = d.cwiseAbs().minCoeff();
        if (dmax > 0.0 && dmin > 1e-12 * dmax) return ldlt.solve(y);
    }
    if (used_pinv) *used_pinv = true;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    return svd.solve(y);
}

}  // namespace detail

// Decorrelator: sign(R^-1 y).
inline Decision detect_zf(const Eigen::VectorXd& y, const Eigen::MatrixXd& r,
                          const Eigen::VectorXd& amplitudes, bool* used_pinv = nullptr) {
    (void)amplitudes;  // amplitudes do not change decorrelator signs
    if (r.rows() != y.size() || r.cols() != y.size())
        throw std::invalid_argument("detect_zf: dimension mismatch");
    Eigen::VectorXd x = detail::solve_symmetric(r, y, used_pinv);
    Decision d;
    d.symbols.resize(static_cast<std::size_t>(y.size()));
    for (Eigen::Index k = 0; k < y.size(); ++k) d.symbols[k] = sign_decision(x[k]);
    return d;
}

// Linear MMSE: sign((R + sigma^2 A^-2)^-1 y); reduces to ZF at sigma = 0.
inline Decision detect_mmse(const Eigen::VectorXd& y, const Eigen::MatrixXd& r,
                            const Eigen::VectorXd& amplitudes, double sigma,
                            bool* used_pinv = nullptr) {
    if (r.rows() != y.size() || amplitudes.size() != y.size())
        throw std::invalid_argument("detect_mmse: dimension mismatch");
    if (sigma < 0.0) throw std::invalid_argument("detect_mmse: sigma must be nonnegative");
    for (Eigen::Index k = 0; k < amplitudes.size(); ++k)
        if (!(amplitudes[k] > 0.0))
            throw std::invalid_argument("detect_mmse: amplitudes must be positive");
    if (sigma == 0.0) return detect_zf(y, r, amplitudes, used_pinv);
    Eigen::MatrixXd m = r;
    const double s2 = sigma * sigma;
    for (Eigen::Index k = 0; k < y.size(); ++k)
        m(k, k) += s2 / (amplitudes[k] * amplitudes[k]);
    Eigen::VectorXd x = detail::solve_symmetric(m, y, used_pinv);
    Decision d;
    d.symbols.resize(static_cast<std::size_t>(y.size()));
    for (Eigen::Index k = 0; k < y.size(); ++k) d.symbols[k] = sign_decision(x[k]);
    return d;
}

inline double ml_metric(const Eigen::VectorXd& b, const Eigen::VectorXd& ay,
                        const Eigen::MatrixXd& arat) {
    return 2.0 * b.dot(ay) - b.dot(arat * b);
}

// Jointly optimal detector by exhaustive search.  User 0 occupies the most
// significant hypothesis bit with 1 = -1, so ascending index order is the
// lexicographic order with +1 < -1; keeping strict improvements makes the
// lexicographically smallest maximizer win.
inline Decision detect_ml(const Eigen::VectorXd& y, const Eigen::MatrixXd& r,
                          const Eigen::VectorXd& amplitudes) {
    const int k = static_cast<int>(y.size());
    if (r.rows() != k || amplitudes.size() != k)
        throw std::invalid_argument("detect_ml: dimension mismatch");
    if (k > kMaxMlUsers)
        throw std::invalid_argument("detect_ml: exhaustive ML infeasible for K > 20");
    Eigen::VectorXd ay = amplitudes.cwiseProduct(y);
    Eigen::MatrixXd arat = amplitudes.asDiagonal() * r * amplitudes.asDiagonal();

    Eigen::VectorXd b(k);
    double best = -std::numeric_limits<double>::infinity();
    std::uint32_t best_idx = 0;
    const std::uint32_t count = 1u << k;
    for (std::uint32_t idx = 0; idx < count; ++idx) {
        for (int i = 0; i < k; ++i) b[i] = (idx >> (k - 1 - i)) & 1u ? -1.0 : 1.0;
        double m = ml_metric(b, ay, arat);
        if (m > best) {
            best = m;
            best_idx = idx;
        }
    }
    Decision d;
    d.symbols.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) d.symbols[i] = (best_idx >> (k - 1 - i)) & 1u ? -1 : 1;
    return d;
}

}  // namespace thir
