#ifndef POTKERN_INTEGRAL_EQ_HPP
#define POTKERN_INTEGRAL_EQ_HPP

/**
 * @file integral_eq.hpp
 * @brief Nystrom discretisation of the Kerzman-Stein equation and Cauchy-integral
 *        evaluation of boundary data at interior points.
 */

#include <memory>

#include "geometry.hpp"

namespace potkern {

/**
 * @brief Kerzman-Stein kernel matrix [A(z_j, z_k)] on a grid together with the LU
 *        factorisation of the Nystrom system (I - A W), W = diag(weights).
 *
 * Immutable once built; solve() may be called concurrently.
 */
class KerzmanSteinOperator {
public:
    KerzmanSteinOperator(CMatrix kernel, const RVector& weights)
        : kernel_(std::move(kernel)) {
        CMatrix sys = -kernel_ * weights.cast<cplx>().asDiagonal();
        sys.diagonal().array() += 1.0;
        lu_ = Eigen::PartialPivLU<CMatrix>(sys);
    }

    /// Kernel values A(z_j, z_k), without quadrature weights.
    const CMatrix& kernel() const noexcept { return kernel_; }
    Eigen::Index size() const noexcept { return kernel_.rows(); }

    CVector solve(const CVector& rhs) const { return lu_.solve(rhs); }
    CMatrix solve(const CMatrix& rhs) const { return lu_.solve(rhs); }

    /// Reciprocal condition estimate of the Nystrom system in the 1-norm.
    double rcond() const { return lu_.rcond(); }

    /// max-norm residual of (I - A W) x - rhs.
    double residual(const CVector& x, const CVector& rhs, const RVector& weights) const {
        const CVector r = x - kernel_ * (weights.cast<cplx>().asDiagonal() * x) - rhs;
        return max_abs(r);
    }

private:
    CMatrix kernel_;
    Eigen::PartialPivLU<CMatrix> lu_;
};

/**
 * @brief Assembles A(z,w) = (1/2 pi i)(T(w)/(w-z) - conj(T(z))/(conj(w)-conj(z))).
 *
 * Diagonal entries hold the limit of A(z(t), z(t+h)) as h -> 0. In arc length both
 * quotients expand as 1/d + i kappa/2 + O(d), so the limit is exactly zero.
 */
inline KerzmanSteinOperator kerzman_stein_matrix(const BoundaryGrid& g) {
    const auto m = g.size();
    const auto& z = g.nodes();
    const auto& tan = g.tangents();
    const double coincide = 1e-14 * std::max(g.diameter(), 1.0);
    CMatrix a(m, m);
    const cplx scale = 1.0 / (two_pi * I);
    for (Eigen::Index k = 0; k < m; ++k) {
        for (Eigen::Index j = 0; j < m; ++j) {
            if (j == k) {
                a(j, k) = 0.0;
                continue;
            }
            const cplx d = z[k] - z[j];
            if (std::abs(d) <= coincide)
                throw GeometryError("coincident-nodes",
                                    "grid nodes " + std::to_string(j) + " and " + std::to_string(k) + " coincide",
                                    g.domain().input_index(g.curve_of(j)));
            a(j, k) = scale * (tan[k] / d - std::conj(tan[j]) / std::conj(d));
        }
    }
    return KerzmanSteinOperator(std::move(a), g.weights());
}

/// Samples of the Cauchy kernel C_a(z) = (1/2 pi i) conj(T(z)) / (conj(a) - conj(z)).
inline BoundaryFunction cauchy_rhs(const BoundaryGrid& g, cplx a) {
    if (!contains(g, a)) throw GeometryError("outside-domain", "base point is not inside the domain");
    BoundaryFunction c(g.size());
    for (Eigen::Index k = 0; k < g.size(); ++k)
        c[k] = std::conj(g.tangents()[k]) / (two_pi * I * (std::conj(a) - std::conj(g.nodes()[k])));
    return c;
}

/// Nystrom solution of the Kerzman-Stein equation: boundary values of S(., a).
inline BoundaryFunction solve_szego_boundary(const KerzmanSteinOperator& op, const BoundaryGrid& g, cplx a) {
    const BoundaryFunction rhs = cauchy_rhs(g, a);
    BoundaryFunction s = op.solve(rhs);
    if (!s.allFinite())
        throw NumericError("singular-system",
                           "Kerzman-Stein solve failed (rcond " + std::to_string(op.rcond()) + ")");
    return s;
}

/**
 * @brief A point at which boundary data can be evaluated: either a grid node
 *        (stored samples are returned) or an interior point (Cauchy integrals).
 *
 * Interior values use the barycentric form of the trapezoid Cauchy integral,
 *   h(z) = sum_k h_k q_k / sum_k q_k,   q_k = z'(t_k) / (zeta_k - z),
 * and derivatives use h'(z) = (1/2 pi i) sum_k (h_k - h(z)) z'(t_k) / (N (zeta_k - z)^2).
 * Accuracy degrades within about two node spacings of the boundary; such points are
 * flagged with near_boundary().
 */
class Probe {
public:
    /// Interior point; throws GeometryError "outside-domain" or "on-boundary".
    static Probe interior(const BoundaryGrid& g, cplx z) {
        if (!contains(g, z)) throw GeometryError("outside-domain", "point is outside the domain");
        Probe p;
        p.z_ = z;
        p.weights_.resize(g.size());
        double dmin = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < g.size(); ++k) {
            const cplx d = g.nodes()[k] - z;
            dmin = std::min(dmin, std::abs(d));
            p.weights_[k] = g.velocities()[k] / d;
        }
        p.denominator_ = p.weights_.sum();
        p.inv_dist_ = p.weights_.cwiseQuotient(g.nodes() - CVector::Constant(g.size(), z));
        p.scale_ = 1.0 / (two_pi * I * static_cast<double>(g.nodes_per_curve()));
        p.near_ = dmin < 2.0 * g.max_spacing();
        return p;
    }

    /// Grid node `k` on the boundary.
    static Probe node(const BoundaryGrid& g, Eigen::Index k) {
        Probe p;
        p.z_ = g.nodes()[k];
        p.node_ = k;
        return p;
    }

    /// Node probe if z coincides with a grid node, interior probe otherwise.
    static Probe at(const BoundaryGrid& g, cplx z) {
        const double tol = 1e-13 * std::max(g.diameter(), 1.0);
        for (Eigen::Index k = 0; k < g.size(); ++k)
            if (std::abs(g.nodes()[k] - z) <= tol) return node(g, k);
        return interior(g, z);
    }

    cplx point() const noexcept { return z_; }
    bool on_boundary() const noexcept { return node_ >= 0; }
    Eigen::Index node_index() const noexcept { return node_; }
    bool near_boundary() const noexcept { return near_; }

    cplx value(const CVector& bv) const {
        if (node_ >= 0) return bv[node_];
        return (bv.array() * weights_.array()).sum() / denominator_;
    }

    cplx derivative(const CVector& bv) const {
        if (node_ >= 0) throw GeometryError("on-boundary", "derivative requested at a boundary node");
        const cplx h = value(bv);
        return scale_ * ((bv.array() - h) * inv_dist_.array()).sum();
    }

    /// Interior value of a function with a simple pole of residue `residue` at `pole`,
    /// given its boundary values: the pole part is subtracted before the Cauchy integral.
    cplx value_with_pole(const CVector& bv, const BoundaryGrid& g, cplx pole, cplx residue) const {
        if (node_ >= 0) return bv[node_];
        CVector reg = bv;
        for (Eigen::Index k = 0; k < g.size(); ++k) reg[k] -= residue / (g.nodes()[k] - pole);
        return value(reg) + residue / (z_ - pole);
    }

private:
    Probe() = default;
    cplx z_{};
    Eigen::Index node_ = -1;
    bool near_ = false;
    CVector weights_, inv_dist_;
    cplx denominator_{}, scale_{};
};

struct CauchyValue {
    cplx value;
    /// Point within two node spacings of the boundary: value below nominal accuracy.
    bool near_boundary;
};

/// Value (order 0) or derivative (order 1) at interior z of the holomorphic function with boundary values bv.
inline CauchyValue cauchy_eval(const BoundaryFunction& bv, const BoundaryGrid& g, cplx z, int order = 0) {
    if (order != 0 && order != 1) throw InputError("bad-order", "Cauchy evaluation order must be 0 or 1");
    const Probe p = Probe::interior(g, z);
    return {order == 0 ? p.value(bv) : p.derivative(bv), p.near_boundary()};
}

} // namespace potkern

#endif // POTKERN_INTEGRAL_EQ_HPP
