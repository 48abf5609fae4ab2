#ifndef POTKERN_BERGMAN_HPP
#define POTKERN_BERGMAN_HPP

/**
 * @file bergman.hpp
 * @brief Bergman kernel K(z,w) and the companion kernel Lambda(z,w) built from the
 *        Szego package. The correction coefficients come from a log-moment linear
 *        system, so no area integral is ever formed.
 *
 *   K(z,w) = 4 pi S(z,w)^2 + sum_ij lambda_ij L_i(z) conj(L_j(w)),   L_i = L(., a_i) S(., a)
 *
 * The Lambda kernel is written in the spanning family P_i = S(., a_i) L(., a) instead,
 * with coefficients mu obtained from lambda by the change of basis between the families:
 *
 *   Lambda(z,w) = 4 pi L(z,w)^2 + sum_ij mu_ij P_i(z) L_j(w).
 */

#include "szego.hpp"

namespace potkern {

/// One point per hole: the area centroid of each inner curve, verified to lie outside the domain.
inline std::vector<cplx> hole_points(const BoundaryGrid& g) {
    std::vector<cplx> out;
    for (int c = 0; c + 1 < g.curve_count(); ++c) {
        const cplx b = enclosed_centroid(g, c);
        bool inside = true;
        try {
            inside = contains(g, b);
        } catch (const GeometryError&) {
        }
        if (inside)
            throw InputError("hole-point-in-domain", "centroid of inner curve " +
                                                         std::to_string(g.domain().input_index(c)) +
                                                         " is not inside its hole; supply hole points explicitly");
        out.push_back(b);
    }
    return out;
}

inline std::vector<cplx> hole_points(const Domain& d) { return hole_points(sample_grid(d, 512)); }

namespace detail {

inline void check_hole_points(const BoundaryGrid& g, const std::vector<cplx>& holes) {
    if (static_cast<int>(holes.size()) != g.curve_count() - 1)
        throw InputError("bad-hole-points", "need exactly one hole point per inner curve");
    for (cplx b : holes) {
        if (contains(g, b))  // throws on-boundary when b is too close
            throw InputError("hole-point-in-domain", "hole point lies inside the domain");
    }
}

/// Boundary values of L_i = L(., a_i) S(., a).
inline std::vector<BoundaryFunction> script_l(const SzegoData& d) {
    std::vector<BoundaryFunction> out;
    for (const auto& l : d.l_zeros()) out.push_back(l.cwiseProduct(d.s_base()));
    return out;
}

} // namespace detail

/// A_ik = i * contour integral of ln|z - b_k| conj(L_i(z)) d(conj z).
inline CMatrix log_moment_matrix(const SzegoData& d, const std::vector<cplx>& holes) {
    const BoundaryGrid& g = d.grid();
    detail::check_hole_points(g, holes);
    const auto sl = detail::script_l(d);
    const auto m = static_cast<Eigen::Index>(sl.size());
    const CVector dzbar = g.velocities().conjugate() / static_cast<double>(g.nodes_per_curve());
    CMatrix a(m, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const CVector logk = (g.nodes().array() - holes[static_cast<std::size_t>(k)]).abs().log().cast<cplx>();
        for (Eigen::Index i = 0; i < m; ++i)
            a(i, k) = I * (logk.array() * sl[static_cast<std::size_t>(i)].conjugate().array() * dzbar.array()).sum();
    }
    return a;
}

struct LambdaSystem {
    /// [A_ik] and its reciprocal condition estimate.
    CMatrix log_moments;
    double log_moment_rcond = 0.0;
    /// d_m = L_m(a_m) = (1/2pi) dS/dz(a_m, a).
    std::vector<cplx> diagonal;
    /// Coefficients before hermitian symmetrisation.
    CMatrix raw;
    /// (raw + raw^H)/2.
    CMatrix lambda;
    /// max |raw - raw^H|.
    double hermitian_deviation = 0.0;
};

/**
 * @brief Solves for the correction coefficients of K.
 *
 * Pairing K_w - 4 pi S_w^2 with 1/(z - b_k) in the area inner product and moving every
 * integral to the boundary gives, at w = a_m,
 *
 *   g_mk = 1/(a_m - b_k) - 4 pi i * int ln|z-b_k| S(a_m,z)^2 d(conj z)
 *        = sum_ij conj(lambda_ij) A_ik L_j(a_m).
 *
 * Since L_j(a_m) = delta_jm d_m, each m is an independent (n-1)-dimensional system
 * A^T x = g_m / d_m with lambda_im = conj(x_i).
 */
inline LambdaSystem lambda_coefficients(const SzegoData& d, const std::vector<cplx>& holes) {
    const BoundaryGrid& g = d.grid();
    LambdaSystem out;
    out.log_moments = log_moment_matrix(d, holes);
    const auto m = out.log_moments.rows();
    out.raw = CMatrix(m, m);
    if (m == 0) {
        out.lambda = out.raw;
        return out;
    }
    Eigen::PartialPivLU<CMatrix> lu(out.log_moments.transpose());
    out.log_moment_rcond = lu.rcond();
    if (!(out.log_moment_rcond > 1e-14))
        throw NumericError("singular-log-moments",
                           "log-moment matrix is singular (rcond " + std::to_string(out.log_moment_rcond) + ")");
    const CVector dzbar = g.velocities().conjugate() / static_cast<double>(g.nodes_per_curve());
    for (Eigen::Index mm = 0; mm < m; ++mm) {
        const cplx am = d.zeros()[static_cast<std::size_t>(mm)];
        const Probe p = Probe::interior(g, am);
        const cplx dm = p.derivative(d.s_base()) / two_pi;
        out.diagonal.push_back(dm);
        // S(a_m, z) = conj(S(z, a_m)) on the boundary.
        const CVector sq = d.s_zeros()[static_cast<std::size_t>(mm)].conjugate().array().square();
        CVector rhs(m);
        for (Eigen::Index k = 0; k < m; ++k) {
            const cplx bk = holes[static_cast<std::size_t>(k)];
            const CVector logk = (g.nodes().array() - bk).abs().log().cast<cplx>();
            const cplx integral = (logk.array() * sq.array() * dzbar.array()).sum();
            rhs[k] = (1.0 / (am - bk) - 4.0 * pi * I * integral) / dm;
        }
        out.raw.col(mm) = lu.solve(rhs).conjugate();
    }
    out.hermitian_deviation = max_abs(CMatrix(out.raw - out.raw.adjoint()));
    out.lambda = 0.5 * (out.raw + out.raw.adjoint());
    return out;
}

/**
 * @brief Assembled Bergman data: hole points, log moments, lambda coefficients in the
 *        L_i = L(., a_i) S(., a) family, and the same kernel correction re-expressed in the
 *        P_i = S(., a_i) L(., a) family for the Lambda kernel.
 */
class BergmanData {
public:
    static std::shared_ptr<const BergmanData> build(SzegoPtr szego, std::optional<std::vector<cplx>> holes = {}) {
        auto b = std::shared_ptr<BergmanData>(new BergmanData());
        const BoundaryGrid& g = szego->grid();
        b->holes_ = holes ? *holes : hole_points(g);
        b->system_ = lambda_coefficients(*szego, b->holes_);
        b->script_l_ = detail::script_l(*szego);
        for (const auto& s : szego->s_zeros()) b->alt_basis_.push_back(s.cwiseProduct(szego->l_base()));

        // P_i = sum_k Q_ik L_k, fitted by least squares on the boundary samples.
        const auto m = static_cast<Eigen::Index>(b->script_l_.size());
        b->basis_change_ = CMatrix(m, m);
        if (m > 0) {
            CMatrix basis(g.size(), m);
            for (Eigen::Index k = 0; k < m; ++k) basis.col(k) = b->script_l_[static_cast<std::size_t>(k)];
            const auto qr = basis.colPivHouseholderQr();
            double fit = 0.0;
            for (Eigen::Index i = 0; i < m; ++i) {
                const CVector& target = b->alt_basis_[static_cast<std::size_t>(i)];
                const CVector coeff = qr.solve(target);
                b->basis_change_.row(i) = coeff.transpose();
                fit = std::max(fit, max_abs(CVector(basis * coeff - target)) / max_abs(target));
            }
            b->basis_fit_residual_ = fit;
            // lambda = Q^T mu conj(Q)  =>  mu = Q^{-T} lambda conj(Q)^{-1}.
            const CMatrix qt_inv = b->basis_change_.transpose().inverse();
            const CMatrix qc_inv = b->basis_change_.conjugate().inverse();
            const CMatrix mu = qt_inv * b->system_.lambda * qc_inv;
            b->alt_hermitian_deviation_ = max_abs(CMatrix(mu - mu.adjoint()));
            b->lambda_alt_ = 0.5 * (mu + mu.adjoint());
        } else {
            b->lambda_alt_ = CMatrix(0, 0);
        }
        b->szego_ = std::move(szego);
        return b;
    }

    const SzegoData& szego() const noexcept { return *szego_; }
    const SzegoPtr& szego_ptr() const noexcept { return szego_; }
    const std::vector<cplx>& holes() const noexcept { return holes_; }
    const CMatrix& log_moments() const noexcept { return system_.log_moments; }
    double log_moment_rcond() const noexcept { return system_.log_moment_rcond; }
    const std::vector<cplx>& diagonal() const noexcept { return system_.diagonal; }
    /// Hermitian coefficients in the L_i family.
    const CMatrix& lambda() const noexcept { return system_.lambda; }
    const CMatrix& lambda_raw() const noexcept { return system_.raw; }
    double hermitian_deviation() const noexcept { return system_.hermitian_deviation; }
    /// Coefficients in the P_i family.
    const CMatrix& lambda_alt() const noexcept { return lambda_alt_; }
    double alt_hermitian_deviation() const noexcept { return alt_hermitian_deviation_; }
    /// Q with P_i = sum_k Q_ik L_k.
    const CMatrix& basis_change() const noexcept { return basis_change_; }
    double basis_fit_residual() const noexcept { return basis_fit_residual_; }
    const std::vector<BoundaryFunction>& script_l() const noexcept { return script_l_; }
    const std::vector<BoundaryFunction>& alt_basis() const noexcept { return alt_basis_; }

private:
    BergmanData() = default;

    SzegoPtr szego_;
    std::vector<cplx> holes_;
    LambdaSystem system_;
    std::vector<BoundaryFunction> script_l_, alt_basis_;
    CMatrix basis_change_, lambda_alt_;
    double alt_hermitian_deviation_ = 0.0;
    double basis_fit_residual_ = 0.0;
};

using BergmanPtr = std::shared_ptr<const BergmanData>;

struct BergmanPoint {
    SzegoPoint szego;
    std::vector<cplx> script_l;
    std::vector<cplx> alt;
};

inline BergmanPoint bergman_point(const BergmanData& b, cplx z) {
    BergmanPoint p{szego_point(b.szego(), z), {}, {}};
    for (const auto& f : b.script_l()) p.script_l.push_back(p.szego.probe.value(f));
    for (const auto& f : b.alt_basis()) p.alt.push_back(p.szego.probe.value(f));
    return p;
}

namespace detail {

inline cplx bilinear(const CMatrix& c, const std::vector<cplx>& x, const std::vector<cplx>& y, bool conj_y) {
    cplx s = 0.0;
    for (Eigen::Index i = 0; i < c.rows(); ++i)
        for (Eigen::Index j = 0; j < c.cols(); ++j)
            s += c(i, j) * x[static_cast<std::size_t>(i)] *
                 (conj_y ? std::conj(y[static_cast<std::size_t>(j)]) : y[static_cast<std::size_t>(j)]);
    return s;
}

} // namespace detail

inline cplx bergman_eval(const BergmanData& b, const BergmanPoint& z, const BergmanPoint& w) {
    const cplx s = szego_eval(b.szego(), z.szego, w.szego);
    return 4.0 * pi * s * s + detail::bilinear(b.lambda(), z.script_l, w.script_l, true);
}

inline cplx bergman_eval(const BergmanData& b, cplx z, cplx w) {
    return bergman_eval(b, bergman_point(b, z), bergman_point(b, w));
}

/// K(z,w) through the P_i family; agrees with bergman_eval up to discretisation error.
inline cplx bergman_eval_alt(const BergmanData& b, const BergmanPoint& z, const BergmanPoint& w) {
    const cplx s = szego_eval(b.szego(), z.szego, w.szego);
    return 4.0 * pi * s * s + detail::bilinear(b.lambda_alt(), z.alt, w.alt, true);
}

/**
 * @brief Lambda(z,w) = 4 pi L(z,w)^2 + sum_ij mu_ij S(z,a_i) L(z,a) L(w,a_j) S(w,a),
 *        mu = lambda_alt(). The sign of the sum is the one for which the boundary identity
 *        Lambda(w,z) T(z) = -K(w,z) conj(T(z)) holds.
 */
inline cplx lambda_kernel_eval(const BergmanData& b, const BergmanPoint& z, const BergmanPoint& w) {
    const cplx l = garabedian_eval(b.szego(), z.szego, w.szego);
    return 4.0 * pi * l * l + detail::bilinear(b.lambda_alt(), z.alt, w.script_l, false);
}

inline cplx lambda_kernel_eval(const BergmanData& b, cplx z, cplx w) {
    return lambda_kernel_eval(b, bergman_point(b, z), bergman_point(b, w));
}

} // namespace potkern

#endif // POTKERN_BERGMAN_HPP
