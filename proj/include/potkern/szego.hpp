#ifndef POTKERN_SZEGO_HPP
#define POTKERN_SZEGO_HPP

/**
 * @file szego.hpp
 * @brief Szego kernel package of a domain: S(., a), its n-1 zeros, S(., a_i), the
 *        Garabedian kernels and the Ahlfors map, plus evaluation of S(z,w) and L(z,w)
 *        at arbitrary point pairs from those n+1 boundary functions.
 *
 * Everything downstream (Bergman, Lambda, Poisson, harmonic measures) is built from
 * the boundary values stored in SzegoData and a handful of small coefficient matrices.
 */

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "integral_eq.hpp"

namespace potkern {

struct SzegoOptions {
    /// |S(a_i, a)| must be below this times max|S(., a)| on the boundary.
    double zero_tol = 1e-8;
    /// Minimum pairwise zero separation, relative to the domain diameter.
    double separation_tol = 1e-6;
    /// Minimum |dS/dz(a_i, a)| for a zero to count as simple.
    double simple_tol = 1e-8;
    /// Base-point candidates tried when the base point is chosen automatically.
    int max_retries = 8;
    /// min|S| / max|S| on the boundary below this rejects the base point.
    double degenerate_tol = 1e-10;
    /// Newton polishing of the zeros stops at |S(a_i,a)| below this times max|S|.
    double polish_tol = 1e-12;
    /// Automatic base point: offset from the outer curve as a fraction of the local feature size.
    double base_offset = 0.15;
};

// ---------------------------------------------------------------------------
// Boundary identities

/// L(z,a) = i conj(S(z,a)) conj(T(z)) on the boundary.
inline BoundaryFunction garabedian_boundary(const BoundaryFunction& s, const BoundaryGrid& g) {
    return I * s.conjugate().cwiseProduct(g.tangents().conjugate());
}

/// f_a = S(., a) / L(., a) on the boundary.
inline BoundaryFunction ahlfors_boundary(const BoundaryFunction& s, const BoundaryFunction& l) {
    return s.cwiseQuotient(l);
}

/// (1/2 pi i) times the contour integral of d log(h): winding of the samples around 0.
inline cplx argument_principle(const BoundaryFunction& h, const BoundaryGrid& g) {
    const CVector dh = spectral_derivative(h, g);
    return dh.cwiseQuotient(h).sum() / (two_pi * I * static_cast<double>(g.nodes_per_curve()));
}

// ---------------------------------------------------------------------------
// Zeros of S(., a)

struct PowerSums {
    /// p[k-1] = sum_j a_j^k, k = 1..n-1.
    std::vector<cplx> p;
    /// e[k-1] = k-th elementary symmetric function of the zeros.
    std::vector<cplx> e;
    /// Argument-principle count of zeros (should be n-1).
    cplx zero_count;
};

/// Newton's identities: k e_k = sum_{i=1..k} (-1)^(i-1) e_(k-i) p_i, with e_0 = 1.
inline std::vector<cplx> elementary_from_power_sums(std::span<const cplx> p) {
    std::vector<cplx> e(p.size());
    for (std::size_t k = 1; k <= p.size(); ++k) {
        cplx acc = 0.0;
        double sign = 1.0;
        for (std::size_t i = 1; i <= k; ++i) {
            const cplx prev = (k == i) ? cplx(1.0) : e[k - i - 1];
            acc += sign * prev * p[i - 1];
            sign = -sign;
        }
        e[k - 1] = acc / static_cast<double>(k);
    }
    return e;
}

/// Power sums of the zeros of S(., a) by the residue theorem, then elementary symmetric functions.
inline PowerSums power_sums(const BoundaryFunction& s, const BoundaryGrid& g, int n, const SzegoOptions& opt = {}) {
    const double smax = max_abs(s);
    const double smin = s.cwiseAbs().minCoeff();
    if (!(smin > opt.degenerate_tol * smax))
        throw NumericError("base-point-degenerate",
                           "base point too degenerate: S(., a) nearly vanishes on the boundary");
    PowerSums out;
    if (n <= 1) {
        out.zero_count = argument_principle(s, g);
        return out;
    }
    const CVector dlog = spectral_derivative(s, g).cwiseQuotient(s);
    const cplx scale = 1.0 / (two_pi * I * static_cast<double>(g.nodes_per_curve()));
    out.zero_count = scale * dlog.sum();
    CVector zk = CVector::Ones(g.size());
    for (int k = 1; k < n; ++k) {
        zk = zk.cwiseProduct(g.nodes());
        out.p.push_back(scale * zk.cwiseProduct(dlog).sum());
    }
    out.e = elementary_from_power_sums(out.p);
    return out;
}

/**
 * @brief Roots of zeta^d - e_1 zeta^(d-1) + e_2 zeta^(d-2) - ... + (-1)^d e_d.
 *
 * Companion-matrix eigenvalues, each polished by a few Newton steps on the polynomial.
 */
inline std::vector<cplx> polynomial_roots(std::span<const cplx> e) {
    const auto d = static_cast<Eigen::Index>(e.size());
    if (d == 0) return {};
    // Monic coefficients, highest degree first: coeff[k] multiplies zeta^(d-k).
    std::vector<cplx> coeff(static_cast<std::size_t>(d) + 1);
    coeff[0] = 1.0;
    for (Eigen::Index k = 1; k <= d; ++k) coeff[static_cast<std::size_t>(k)] = (k % 2 ? -1.0 : 1.0) * e[static_cast<std::size_t>(k - 1)];
    CMatrix comp = CMatrix::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) comp(0, k) = -coeff[static_cast<std::size_t>(k) + 1];
    for (Eigen::Index k = 1; k < d; ++k) comp(k, k - 1) = 1.0;
    Eigen::ComplexEigenSolver<CMatrix> es(comp, false);
    std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + d);
    auto horner = [&](cplx z) {
        cplx p = coeff[0], dp = 0.0;
        for (std::size_t k = 1; k < coeff.size(); ++k) {
            dp = dp * z + p;
            p = p * z + coeff[k];
        }
        return std::pair{p, dp};
    };
    for (auto& r : roots) {
        for (int it = 0; it < 5; ++it) {
            const auto [p, dp] = horner(r);
            if (dp == cplx(0.0)) break;
            const cplx next = r - p / dp;
            if (std::abs(horner(next).first) >= std::abs(p)) break;
            r = next;
        }
    }
    return roots;
}

// ---------------------------------------------------------------------------

/// Diagnostics recorded while building SzegoData.
struct SzegoQuality {
    /// max |C [S(a_j,a_k)] - I|.
    double inverse_residual = 0.0;
    /// max ||f_a| - 1| over the boundary nodes.
    double unimodular_deviation = 0.0;
    /// max |S(a_i,a)| / max|S(., a)| on the boundary.
    double zero_residual = 0.0;
    /// Smallest pairwise distance between zeros (infinity for n <= 2).
    double zero_separation = std::numeric_limits<double>::infinity();
    /// Smallest |dS/dz(a_i, a)|.
    double zero_derivative = std::numeric_limits<double>::infinity();
    /// |Im S(a,a)| / S(a,a).
    double s_aa_imag = 0.0;
    /// Argument-principle zero count of S(., a) over the boundary.
    cplx zero_count = 0.0;
    /// Reciprocal condition estimate of the Nystrom system (0 when loaded from an artifact).
    double ks_rcond = 0.0;
};

/**
 * @brief The assembled Szego package for one base point a.
 *
 * Holds boundary values of S(., a), S(., a_i), L(., a), L(., a_i), the Ahlfors map
 * f_a = S(., a)/L(., a), and f_a L(., a_i) (holomorphic: the zero of f_a at a_i cancels
 * the pole). c0 = 1/S(a,a) and C = [S(a_j, a_k)]^{-1}.
 */
class SzegoData {
public:
    /// Derives everything from the boundary values of S(., a) and S(., a_i).
    static std::shared_ptr<const SzegoData> from_boundary(std::shared_ptr<const BoundaryGrid> grid, cplx a,
                                                          std::vector<cplx> zeros, BoundaryFunction s_base,
                                                          std::vector<BoundaryFunction> s_zeros,
                                                          const SzegoOptions& opt = {}, double ks_rcond = 0.0) {
        auto d = std::shared_ptr<SzegoData>(new SzegoData());
        const BoundaryGrid& g = *grid;
        const auto m = static_cast<Eigen::Index>(zeros.size());
        if (static_cast<int>(zeros.size()) != g.curve_count() - 1 || s_zeros.size() != zeros.size())
            throw InputError("bad-szego-data", "expected n-1 zeros with boundary values");
        d->grid_ = std::move(grid);
        d->a_ = a;
        d->zeros_ = std::move(zeros);
        d->s_base_ = std::move(s_base);
        d->s_zeros_ = std::move(s_zeros);
        d->opt_ = opt;

        d->l_base_ = garabedian_boundary(d->s_base_, g);
        d->f_ = ahlfors_boundary(d->s_base_, d->l_base_);
        for (const auto& s : d->s_zeros_) {
            d->l_zeros_.push_back(garabedian_boundary(s, g));
            d->fl_zeros_.push_back(d->f_.cwiseProduct(d->l_zeros_.back()));
        }

        const Probe pa = Probe::interior(g, a);
        const cplx saa = pa.value(d->s_base_);
        if (!(saa.real() > 0.0)) throw NumericError("szego-not-positive", "S(a,a) is not positive");
        d->s_aa_ = saa.real();
        d->c0_ = 1.0 / d->s_aa_;

        d->gram_ = CMatrix(m, m);
        for (Eigen::Index j = 0; j < m; ++j) {
            const Probe pj = Probe::interior(g, d->zeros_[static_cast<std::size_t>(j)]);
            for (Eigen::Index k = 0; k < m; ++k) d->gram_(j, k) = pj.value(d->s_zeros_[static_cast<std::size_t>(k)]);
        }
        if (m > 0) {
            Eigen::FullPivLU<CMatrix> lu(d->gram_);
            if (!lu.isInvertible())
                throw NumericError("singular-gram", "matrix [S(a_j,a_k)] is singular; re-choose a");
            d->c_ = lu.inverse();
        } else {
            d->c_ = CMatrix(0, 0);
        }

        auto& q = d->quality_;
        q.ks_rcond = ks_rcond;
        q.inverse_residual = m ? max_abs(CMatrix(d->c_ * d->gram_ - CMatrix::Identity(m, m))) : 0.0;
        q.unimodular_deviation = (d->f_.cwiseAbs().array() - 1.0).abs().maxCoeff();
        q.s_aa_imag = std::abs(saa.imag()) / saa.real();
        q.zero_count = argument_principle(d->s_base_, g);
        const double smax = max_abs(d->s_base_);
        q.zero_residual = 0.0;
        for (std::size_t i = 0; i < d->zeros_.size(); ++i) {
            const Probe pz = Probe::interior(g, d->zeros_[i]);
            q.zero_residual = std::max(q.zero_residual, std::abs(pz.value(d->s_base_)) / smax);
            q.zero_derivative = std::min(q.zero_derivative, std::abs(pz.derivative(d->s_base_)));
            for (std::size_t k = i + 1; k < d->zeros_.size(); ++k)
                q.zero_separation = std::min(q.zero_separation, std::abs(d->zeros_[i] - d->zeros_[k]));
        }
        return d;
    }

    const BoundaryGrid& grid() const noexcept { return *grid_; }
    const std::shared_ptr<const BoundaryGrid>& grid_ptr() const noexcept { return grid_; }
    int connectivity() const noexcept { return grid_->curve_count(); }
    const SzegoOptions& options() const noexcept { return opt_; }

    cplx base_point() const noexcept { return a_; }
    const std::vector<cplx>& zeros() const noexcept { return zeros_; }

    const BoundaryFunction& s_base() const noexcept { return s_base_; }
    const std::vector<BoundaryFunction>& s_zeros() const noexcept { return s_zeros_; }
    const BoundaryFunction& l_base() const noexcept { return l_base_; }
    const std::vector<BoundaryFunction>& l_zeros() const noexcept { return l_zeros_; }
    const BoundaryFunction& ahlfors() const noexcept { return f_; }
    /// f_a L(., a_j) on the boundary.
    const std::vector<BoundaryFunction>& ahlfors_garabedian() const noexcept { return fl_zeros_; }

    double s_aa() const noexcept { return s_aa_; }
    double c0() const noexcept { return c0_; }
    /// [S(a_j, a_k)].
    const CMatrix& gram() const noexcept { return gram_; }
    /// [c_ij], the inverse of gram().
    const CMatrix& coefficients() const noexcept { return c_; }
    const SzegoQuality& quality() const noexcept { return quality_; }

private:
    SzegoData() = default;

    std::shared_ptr<const BoundaryGrid> grid_;
    SzegoOptions opt_;
    cplx a_{};
    std::vector<cplx> zeros_;
    BoundaryFunction s_base_, l_base_, f_;
    std::vector<BoundaryFunction> s_zeros_, l_zeros_, fl_zeros_;
    double s_aa_ = 0.0, c0_ = 0.0;
    CMatrix gram_, c_;
    SzegoQuality quality_;
};

using SzegoPtr = std::shared_ptr<const SzegoData>;

// ---------------------------------------------------------------------------
// Assembly

/// Base-point candidates for automatic selection: points offset inward from the outer curve
/// by `base_offset` times the local feature size, at `count` equispaced parameters.
inline std::vector<cplx> base_point_candidates(const BoundaryGrid& g, int count, double frac) {
    const int outer = g.curve_count() - 1;
    const Curve& curve = g.domain().outer();
    const cplx centroid = enclosed_centroid(g, outer);
    std::vector<cplx> out;
    for (int j = 0; j < count; ++j) {
        const double t = static_cast<double>(j) / count;
        const auto p = curve.eval(t);
        double feature = std::numeric_limits<double>::infinity();
        if (outer == 0) {
            feature = std::abs(p.z - centroid);
        } else {
            for (Eigen::Index k = 0; k < g.offset(outer); ++k) feature = std::min(feature, std::abs(g.nodes()[k] - p.z));
        }
        out.push_back(p.z + frac * feature * I * p.dz / std::abs(p.dz));
    }
    return out;
}

namespace detail {

inline SzegoPtr assemble_at(const std::shared_ptr<const BoundaryGrid>& grid, const KerzmanSteinOperator& op, cplx a,
                            const SzegoOptions& opt) {
    const BoundaryGrid& g = *grid;
    const int n = g.curve_count();
    bool inside = false;
    try {
        inside = contains(g, a);
    } catch (const GeometryError&) {
        inside = false;
    }
    if (!inside) throw GeometryError("outside-domain", "base point is not inside the domain");

    BoundaryFunction s = solve_szego_boundary(op, g, a);
    std::vector<cplx> zeros;
    if (n > 1) {
        const PowerSums ps = power_sums(s, g, n, opt);
        if (std::abs(ps.zero_count - cplx(n - 1)) > 0.25)
            throw NumericError("zero-count", "argument principle does not count n-1 zeros of S(., a)");
        const double smax = max_abs(s);
        for (cplx r : polynomial_roots(ps.e)) {
            bool ok = false;
            try {
                ok = contains(g, r);
            } catch (const GeometryError&) {
            }
            if (!ok) throw NumericError("zero-localization-failed", "zero localization failed; re-choose a");
            for (int it = 0; it < 30; ++it) {
                const Probe p = Probe::interior(g, r);
                const cplx v = p.value(s);
                if (std::abs(v) <= opt.polish_tol * smax) break;
                const cplx dv = p.derivative(s);
                if (dv == cplx(0.0)) break;
                const cplx next = r - v / dv;
                bool next_ok = false;
                try {
                    next_ok = contains(g, next);
                } catch (const GeometryError&) {
                }
                if (!next_ok) throw NumericError("zero-localization-failed", "zero polishing left the domain");
                r = next;
            }
            zeros.push_back(r);
        }
        const double diam = g.diameter();
        for (std::size_t i = 0; i < zeros.size(); ++i) {
            const Probe p = Probe::interior(g, zeros[i]);
            if (std::abs(p.value(s)) > opt.zero_tol * smax)
                throw NumericError("zero-not-verified", "located zero does not annihilate S(., a)");
            if (std::abs(p.derivative(s)) <= opt.simple_tol)
                throw NumericError("zero-not-simple", "zero of S(., a) is not simple; re-choose a");
            for (std::size_t k = i + 1; k < zeros.size(); ++k)
                if (std::abs(zeros[i] - zeros[k]) <= opt.separation_tol * diam)
                    throw NumericError("zero-not-simple", "zeros of S(., a) are not distinct; re-choose a");
        }
    }
    std::vector<BoundaryFunction> s_zeros;
    if (!zeros.empty()) {
        CMatrix rhs(g.size(), static_cast<Eigen::Index>(zeros.size()));
        for (std::size_t i = 0; i < zeros.size(); ++i) rhs.col(static_cast<Eigen::Index>(i)) = cauchy_rhs(g, zeros[i]);
        const CMatrix sol = op.solve(rhs);
        for (Eigen::Index i = 0; i < sol.cols(); ++i) s_zeros.emplace_back(sol.col(i));
    }
    return SzegoData::from_boundary(grid, a, std::move(zeros), std::move(s), std::move(s_zeros), opt, op.rcond());
}

} // namespace detail

/**
 * @brief Builds the Szego package for a domain at resolution N.
 *
 * With an explicit base point a failure is reported directly. With a = nullopt, up to
 * options.max_retries automatic candidates are tried until the zeros of S(., a) are
 * located, distinct and simple.
 */
inline SzegoPtr assemble(const Domain& domain, int n, std::optional<cplx> a = std::nullopt,
                         const SzegoOptions& opt = {}) {
    auto grid = std::make_shared<const BoundaryGrid>(build_grid(domain, n));
    const KerzmanSteinOperator op = kerzman_stein_matrix(*grid);
    if (a) return detail::assemble_at(grid, op, *a, opt);
    std::string last = "no candidates";
    for (cplx cand : base_point_candidates(*grid, opt.max_retries, opt.base_offset)) {
        try {
            return detail::assemble_at(grid, op, cand, opt);
        } catch (const Error& e) {
            last = e.what();
        }
    }
    throw NumericError("base-point-failed", "automatic base point selection failed: " + last);
}

// ---------------------------------------------------------------------------
// Evaluation

/// Values of the basic functions at one point (grid node or interior).
struct SzegoPoint {
    Probe probe;
    cplx s_base;
    std::vector<cplx> s_zeros;
    cplx ahlfors;
    std::vector<cplx> ahlfors_garabedian;
};

inline SzegoPoint szego_point(const SzegoData& d, cplx z) {
    SzegoPoint p{Probe::at(d.grid(), z), {}, {}, {}, {}};
    p.s_base = p.probe.value(d.s_base());
    p.ahlfors = p.probe.value(d.ahlfors());
    for (const auto& s : d.s_zeros()) p.s_zeros.push_back(p.probe.value(s));
    for (const auto& fl : d.ahlfors_garabedian()) p.ahlfors_garabedian.push_back(p.probe.value(fl));
    return p;
}

/// S(z,w) from two evaluated points.
inline cplx szego_eval(const SzegoData& d, const SzegoPoint& z, const SzegoPoint& w) {
    const cplx denom = 1.0 - z.ahlfors * std::conj(w.ahlfors);
    if (std::abs(denom) < 1e-13)
        throw NumericError("near-diagonal", "S(z,w) requested too close to the boundary diagonal");
    cplx num = d.c0() * z.s_base * std::conj(w.s_base);
    const auto& c = d.coefficients();
    for (Eigen::Index i = 0; i < c.rows(); ++i)
        for (Eigen::Index j = 0; j < c.cols(); ++j)
            num += c(i, j) * z.s_zeros[static_cast<std::size_t>(i)] * std::conj(w.s_zeros[static_cast<std::size_t>(j)]);
    return num / denom;
}

inline cplx szego_eval(const SzegoData& d, cplx z, cplx w) {
    return szego_eval(d, szego_point(d, z), szego_point(d, w));
}

/// S(z, zeta_k) for every boundary node zeta_k.
inline CVector szego_row(const SzegoData& d, const SzegoPoint& z) {
    CVector num = d.c0() * z.s_base * d.s_base().conjugate();
    const auto& c = d.coefficients();
    for (Eigen::Index i = 0; i < c.rows(); ++i)
        for (Eigen::Index j = 0; j < c.cols(); ++j)
            num += c(i, j) * z.s_zeros[static_cast<std::size_t>(i)] * d.s_zeros()[static_cast<std::size_t>(j)].conjugate();
    const CVector denom = (CVector::Ones(num.size()) - z.ahlfors * d.ahlfors().conjugate());
    return num.cwiseQuotient(denom);
}

/**
 * @brief L(z,w) = [c0 S(z,a) S(w,a) + sum c_ij S(z,a_i) f(w) L(w,a_j)] / (f(z) - f(w)).
 *
 * This is the boundary identity for L(z,w) with f(w) L(w,a) = S(w,a) substituted, so
 * every factor is holomorphic on the closure and evaluated by Cauchy integrals.
 */
inline cplx garabedian_eval(const SzegoData& d, const SzegoPoint& z, const SzegoPoint& w) {
    if (std::abs(z.probe.point() - w.probe.point()) <= 1e-10)
        throw NumericError("pole", "L(z,w) has a pole at z = w");
    const cplx denom = z.ahlfors - w.ahlfors;
    if (std::abs(denom) < 1e-13) throw NumericError("ill-conditioned", "f(z) = f(w) to working precision");
    cplx num = d.c0() * z.s_base * w.s_base;
    const auto& c = d.coefficients();
    for (Eigen::Index i = 0; i < c.rows(); ++i)
        for (Eigen::Index j = 0; j < c.cols(); ++j)
            num += c(i, j) * z.s_zeros[static_cast<std::size_t>(i)] * w.ahlfors_garabedian[static_cast<std::size_t>(j)];
    return num / denom;
}

inline cplx garabedian_eval(const SzegoData& d, cplx z, cplx w) {
    return garabedian_eval(d, szego_point(d, z), szego_point(d, w));
}

/// L(z, pole) at a point from its boundary values (simple pole of residue 1/2pi at `pole`).
inline cplx garabedian_at(const SzegoData& d, const Probe& p, const BoundaryFunction& l, cplx pole) {
    return p.value_with_pole(l, d.grid(), pole, 1.0 / two_pi);
}

/// f_a(z) for z interior or at a grid node.
inline CauchyValue ahlfors_eval(const SzegoData& d, cplx z) {
    const Probe p = Probe::at(d.grid(), z);
    return {p.value(d.ahlfors()), p.near_boundary()};
}

/// f_a'(z) at an interior point.
inline CauchyValue ahlfors_derivative(const SzegoData& d, cplx z) {
    return cauchy_eval(d.ahlfors(), d.grid(), z, 1);
}

} // namespace potkern

#endif // POTKERN_SZEGO_HPP
