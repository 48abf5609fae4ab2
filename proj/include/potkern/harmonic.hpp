#ifndef POTKERN_HARMONIC_HPP
#define POTKERN_HARMONIC_HPP

/**
 * @file harmonic.hpp
 * @brief Dirichlet problem through the Szego projection, harmonic measures and the
 *        Poisson kernel, all from boundary data and line integrals.
 *
 * Notation: inner curve j (0-based, domain order) carries harmonic measure omega_j,
 * L_k = L(., a_k) S(., a) and the period matrix A_jk = -i int_{gamma_j} L_k dz.
 */

#include "bergman.hpp"

namespace potkern {

/// Periods A_jk = -i * integral over inner curve j of L(z,a_k) S(z,a) dz.
inline CMatrix period_matrix(const SzegoData& d) {
    const BoundaryGrid& g = d.grid();
    const auto m = static_cast<Eigen::Index>(d.zeros().size());
    CMatrix a(m, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const CVector lk = d.l_zeros()[static_cast<std::size_t>(k)].cwiseProduct(d.s_base());
        for (Eigen::Index j = 0; j < m; ++j) a(j, k) = -I * g.contour_integral(lk, static_cast<int>(j));
    }
    return a;
}

/// Szego projection of boundary data evaluated at z: sum_k S(z, zeta_k) u_k w_k.
inline CauchyValue szego_projection_eval(const SzegoData& d, const CVector& u, cplx z) {
    const SzegoPoint p = szego_point(d, z);
    const CVector row = szego_row(d, p);
    return {(row.array() * u.array() * d.grid().weights().array()).sum(), p.probe.near_boundary()};
}

enum class OmegaMethod { primary, antiderivative };

namespace detail {

/// Everything the projection formulas need at one interior point.
struct ProjectionPoint {
    SzegoPoint szego;
    /// S(z, zeta_k) w_k.
    CVector weighted_row;
    cplx s_base;
    /// 1 / L(z, a); zero at z = a.
    cplx inv_l_base;
};

inline ProjectionPoint projection_point(const SzegoData& d, cplx z) {
    ProjectionPoint p{szego_point(d, z), {}, {}, {}};
    if (p.szego.probe.on_boundary()) throw GeometryError("on-boundary", "interior point required");
    p.weighted_row = szego_row(d, p.szego).cwiseProduct(d.grid().weights().cast<cplx>());
    p.s_base = p.szego.s_base;
    if (std::abs(z - d.base_point()) <= 1e-14 * std::max(1.0, d.grid().diameter()))
        p.inv_l_base = 0.0;
    else
        p.inv_l_base = 1.0 / garabedian_at(d, p.szego.probe, d.l_base(), d.base_point());
    return p;
}

/// h(z) + conj(H(z)) for boundary data psi, with h = P(S_a psi)/S_a and H = P(L_a conj(psi))/L_a.
inline cplx conjugate_pair(const SzegoData& d, const ProjectionPoint& p, const CVector& psi) {
    const cplx h = (p.weighted_row.array() * d.s_base().array() * psi.array()).sum() / p.s_base;
    const cplx big_h = (p.weighted_row.array() * d.l_base().array() * psi.conjugate().array()).sum() * p.inv_l_base;
    return h + std::conj(big_h);
}

} // namespace detail

/**
 * @brief Period matrix, its inverse, and the data behind the two harmonic-measure
 *        evaluators.
 *
 * Primary harmonic measures: for each hole point b_m the function ln|z - b_m| is harmonic
 * in the domain, so the extension formula applied to it gives
 *   ln|z - b_m| - h_m(z) - conj(H_m(z)) = sum_j c_j^(m) omega_j(z),
 * an (n-1)x(n-1) system for omega(z) at each point.
 *
 * Antiderivative harmonic measures: F_j' = sum_i sigma_i L_i is normalised so that its
 * potential equals delta_jk on inner curve k, using
 *   value on gamma_k = -(1/2 pi i) int ln|z - b_k| F'(z) dz = -sum_i sigma_i conj(A_ik) / 2pi.
 * Then F_j' = h_j' + sum_m alpha_jm/(z - b_m) with single-valued h_j, and
 * omega_j = Re h_j + sum_m alpha_jm ln|z - b_m| + const.
 */
class PoissonData {
public:
    static std::shared_ptr<const PoissonData> build(BergmanPtr bergman) {
        auto p = std::shared_ptr<PoissonData>(new PoissonData());
        const SzegoData& d = bergman->szego();
        const BoundaryGrid& g = d.grid();
        const auto m = static_cast<Eigen::Index>(d.zeros().size());

        p->periods_ = period_matrix(d);
        p->inverse_ = CMatrix(m, m);
        if (m > 0) {
            Eigen::PartialPivLU<CMatrix> lu(p->periods_);
            p->period_rcond_ = lu.rcond();
            if (!(p->period_rcond_ > 1e-14))
                throw NumericError("singular-periods", "period matrix is singular");
            p->inverse_ = lu.inverse();
            p->inverse_residual_ = max_abs(CMatrix(p->inverse_ * p->periods_ - CMatrix::Identity(m, m)));
            p->period_imag_ = p->periods_.imag().cwiseAbs().maxCoeff() / p->periods_.cwiseAbs().maxCoeff();
        }
        // Rows S(a_k, zeta) w for P(u)(a_k).
        p->zero_rows_ = CMatrix(m, g.size());
        for (Eigen::Index k = 0; k < m; ++k) {
            const SzegoPoint ak = szego_point(d, d.zeros()[static_cast<std::size_t>(k)]);
            p->zero_rows_.row(k) = szego_row(d, ak).cwiseProduct(g.weights().cast<cplx>()).transpose();
        }
        // beta_j(zeta) = sum_k B_kj S(a_k, zeta) S(zeta, a), so that c_j = int beta_j phi ds
        // with the same indexing as split().
        p->beta_ = CMatrix(m, g.size());
        for (Eigen::Index j = 0; j < m; ++j) {
            CVector bj = CVector::Zero(g.size());
            for (Eigen::Index k = 0; k < m; ++k)
                bj += p->inverse_(k, j) * d.s_zeros()[static_cast<std::size_t>(k)].conjugate().cwiseProduct(d.s_base());
            p->beta_.row(j) = bj.transpose();
        }

        const auto& holes = bergman->holes();
        // Primary: extension coefficients of ln|z - b_m|.
        p->log_coeffs_ = CMatrix(m, m);
        for (Eigen::Index mm = 0; mm < m; ++mm) {
            const cplx bm = holes[static_cast<std::size_t>(mm)];
            const CVector phi = (g.nodes().array() - bm).abs().log().cast<cplx>();
            const auto [c, psi] = p->split(d, phi);
            p->log_coeffs_.row(mm) = c.transpose();
            p->log_psi_.push_back(psi);
        }
        if (m > 0) {
            Eigen::PartialPivLU<CMatrix> lu(p->log_coeffs_);
            p->primary_rcond_ = lu.rcond();
            p->primary_ok_ = p->primary_rcond_ > 1e-12;
            if (p->primary_ok_) p->log_coeffs_lu_ = lu;
        }

        // Antiderivative method.
        const CMatrix& am = bergman->log_moments();
        p->alpha_ = CMatrix(m, m);
        if (m > 0) {
            const CMatrix values = -am.conjugate() / two_pi;  // values(i,k): potential of L_i on gamma_k
            Eigen::PartialPivLU<CMatrix> lu(values.transpose());
            const auto& sl = bergman->script_l();
            for (Eigen::Index j = 0; j < m; ++j) {
                const CVector sigma = lu.solve(CVector::Unit(m, j));
                CVector fp = CVector::Zero(g.size());
                for (Eigen::Index i = 0; i < m; ++i) fp += sigma[i] * sl[static_cast<std::size_t>(i)];
                CVector hp = fp;
                for (Eigen::Index k = 0; k < m; ++k) {
                    const cplx alpha = -g.contour_integral(fp, static_cast<int>(k)) / (two_pi * I);
                    p->alpha_(j, k) = alpha;
                    hp -= alpha * (g.nodes().array() - holes[static_cast<std::size_t>(k)]).inverse().matrix();
                }
                const CVector dh = hp.cwiseProduct(g.velocities());
                for (int c = 0; c < g.curve_count(); ++c)
                    p->antiderivative_period_ = std::max(
                        p->antiderivative_period_, std::abs(dh.segment(g.offset(c), g.nodes_per_curve()).mean()));
                CVector hb = spectral_antiderivative(dh, g);
                // Fix the outer constant so that omega_j = 0 on the outer curve.
                const int outer = g.curve_count() - 1;
                double kappa = 0.0;
                for (Eigen::Index q = g.offset(outer); q < g.offset(outer) + g.nodes_per_curve(); ++q) {
                    double target = 0.0;
                    for (Eigen::Index k = 0; k < m; ++k)
                        target -= p->alpha_(j, k).real() * std::log(std::abs(g.nodes()[q] - holes[static_cast<std::size_t>(k)]));
                    kappa += target - hb[q].real();
                }
                p->kappa_.push_back(kappa / g.nodes_per_curve());
                p->antiderivative_bv_.push_back(std::move(hb));
            }
            p->alpha_imag_ = p->alpha_.imag().cwiseAbs().maxCoeff();
        }
        p->bergman_ = std::move(bergman);
        return p;
    }

    const SzegoData& szego() const noexcept { return bergman_->szego(); }
    const BergmanData& bergman() const noexcept { return *bergman_; }
    const BergmanPtr& bergman_ptr() const noexcept { return bergman_; }

    /// [A_jk].
    const CMatrix& periods() const noexcept { return periods_; }
    /// [B_jk] = [A_jk]^{-1}.
    const CMatrix& inverse_periods() const noexcept { return inverse_; }
    double inverse_residual() const noexcept { return inverse_residual_; }
    /// max |Im A_jk| / max |A_jk|.
    double period_imag() const noexcept { return period_imag_; }
    double period_rcond() const noexcept { return period_rcond_; }

    bool primary_available() const noexcept { return primary_ok_; }
    double primary_rcond() const noexcept { return primary_rcond_; }
    /// Row m: extension coefficients c^(m) of ln|z - b_m|.
    const CMatrix& log_coefficients() const noexcept { return log_coeffs_; }
    const CMatrix& alpha() const noexcept { return alpha_; }
    double alpha_imag() const noexcept { return alpha_imag_; }
    /// Largest |mean of dh_j/dt| over curves: zero when h_j is single valued.
    double antiderivative_period() const noexcept { return antiderivative_period_; }

    /// Coefficients c solving sum_j A_jk c_j = P(S_a phi)(a_k), and psi = phi - sum_j c_j chi_j.
    std::pair<CVector, CVector> split(const SzegoData& d, const CVector& phi) const {
        const BoundaryGrid& g = d.grid();
        const auto m = periods_.rows();
        CVector rhs(m);
        const CVector sphi = d.s_base().cwiseProduct(phi);
        for (Eigen::Index k = 0; k < m; ++k) rhs[k] = zero_rows_.row(k).transpose().cwiseProduct(sphi).sum();
        CVector c = m ? CVector(periods_.transpose().partialPivLu().solve(rhs)) : CVector(0);
        CVector psi = phi;
        for (Eigen::Index j = 0; j < m; ++j) psi.segment(g.offset(static_cast<int>(j)), g.nodes_per_curve()).array() -= c[j];
        return {std::move(c), std::move(psi)};
    }

    /// All omega_j(z) (complex: the imaginary part is a discretisation residue).
    CVector omega(const detail::ProjectionPoint& p, cplx z, OmegaMethod method) const {
        const SzegoData& d = szego();
        const auto m = periods_.rows();
        CVector out(m);
        if (m == 0) return out;
        if (method == OmegaMethod::primary && primary_ok_) {
            CVector u(m);
            for (Eigen::Index mm = 0; mm < m; ++mm)
                u[mm] = std::log(std::abs(z - bergman_->holes()[static_cast<std::size_t>(mm)])) -
                        detail::conjugate_pair(d, p, log_psi_[static_cast<std::size_t>(mm)]);
            return log_coeffs_lu_.solve(u);
        }
        for (Eigen::Index j = 0; j < m; ++j) {
            double v = p.szego.probe.value(antiderivative_bv_[static_cast<std::size_t>(j)]).real() +
                       kappa_[static_cast<std::size_t>(j)];
            for (Eigen::Index k = 0; k < m; ++k)
                v += alpha_(j, k).real() * std::log(std::abs(z - bergman_->holes()[static_cast<std::size_t>(k)]));
            out[j] = v;
        }
        return out;
    }

    CVector omega(cplx z, OmegaMethod method = OmegaMethod::primary) const {
        return omega(detail::projection_point(szego(), z), z, method);
    }

    /// beta_j(zeta_k) = sum_k' B_k'j S(a_k', zeta_k) S(zeta_k, a).
    const CMatrix& beta() const noexcept { return beta_; }

private:
    PoissonData() = default;

    BergmanPtr bergman_;
    CMatrix periods_, inverse_, zero_rows_, beta_;
    double inverse_residual_ = 0.0, period_imag_ = 0.0, period_rcond_ = 0.0;
    CMatrix log_coeffs_;
    Eigen::PartialPivLU<CMatrix> log_coeffs_lu_;
    std::vector<CVector> log_psi_;
    bool primary_ok_ = false;
    double primary_rcond_ = 0.0;
    CMatrix alpha_;
    std::vector<CVector> antiderivative_bv_;
    std::vector<double> kappa_;
    double alpha_imag_ = 0.0, antiderivative_period_ = 0.0;
};

using PoissonPtr = std::shared_ptr<const PoissonData>;

/// Harmonic measure of inner curve `index`: 1 on that curve, 0 on the others.
class HarmonicMeasure {
public:
    HarmonicMeasure(PoissonPtr data, int index) : data_(std::move(data)), index_(index) {}

    int index() const noexcept { return index_; }
    double operator()(cplx z) const { return evaluate(z, OmegaMethod::primary); }
    double evaluate(cplx z, OmegaMethod method) const { return data_->omega(z, method)[index_].real(); }

private:
    PoissonPtr data_;
    int index_;
};

/// Harmonic measures of the inner curves (empty for simply connected domains).
inline std::vector<HarmonicMeasure> harmonic_measures(const PoissonPtr& data) {
    std::vector<HarmonicMeasure> out;
    for (int j = 0; j < static_cast<int>(data->periods().rows()); ++j) out.emplace_back(data, j);
    return out;
}

/**
 * @brief Harmonic extension of real boundary data, prepared once for many evaluation points.
 */
class DirichletExtension {
public:
    DirichletExtension(PoissonPtr data, const RVector& phi) : data_(std::move(data)) {
        const SzegoData& d = data_->szego();
        if (phi.size() != d.grid().size()) throw InputError("size-mismatch", "boundary data do not match the grid");
        auto [c, psi] = data_->split(d, phi.cast<cplx>());
        c_ = std::move(c);
        psi_ = std::move(psi);
    }

    struct Value {
        double value;
        /// |Im| of h + conj(H) + sum c_j omega_j before taking the real part.
        double imag_residual;
        bool near_boundary;
    };

    Value operator()(cplx z, OmegaMethod method = OmegaMethod::primary) const {
        const SzegoData& d = data_->szego();
        const auto p = detail::projection_point(d, z);
        cplx v = detail::conjugate_pair(d, p, psi_);
        if (c_.size()) v += c_.cwiseProduct(data_->omega(p, z, method)).sum();
        return {v.real(), std::abs(v.imag()), p.szego.probe.near_boundary()};
    }

    /// Coefficients of the harmonic measures.
    const CVector& coefficients() const noexcept { return c_; }

private:
    PoissonPtr data_;
    CVector c_, psi_;
};

inline DirichletExtension::Value dirichlet_solve(const PoissonPtr& data, const RVector& phi, cplx z) {
    return DirichletExtension(data, phi)(z);
}

struct PoissonRow {
    /// p(z, zeta_k) for every boundary node.
    RVector values;
    /// Im p(z, zeta_k), zero up to discretisation.
    RVector imag;
    /// max |Im p(z, zeta_k)|.
    double imag_residual;
    bool near_boundary;
};

/**
 * @brief Poisson kernel p(z, zeta_k) at every boundary node:
 *
 *   p = S(z,w)S(w,a)/S(z,a) + conj(S(z,w)L(w,a))/conj(L(z,a))
 *       - sum_j beta_j(w) int_{gamma_j} S(z,.)S(.,a)/S(z,a) ds
 *       - sum_j beta_j(w) int_{gamma_j} conj(S(z,.)L(.,a))/conj(L(z,a)) ds
 *       + sum_j omega_j(z) beta_j(w),
 *
 * with beta_j(w) = sum_k B_kj S(a_k,w) S(w,a). This is exactly the kernel of the
 * Dirichlet extension above: c_j = int beta_j phi ds and psi = phi - sum_j c_j chi_j.
 */
inline PoissonRow poisson_row(const PoissonData& pd, cplx z, OmegaMethod method = OmegaMethod::primary) {
    const SzegoData& d = pd.szego();
    const BoundaryGrid& g = d.grid();
    const auto p = detail::projection_point(d, z);
    const CVector row = szego_row(d, p.szego);
    const CVector t1 = row.cwiseProduct(d.s_base()) / p.s_base;
    const CVector t2 = row.cwiseProduct(d.l_base()).conjugate() * std::conj(p.inv_l_base);
    CVector pk = t1 + t2;
    const auto m = pd.periods().rows();
    if (m > 0) {
        const CVector om = pd.omega(p, z, method);
        for (Eigen::Index j = 0; j < m; ++j) {
            const cplx i1 = g.arc_integral(t1, static_cast<int>(j));
            const cplx i2 = g.arc_integral(t2, static_cast<int>(j));
            const CVector bj = pd.beta().row(j).transpose();
            pk += (om[j] - i1 - i2) * bj;
        }
    }
    return {pk.real(), pk.imag(), pk.imag().cwiseAbs().maxCoeff(), p.szego.probe.near_boundary()};
}

inline double poisson_kernel(const PoissonData& pd, cplx z, Eigen::Index node) {
    if (node < 0 || node >= pd.szego().grid().size()) throw InputError("bad-node", "boundary node index out of range");
    return poisson_row(pd, z).values[node];
}

} // namespace potkern

#endif // POTKERN_HARMONIC_HPP
