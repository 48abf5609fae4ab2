#ifndef POTKERN_STUDY_HPP
#define POTKERN_STUDY_HPP

/**
 * @file study.hpp
 * @brief Resolution studies: max errors of every kernel at a fixed set of interior
 *        points, against closed forms where available or against the finest run.
 */

#include <array>
#include <limits>

#include "io.hpp"
#include "reference.hpp"

namespace potkern {

inline constexpr std::array<const char*, 7> study_columns = {"szego",  "garabedian", "bergman",       "lambda",
                                                             "omega",  "dirichlet",  "dirichlet_imag"};

struct StudyRow {
    int n;
    /// Indexed like study_columns; NaN where no reference exists.
    std::array<double, study_columns.size()> error;
};

struct StudyConfig {
    Domain domain;
    std::optional<cplx> base_point;
    reference::Oracle oracle = reference::Oracle::none;
    cplx center = 0.0;
    double radius = 1.0;
    std::vector<int> ns;
    /// Compare against the largest N instead of closed forms.
    bool self = false;
    int points = 20;
    /// Sample points stay this far (relative to the bounding-box diagonal) from the boundary.
    double margin = 0.07;
    std::uint64_t seed = 11;
};

inline StudyConfig study_config(const reference::Fixture& f, std::vector<int> ns, bool self) {
    StudyConfig c{f.domain, f.base_point, f.oracle, f.center, f.radius, std::move(ns), self};
    return c;
}

namespace detail {

/// Test harmonic function for the Dirichlet column: Re z^2 + Im z^3.
inline double study_harmonic(cplx z) { return (z * z).real() + (z * z * z).imag(); }

struct StudyValues {
    std::vector<cplx> szego, garabedian, bergman, lambda;
    std::vector<double> omega, dirichlet, dirichlet_imag;
};

inline StudyValues study_values(const Assembly& as, const std::vector<cplx>& pts) {
    StudyValues v;
    const auto m = pts.size();
    std::vector<BergmanPoint> bp;
    for (cplx z : pts) bp.push_back(bergman_point(*as.bergman, z));
    const auto& g = as.szego->grid();
    RVector phi(g.size());
    for (Eigen::Index k = 0; k < g.size(); ++k) phi[k] = study_harmonic(g.nodes()[k]);
    const DirichletExtension ext(as.poisson, phi);
    for (std::size_t i = 0; i < m; ++i) {
        const auto& z = bp[i];
        const auto& w = bp[(i + 1) % m];
        v.szego.push_back(szego_eval(*as.szego, z.szego, w.szego));
        v.garabedian.push_back(garabedian_eval(*as.szego, z.szego, w.szego));
        v.bergman.push_back(bergman_eval(*as.bergman, z, w));
        v.lambda.push_back(lambda_kernel_eval(*as.bergman, z, w));
        if (as.poisson->periods().rows() > 0) v.omega.push_back(as.poisson->omega(pts[i])[0].real());
        const auto d = ext(pts[i]);
        v.dirichlet.push_back(d.value);
        v.dirichlet_imag.push_back(d.imag_residual);
    }
    return v;
}

template <class T>
double max_diff(const std::vector<T>& a, const std::vector<T>& b) {
    if (a.empty() || a.size() != b.size()) return std::numeric_limits<double>::quiet_NaN();
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
    return e;
}

inline double max_value(const std::vector<double>& a) {
    double e = 0.0;
    for (double x : a) e = std::max(e, x);
    return e;
}

inline StudyValues oracle_values(const StudyConfig& c, const std::vector<cplx>& pts) {
    StudyValues v;
    const auto m = pts.size();
    for (std::size_t i = 0; i < m; ++i) {
        const cplx z = pts[i], w = pts[(i + 1) % m];
        if (c.oracle == reference::Oracle::disc) {
            v.szego.push_back(reference::disc_szego(z, w, c.center, c.radius));
            v.garabedian.push_back(reference::disc_garabedian(z, w));
            v.bergman.push_back(reference::disc_bergman(z, w, c.center, c.radius));
            v.lambda.push_back(1.0 / (pi * (z - w) * (z - w)));
        } else if (c.oracle == reference::Oracle::annulus) {
            v.szego.push_back(reference::annulus_szego(c.radius, z, w).value);
            v.bergman.push_back(reference::annulus_bergman(c.radius, z, w).value);
            v.omega.push_back(reference::annulus_harmonic_measure(c.radius, z));
        }
    }
    return v;
}

} // namespace detail

/**
 * @brief One row per N (the reference N itself is omitted in self mode).
 *
 * The Dirichlet column always compares with the exact extension of Re z^2 + Im z^3;
 * dirichlet_imag is the solver's own imaginary residue, not an error.
 */
inline std::vector<StudyRow> convergence_study(const StudyConfig& c) {
    if (c.ns.empty()) throw InputError("bad-resolution", "no resolutions given");
    if (c.self && c.ns.size() < 2) throw InputError("bad-resolution", "self mode needs at least two resolutions");
    std::vector<int> ns = c.ns;
    std::sort(ns.begin(), ns.end());
    const int finest = ns.back();
    const BoundaryGrid probe_grid = build_grid(c.domain, finest);
    const auto pts = reference::interior_samples(probe_grid, c.points, c.margin * probe_grid.diameter(), c.seed);

    const bool oracle = !c.self && c.oracle != reference::Oracle::none;
    std::vector<double> exact;
    for (cplx z : pts) exact.push_back(detail::study_harmonic(z));
    detail::StudyValues ref;
    if (c.self)
        ref = detail::study_values(assemble_all(c.domain, finest, c.base_point), pts);
    else
        ref = detail::oracle_values(c, pts);

    std::vector<StudyRow> rows;
    for (int n : ns) {
        if (c.self && n == finest) continue;
        const auto v = detail::study_values(assemble_all(c.domain, n, c.base_point), pts);
        StudyRow r{n, {}};
        r.error.fill(std::numeric_limits<double>::quiet_NaN());
        if (c.self || oracle) {
            r.error[0] = detail::max_diff(v.szego, ref.szego);
            r.error[1] = detail::max_diff(v.garabedian, ref.garabedian);
            r.error[2] = detail::max_diff(v.bergman, ref.bergman);
            r.error[3] = detail::max_diff(v.lambda, ref.lambda);
            r.error[4] = detail::max_diff(v.omega, ref.omega);
        }
        r.error[5] = detail::max_diff(v.dirichlet, exact);
        r.error[6] = detail::max_value(v.dirichlet_imag);
        rows.push_back(r);
    }
    return rows;
}

} // namespace potkern

#endif // POTKERN_STUDY_HPP
