#ifndef POTKERN_REFERENCE_HPP
#define POTKERN_REFERENCE_HPP

/**
 * @file reference.hpp
 * @brief Closed-form and series kernels for discs and annuli, canonical test domains,
 *        and a deterministic interior sampler.
 *
 * Nothing here calls into the integral-equation code: the oracles are independent.
 */

#include <random>
#include <string>

#include "geometry.hpp"

namespace potkern::reference {

namespace detail {

inline cplx disc_product(cplx z, cplx w, cplx center, double radius, const char* what) {
    const cplx zc = z - center, wc = w - center;
    if (!(std::abs(zc) < radius) || !(std::abs(wc) < radius))
        throw InputError("outside-domain", std::string(what) + ": arguments must lie inside the disc");
    return zc * std::conj(wc);
}

} // namespace detail

/// Szego kernel of the disc |z - c| < R: R / (2 pi (R^2 - (z-c) conj(w-c))).
inline cplx disc_szego(cplx z, cplx w, cplx center = 0.0, double radius = 1.0) {
    const cplx p = detail::disc_product(z, w, center, radius, "disc_szego");
    return radius / (two_pi * (radius * radius - p));
}

/// Garabedian kernel of any disc: 1 / (2 pi (z - w)).
inline cplx disc_garabedian(cplx z, cplx w) {
    if (z == w) throw InputError("pole", "disc_garabedian: z equals w");
    return 1.0 / (two_pi * (z - w));
}

/// Bergman kernel of the disc: R^2 / (pi (R^2 - (z-c) conj(w-c))^2).
inline cplx disc_bergman(cplx z, cplx w, cplx center = 0.0, double radius = 1.0) {
    const cplx p = detail::disc_product(z, w, center, radius, "disc_bergman");
    const cplx d = radius * radius - p;
    return radius * radius / (pi * d * d);
}

/// Poisson kernel of the unit disc against arc length: (1 - |z|^2) / (2 pi |w - z|^2), |w| = 1.
inline double disc_poisson(cplx z, cplx w) {
    if (!(std::abs(z) < 1.0)) throw InputError("outside-domain", "disc_poisson: z must lie inside the unit disc");
    if (std::abs(std::abs(w) - 1.0) > 1e-12) throw InputError("outside-domain", "disc_poisson: w must lie on the unit circle");
    return (1.0 - std::norm(z)) / (two_pi * std::norm(w - z));
}

/// Ahlfors map of the unit disc with f(a) = 0, f'(a) > 0.
inline cplx disc_ahlfors(cplx z, cplx a) { return (z - a) / (1.0 - std::conj(a) * z); }

struct SeriesValue {
    cplx value;
    /// Number of Laurent terms summed.
    int terms;
};

namespace detail {

inline cplx annulus_product(double r, cplx z, cplx w) {
    if (!(r > 0.0 && r < 1.0)) throw InputError("bad-radius", "annulus radius must lie in (0,1)");
    const cplx x = z * std::conj(w);
    const double ax = std::abs(x);
    if (!(ax > r * r) || !(ax < 1.0))
        throw InputError("outside-domain", "annulus series diverges: need r^2 < |z conj(w)| < 1");
    return x;
}

} // namespace detail

/**
 * @brief Szego kernel of r < |z| < 1: (1/2 pi) sum_m (z conj w)^m / (1 + r^(2m+1)).
 *
 * With x = |z conj w| and q = r^2/x, the tail beyond |m| = M is bounded by
 * x^M/(1-x) + q^M/(r(1-q)); summation stops once that bound is below tol.
 */
inline SeriesValue annulus_szego(double r, cplx z, cplx w, double tol = 1e-15) {
    const cplx x = detail::annulus_product(r, z, w);
    const double ax = std::abs(x), q = r * r / ax;
    cplx sum = 1.0 / (1.0 + r);
    cplx xp = 1.0, xn = 1.0;
    int m = 0;
    while (true) {
        ++m;
        xp *= x;
        xn /= x;
        sum += xp / (1.0 + std::pow(r, 2 * m + 1));
        sum += xn / (1.0 + std::pow(r, 1 - 2 * m));
        const double tail = std::pow(ax, m + 1) / (1.0 - ax) + std::pow(q, m + 1) / (r * (1.0 - q));
        if (tail / two_pi < tol || m > 100000) break;
    }
    return {sum / two_pi, 2 * m + 1};
}

/// Squared L^2 norm of z^m over r < |z| < 1.
inline double annulus_monomial_norm(double r, int m) {
    if (m == -1) return -two_pi * std::log(r);
    return two_pi * (1.0 - std::pow(r, 2 * m + 2)) / (2 * m + 2);
}

/**
 * @brief Bergman kernel of r < |z| < 1: sum_m (z conj w)^m / ||z^m||^2.
 *
 * Tail bound: (M+2) x^(M+1)/(pi (1-r^2)(1-x)^2) + (M+2) q^(M+1)/(pi r^2 (1-r^2)(1-q)^2).
 */
inline SeriesValue annulus_bergman(double r, cplx z, cplx w, double tol = 1e-15) {
    const cplx x = detail::annulus_product(r, z, w);
    const double ax = std::abs(x), q = r * r / ax;
    cplx sum = 1.0 / annulus_monomial_norm(r, 0) + 1.0 / (x * annulus_monomial_norm(r, -1));
    cplx xp = 1.0, xn = 1.0 / x;
    int m = 0;
    while (true) {
        ++m;
        xp *= x;
        xn /= x;
        sum += xp / annulus_monomial_norm(r, m);
        sum += xn / annulus_monomial_norm(r, -m - 1);
        const double c = (m + 2) / (pi * (1.0 - r * r));
        const double tail = c * std::pow(ax, m + 1) / ((1.0 - ax) * (1.0 - ax)) +
                            c * std::pow(q, m + 1) / (r * r * (1.0 - q) * (1.0 - q));
        if (tail < tol || m > 100000) break;
    }
    return {sum, 2 * m + 2};
}

/// Harmonic measure of the inner circle of r < |z| < 1.
inline double annulus_harmonic_measure(double r, cplx z) { return std::log(std::abs(z)) / std::log(r); }

enum class Oracle { none, disc, annulus };

struct Fixture {
    std::string name;
    Domain domain;
    /// Recommended nodes per curve.
    int n;
    /// Base point; empty means automatic selection.
    std::optional<cplx> base_point;
    Oracle oracle = Oracle::none;
    /// Disc centre/radius, or annulus inner radius (outer radius 1, centre 0).
    cplx center = 0.0;
    double radius = 1.0;
};

inline std::vector<Fixture> fixtures() {
    std::vector<Fixture> out;
    out.push_back({"disc", Domain({Curve::circle(0.0, 1.0)}, 0), 128, cplx(0.3, 0.0), Oracle::disc, 0.0, 1.0});
    out.push_back({"offset-disc", Domain({Curve::circle({0.3, -0.2}, 1.2)}, 0), 256, std::nullopt, Oracle::disc,
                   cplx(0.3, -0.2), 1.2});
    out.push_back({"annulus-0.5", Domain({Curve::circle(0.0, 1.0), Curve::circle(0.0, 0.5, -1)}, 0), 256,
                   cplx(0.7, 0.0), Oracle::annulus, 0.0, 0.5});
    out.push_back({"3conn",
                   Domain({Curve::circle(0.0, 1.0), Curve::circle(-0.45, 0.15, -1), Curve::circle(0.45, 0.15, -1)}, 0),
                   256, cplx(0.0, 0.6), Oracle::none, 0.0, 1.0});
    out.push_back({"trig2",
                   Domain({Curve::trig({{1, 1.0}, {-1, 0.15}, {2, 0.05}}),
                           Curve::trig({{0, {0.1, 0.05}}, {-1, 0.3}, {1, 0.04}})},
                          0),
                   256, cplx(0.55, 0.3), Oracle::none, 0.0, 1.0});
    return out;
}

inline const Fixture& fixture(const std::string& name) {
    static const std::vector<Fixture> all = fixtures();
    for (const auto& f : all)
        if (f.name == name) return f;
    throw InputError("unknown-fixture", "no fixture named '" + name + "'");
}

/**
 * @brief `count` pseudo-random interior points at distance > min_dist from the boundary,
 *        drawn by rejection from the bounding box. Deterministic for a given seed.
 */
inline std::vector<cplx> interior_samples(const BoundaryGrid& g, int count, double min_dist, std::uint64_t seed = 1) {
    double x0 = g.nodes().real().minCoeff(), x1 = g.nodes().real().maxCoeff();
    double y0 = g.nodes().imag().minCoeff(), y1 = g.nodes().imag().maxCoeff();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
    std::vector<cplx> out;
    long attempts = 0;
    while (static_cast<int>(out.size()) < count) {
        if (++attempts > 1000L * count + 10000)
            throw InputError("sampling-failed", "could not find enough interior points");
        const cplx z(ux(rng), uy(rng));
        if (nearest_boundary_point(g, z).distance <= min_dist) continue;
        if (contains(g, z)) out.push_back(z);
    }
    return out;
}

} // namespace potkern::reference

#endif // POTKERN_REFERENCE_HPP
