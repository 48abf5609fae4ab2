#ifndef POTKERN_GEOMETRY_HPP
#define POTKERN_GEOMETRY_HPP

/**
 * @file geometry.hpp
 * @brief Smooth finitely connected domains, their boundary quadrature grids and
 *        per-curve spectral calculus.
 *
 * A domain is a list of closed curves parameterised over t in [0,1). The outer
 * curve is ccw and the holes are cw, so the boundary is positively oriented
 * with respect to the domain (the domain lies to the left of the tangent).
 * After construction the outer curve is always stored last.
 *
 * Grids are equispaced in t. The trapezoid weights |z'(t_k)|/N integrate smooth
 * periodic integrands against arc length to spectral accuracy.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "core.hpp"

namespace potkern {

struct FourierTerm {
    int mode;
    cplx coeff;
};

/// Position and first two parameter derivatives of a curve.
struct CurvePoint {
    cplx z;
    cplx dz;
    cplx d2z;
};

/**
 * @brief A closed parameterised curve with period 1: either a circle or a
 *        trigonometric polynomial z(t) = sum_m c_m exp(2 pi i m t).
 */
class Curve {
public:
    enum class Kind { circle, trig };

    static Curve circle(cplx center, double radius, int orientation = 1) {
        if (!(radius > 0.0) || !std::isfinite(radius))
            throw InputError("bad-curve", "circle radius must be positive and finite");
        if (orientation != 1 && orientation != -1)
            throw InputError("bad-curve", "circle orientation must be 1 or -1");
        Curve c;
        c.kind_ = Kind::circle;
        c.center_ = center;
        c.radius_ = radius;
        c.orientation_ = orientation;
        return c;
    }

    static Curve trig(std::vector<FourierTerm> terms) {
        if (terms.empty()) throw InputError("bad-curve", "trigonometric curve needs at least one coefficient");
        std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.mode < b.mode; });
        for (std::size_t i = 1; i < terms.size(); ++i)
            if (terms[i].mode == terms[i - 1].mode)
                throw InputError("bad-curve", "duplicate Fourier mode " + std::to_string(terms[i].mode));
        Curve c;
        c.kind_ = Kind::trig;
        c.terms_ = std::move(terms);
        return c;
    }

    Kind kind() const noexcept { return kind_; }
    cplx center() const noexcept { return center_; }
    double radius() const noexcept { return radius_; }
    int orientation() const noexcept { return orientation_; }
    const std::vector<FourierTerm>& terms() const noexcept { return terms_; }

    CurvePoint eval(double t) const {
        t -= std::floor(t);
        if (kind_ == Kind::circle) {
            const double w = two_pi * orientation_;
            const cplx e = std::polar(1.0, w * t);
            return {center_ + radius_ * e, radius_ * I * w * e, -radius_ * w * w * e};
        }
        CurvePoint p{0.0, 0.0, 0.0};
        for (const auto& [m, c] : terms_) {
            const double w = two_pi * m;
            const cplx e = c * std::polar(1.0, w * t);
            p.z += e;
            p.dz += I * w * e;
            p.d2z += -w * w * e;
        }
        return p;
    }

private:
    Curve() = default;
    Kind kind_ = Kind::circle;
    cplx center_{0.0, 0.0};
    double radius_ = 1.0;
    int orientation_ = 1;
    std::vector<FourierTerm> terms_;
};

inline CurvePoint curve_eval(const Curve& curve, double t) { return curve.eval(t); }

/// Curves of a finitely connected domain; holes first, outer boundary last.
class Domain {
public:
    Domain(std::vector<Curve> curves, std::size_t outer_index) {
        if (curves.empty()) throw InputError("bad-domain", "domain needs at least one curve");
        if (outer_index >= curves.size())
            throw InputError("bad-domain", "outer index " + std::to_string(outer_index) + " out of range");
        input_index_.resize(curves.size());
        for (std::size_t i = 0, k = 0; i < curves.size(); ++i) {
            if (i == outer_index) continue;
            input_index_[k++] = static_cast<int>(i);
        }
        input_index_.back() = static_cast<int>(outer_index);
        for (int src : input_index_) curves_.push_back(curves[static_cast<std::size_t>(src)]);
    }

    const std::vector<Curve>& curves() const noexcept { return curves_; }
    /// Connectivity n (number of boundary curves).
    int connectivity() const noexcept { return static_cast<int>(curves_.size()); }
    int outer_index() const noexcept { return connectivity() - 1; }
    const Curve& outer() const { return curves_.back(); }
    /// Position of curve `i` in the list the domain was constructed from.
    int input_index(int i) const { return input_index_.at(static_cast<std::size_t>(i)); }

private:
    std::vector<Curve> curves_;
    std::vector<int> input_index_;
};

/**
 * @brief Boundary quadrature grid: N equispaced parameter nodes on every curve,
 *        flattened curve by curve in domain order.
 */
class BoundaryGrid {
public:
    const Domain& domain() const noexcept { return domain_; }
    int nodes_per_curve() const noexcept { return n_per_; }
    int curve_count() const noexcept { return domain_.connectivity(); }
    Eigen::Index size() const noexcept { return nodes_.size(); }

    const CVector& nodes() const noexcept { return nodes_; }
    const CVector& velocities() const noexcept { return velocities_; }
    const CVector& accelerations() const noexcept { return accel_; }
    const CVector& tangents() const noexcept { return tangents_; }
    const RVector& weights() const noexcept { return weights_; }

    Eigen::Index offset(int curve) const noexcept { return static_cast<Eigen::Index>(curve) * n_per_; }
    int curve_of(Eigen::Index node) const noexcept { return static_cast<int>(node / n_per_); }
    double param(Eigen::Index node) const noexcept {
        return static_cast<double>(node % n_per_) / n_per_;
    }

    /// Largest distance between consecutive nodes on any curve.
    double max_spacing() const noexcept { return max_spacing_; }
    /// Diagonal of the bounding box of all nodes.
    double diameter() const noexcept { return diameter_; }

    /// Samples of the indicator function of one boundary curve.
    CVector indicator(int curve) const {
        CVector v = CVector::Zero(size());
        v.segment(offset(curve), n_per_).setOnes();
        return v;
    }

    /// Samples of g(z) at every node.
    template <class F>
    CVector sample(F&& g) const {
        CVector v(size());
        for (Eigen::Index k = 0; k < size(); ++k) v[k] = g(nodes_[k]);
        return v;
    }

    /// Trapezoid value of the contour integral of the samples over curve `c` (or all curves if c < 0).
    cplx contour_integral(const CVector& f, int c = -1) const {
        cplx sum = 0.0;
        const Eigen::Index lo = c < 0 ? 0 : offset(c);
        const Eigen::Index hi = c < 0 ? size() : offset(c) + n_per_;
        for (Eigen::Index k = lo; k < hi; ++k) sum += f[k] * velocities_[k];
        return sum / static_cast<double>(n_per_);
    }

    /// Arc-length integral of the samples over curve `c` (or all curves if c < 0).
    cplx arc_integral(const CVector& f, int c = -1) const {
        cplx sum = 0.0;
        const Eigen::Index lo = c < 0 ? 0 : offset(c);
        const Eigen::Index hi = c < 0 ? size() : offset(c) + n_per_;
        for (Eigen::Index k = lo; k < hi; ++k) sum += f[k] * weights_[k];
        return sum;
    }

private:
    explicit BoundaryGrid(Domain d) : domain_(std::move(d)) {}

    friend BoundaryGrid sample_grid(const Domain&, int);

    Domain domain_;
    int n_per_ = 0;
    CVector nodes_, velocities_, accel_, tangents_;
    RVector weights_;
    double max_spacing_ = 0.0;
    double diameter_ = 0.0;
};

/// Samples the curves without any geometric validation. Use build_grid for user domains.
inline BoundaryGrid sample_grid(const Domain& domain, int n) {
    if (n < 4 || n % 2 != 0)
        throw InputError("bad-resolution", "nodes per curve must be even and at least 4, got " + std::to_string(n));
    BoundaryGrid g(domain);
    g.n_per_ = n;
    const auto total = static_cast<Eigen::Index>(domain.connectivity()) * n;
    g.nodes_.resize(total);
    g.velocities_.resize(total);
    g.accel_.resize(total);
    g.tangents_.resize(total);
    g.weights_.resize(total);
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (int c = 0; c < domain.connectivity(); ++c) {
        const Curve& curve = domain.curves()[static_cast<std::size_t>(c)];
        for (int k = 0; k < n; ++k) {
            const auto p = curve.eval(static_cast<double>(k) / n);
            const auto idx = g.offset(c) + k;
            g.nodes_[idx] = p.z;
            g.velocities_[idx] = p.dz;
            g.accel_[idx] = p.d2z;
            const double speed = std::abs(p.dz);
            g.tangents_[idx] = speed > 0.0 ? p.dz / speed : cplx(0.0);
            g.weights_[idx] = speed / n;
            xmin = std::min(xmin, p.z.real());
            xmax = std::max(xmax, p.z.real());
            ymin = std::min(ymin, p.z.imag());
            ymax = std::max(ymax, p.z.imag());
        }
        for (int k = 0; k < n; ++k) {
            const auto a = g.nodes_[g.offset(c) + k];
            const auto b = g.nodes_[g.offset(c) + (k + 1) % n];
            g.max_spacing_ = std::max(g.max_spacing_, std::abs(b - a));
        }
    }
    g.diameter_ = std::hypot(xmax - xmin, ymax - ymin);
    return g;
}

namespace detail {

inline double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

// Proper or touching intersection of closed segments [p1,p2] and [q1,q2].
inline bool segments_intersect(cplx p1, cplx p2, cplx q1, cplx q2) {
    const double d1 = cross(q2 - q1, p1 - q1), d2 = cross(q2 - q1, p2 - q1);
    const double d3 = cross(p2 - p1, q1 - p1), d4 = cross(p2 - p1, q2 - p1);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
    auto on_seg = [](cplx a, cplx b, cplx p, double d) {
        return d == 0.0 && std::min(a.real(), b.real()) <= p.real() && p.real() <= std::max(a.real(), b.real()) &&
               std::min(a.imag(), b.imag()) <= p.imag() && p.imag() <= std::max(a.imag(), b.imag());
    };
    return on_seg(q1, q2, p1, d1) || on_seg(q1, q2, p2, d2) || on_seg(p1, p2, q1, d3) || on_seg(p1, p2, q2, d4);
}

// Winding number of the closed polygon through nodes [lo, hi) around p.
inline int polygon_winding(const CVector& z, Eigen::Index lo, Eigen::Index hi, cplx p) {
    int wn = 0;
    for (Eigen::Index k = lo; k < hi; ++k) {
        const cplx a = z[k], b = z[k + 1 < hi ? k + 1 : lo];
        if (a.imag() <= p.imag()) {
            if (b.imag() > p.imag() && cross(b - a, p - a) > 0) ++wn;
        } else if (b.imag() <= p.imag() && cross(b - a, p - a) < 0) {
            --wn;
        }
    }
    return wn;
}

} // namespace detail

/// Signed area enclosed by curve `c` (positive for ccw).
inline double signed_area(const BoundaryGrid& g, int c) {
    return 0.5 * g.contour_integral(g.nodes().conjugate(), c).imag();
}

struct GeometryTolerances {
    /// Minimum distance between distinct curves, relative to the diameter.
    double separation = 1e-9;
    /// |z'| below this (relative to diameter) counts as a degenerate parameterisation.
    double degenerate_speed = 1e-12;
};

/// Checks the domain invariants at grid resolution; throws GeometryError naming the curve.
inline void validate(const BoundaryGrid& g, const GeometryTolerances& tol = {}) {
    const int n = g.curve_count();
    const int per = g.nodes_per_curve();
    const double diam = g.diameter();
    const auto& z = g.nodes();
    for (int c = 0; c < n; ++c) {
        for (int k = 0; k < per; ++k)
            if (std::abs(g.velocities()[g.offset(c) + k]) <= tol.degenerate_speed * std::max(diam, 1.0))
                throw GeometryError("degenerate-curve",
                                    "curve " + std::to_string(g.domain().input_index(c)) + ": z'(t) vanishes at t=" +
                                        std::to_string(static_cast<double>(k) / per),
                                    g.domain().input_index(c));
        // Non-adjacent edges of the same polygon must not meet.
        for (int i = 0; i < per; ++i)
            for (int j = i + 2; j < per; ++j) {
                if (i == 0 && j == per - 1) continue;
                if (detail::segments_intersect(z[g.offset(c) + i], z[g.offset(c) + (i + 1) % per], z[g.offset(c) + j],
                                               z[g.offset(c) + (j + 1) % per]))
                    throw GeometryError("self-intersection",
                                        "curve " + std::to_string(g.domain().input_index(c)) + " intersects itself",
                                        g.domain().input_index(c));
            }
    }
    for (int c = 0; c < n; ++c)
        for (int d = c + 1; d < n; ++d) {
            double dmin = std::numeric_limits<double>::infinity();
            bool crossing = false;
            for (int i = 0; i < per && !crossing; ++i)
                for (int j = 0; j < per; ++j) {
                    const cplx a = z[g.offset(c) + i], b = z[g.offset(d) + j];
                    dmin = std::min(dmin, std::abs(a - b));
                    if (detail::segments_intersect(a, z[g.offset(c) + (i + 1) % per], b,
                                                   z[g.offset(d) + (j + 1) % per])) {
                        crossing = true;
                        break;
                    }
                }
            if (crossing || dmin <= tol.separation * diam)
                throw GeometryError("curves-intersect",
                                    "curves intersect: " + std::to_string(g.domain().input_index(c)) + " and " +
                                        std::to_string(g.domain().input_index(d)),
                                    g.domain().input_index(c));
        }
    const int outer = n - 1;
    if (signed_area(g, outer) <= 0.0)
        throw GeometryError("orientation", "outer curve must be counterclockwise", g.domain().input_index(outer));
    for (int c = 0; c < outer; ++c) {
        const int idx = g.domain().input_index(c);
        if (signed_area(g, c) >= 0.0)
            throw GeometryError("orientation", "inner curve " + std::to_string(idx) + " must be clockwise", idx);
        const cplx p = z[g.offset(c)];
        if (detail::polygon_winding(z, g.offset(outer), g.offset(outer) + per, p) != 1)
            throw GeometryError("not-nested", "inner curve " + std::to_string(idx) + " is not inside the outer curve",
                                idx);
        for (int d = 0; d < outer; ++d) {
            if (d == c) continue;
            if (detail::polygon_winding(z, g.offset(d), g.offset(d) + per, p) != 0)
                throw GeometryError("nested-holes",
                                    "inner curve " + std::to_string(idx) + " lies inside inner curve " +
                                        std::to_string(g.domain().input_index(d)),
                                    idx);
        }
    }
}

/// Samples the domain with N nodes per curve and validates it at that resolution.
inline BoundaryGrid build_grid(const Domain& domain, int n, const GeometryTolerances& tol = {}) {
    BoundaryGrid g = sample_grid(domain, n);
    validate(g, tol);
    return g;
}

// ---------------------------------------------------------------------------
// Spectral calculus per curve

namespace detail {

// Signed frequency of FFT bin k, with the Nyquist bin mapped to 0.
inline double fft_frequency(int k, int n) {
    if (2 * k == n) return 0.0;
    return 2 * k < n ? k : k - n;
}

template <class Op>
CVector per_curve_spectral(const CVector& samples, const BoundaryGrid& g, Op&& op) {
    if (samples.size() != g.size()) throw InputError("size-mismatch", "samples do not match the grid");
    const int n = g.nodes_per_curve();
    Eigen::FFT<double> fft;
    std::vector<cplx> time(static_cast<std::size_t>(n)), freq;
    CVector out(samples.size());
    for (int c = 0; c < g.curve_count(); ++c) {
        for (int k = 0; k < n; ++k) time[static_cast<std::size_t>(k)] = samples[g.offset(c) + k];
        fft.fwd(freq, time);
        for (int k = 0; k < n; ++k) freq[static_cast<std::size_t>(k)] = op(fft_frequency(k, n), freq[static_cast<std::size_t>(k)]);
        fft.inv(time, freq);
        for (int k = 0; k < n; ++k) out[g.offset(c) + k] = time[static_cast<std::size_t>(k)];
    }
    return out;
}

} // namespace detail

/// d/dt of the samples on each curve by Fourier differentiation.
/// Divide by z'(t) to get the complex derivative along the boundary.
inline CVector spectral_derivative(const CVector& samples, const BoundaryGrid& g) {
    return detail::per_curve_spectral(samples, g, [](double m, cplx c) { return two_pi * I * m * c; });
}

/// Zero-mean antiderivative in t on each curve. The mean of the input on each
/// curve is dropped; callers check it separately when it matters.
inline CVector spectral_antiderivative(const CVector& samples, const BoundaryGrid& g) {
    return detail::per_curve_spectral(samples, g, [](double m, cplx c) {
        return m == 0.0 ? cplx(0.0) : c / (two_pi * I * m);
    });
}

// ---------------------------------------------------------------------------
// Point location

struct NearestBoundaryPoint {
    double distance;
    int curve;
    double t;
    cplx point;
    cplx tangent;
};

/// Closest boundary point to p: nearest node, refined by Newton's method on the parameter.
inline NearestBoundaryPoint nearest_boundary_point(const BoundaryGrid& g, cplx p) {
    NearestBoundaryPoint best{std::numeric_limits<double>::infinity(), -1, 0.0, 0.0, 1.0};
    const int n = g.nodes_per_curve();
    for (int c = 0; c < g.curve_count(); ++c) {
        Eigen::Index kbest = g.offset(c);
        double dbest = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = g.offset(c); k < g.offset(c) + n; ++k) {
            const double d = std::abs(g.nodes()[k] - p);
            if (d < dbest) {
                dbest = d;
                kbest = k;
            }
        }
        const Curve& curve = g.domain().curves()[static_cast<std::size_t>(c)];
        double t = g.param(kbest);
        auto pt = curve.eval(t);
        double d = std::abs(pt.z - p);
        for (int it = 0; it < 30; ++it) {
            const cplx r = pt.z - p;
            const double grad = (std::conj(r) * pt.dz).real();
            const double hess = std::norm(pt.dz) + (std::conj(r) * pt.d2z).real();
            if (hess <= 0.0) break;
            const double step = std::clamp(-grad / hess, -1.0 / n, 1.0 / n);
            const auto trial = curve.eval(t + step);
            const double dt = std::abs(trial.z - p);
            if (dt > d) break;
            t += step;
            pt = trial;
            d = dt;
            if (std::abs(step) < 1e-15) break;
        }
        if (d < best.distance) best = {d, c, t - std::floor(t), pt.z, pt.dz / std::abs(pt.dz)};
    }
    return best;
}

struct LocateOptions {
    /// Points closer than this (relative to the diameter) count as on the boundary.
    double on_boundary = 1e-9;
};

/**
 * @brief True iff z lies in the domain. Far from the boundary the total winding number
 *        (trapezoid quadrature of dz/(zeta - z)) decides; within two node spacings the
 *        side of the tangent at the nearest boundary point decides.
 * @throws GeometryError "on-boundary" when z is within tolerance of the boundary.
 */
inline bool contains(const BoundaryGrid& g, cplx z, const LocateOptions& opt = {}) {
    const auto nb = nearest_boundary_point(g, z);
    if (nb.distance <= opt.on_boundary * g.diameter())
        throw GeometryError("on-boundary", "point lies on the boundary (distance " + std::to_string(nb.distance) + ")",
                            g.domain().input_index(nb.curve));
    if (nb.distance < 2.0 * g.max_spacing()) return (std::conj(nb.tangent) * (z - nb.point)).imag() > 0.0;
    cplx wind = 0.0;
    for (Eigen::Index k = 0; k < g.size(); ++k) wind += g.velocities()[k] / (g.nodes()[k] - z);
    wind /= two_pi * I * static_cast<double>(g.nodes_per_curve());
    return std::abs(wind - 1.0) < 0.5;
}

/// Domain overload: locates z against an unvalidated 512-node sampling.
inline bool contains(const Domain& d, cplx z, const LocateOptions& opt = {}) {
    return contains(sample_grid(d, 512), z, opt);
}

/// Area centroid of the region enclosed by curve c.
inline cplx enclosed_centroid(const BoundaryGrid& g, int c) {
    return g.contour_integral(g.nodes().cwiseAbs2().cast<cplx>(), c) /
           g.contour_integral(g.nodes().conjugate(), c);
}

} // namespace potkern

#endif // POTKERN_GEOMETRY_HPP
