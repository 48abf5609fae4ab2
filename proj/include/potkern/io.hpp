#ifndef POTKERN_IO_HPP
#define POTKERN_IO_HPP

/**
 * @file io.hpp
 * @brief JSON domain descriptions and the versioned assembly artifact.
 *
 * Domain JSON:
 *   {"curves": [{"type": "circle", "center": [x, y], "radius": r, "orientation": 1},
 *               {"type": "trig", "coeffs": [[m, re, im], ...]}],
 *    "outer": 0}
 *
 * The artifact stores the domain, N, the base point, the zeros and the boundary values
 * of S(., a) and S(., a_i). Everything else is rebuilt from those on load, so loaded and
 * freshly assembled data evaluate bit-identically. Derived matrices are written as well,
 * for inspection only.
 */

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "harmonic.hpp"

namespace potkern {

using json = nlohmann::json;

inline constexpr const char* artifact_schema = "potkern.artifact/1";

namespace detail {

inline json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx json_cplx(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw InputError("bad-json", std::string(what) + ": expected [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json vector_json(const CVector& v) {
    json a = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(cplx_json(v[k]));
    return a;
}

inline CVector json_vector(const json& j, const char* what) {
    if (!j.is_array()) throw InputError("bad-json", std::string(what) + ": expected an array");
    CVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) v[static_cast<Eigen::Index>(k)] = json_cplx(j[k], what);
    return v;
}

inline json matrix_json(const CMatrix& m) {
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vector_json(m.row(i).transpose()));
    return a;
}

template <class T>
T field(const json& j, const char* key, const char* what) {
    if (!j.is_object() || !j.contains(key))
        throw InputError("bad-json", std::string(what) + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw InputError("bad-json", std::string(what) + ": field '" + key + "' has the wrong type");
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Domains

inline json domain_to_json(const Domain& d) {
    json curves = json::array();
    // Written in input order, so that reading gives back the same domain.
    std::vector<json> ordered(static_cast<std::size_t>(d.connectivity()));
    int outer_input = 0;
    for (int i = 0; i < d.connectivity(); ++i) {
        const Curve& c = d.curves()[static_cast<std::size_t>(i)];
        json jc;
        if (c.kind() == Curve::Kind::circle) {
            jc = {{"type", "circle"},
                  {"center", detail::cplx_json(c.center())},
                  {"radius", c.radius()},
                  {"orientation", c.orientation()}};
        } else {
            json coeffs = json::array();
            for (const auto& t : c.terms()) coeffs.push_back(json::array({t.mode, t.coeff.real(), t.coeff.imag()}));
            jc = {{"type", "trig"}, {"coeffs", coeffs}};
        }
        ordered[static_cast<std::size_t>(d.input_index(i))] = jc;
        if (i == d.outer_index()) outer_input = d.input_index(i);
    }
    for (auto& c : ordered) curves.push_back(std::move(c));
    return {{"curves", curves}, {"outer", outer_input}};
}

inline Domain domain_from_json(const json& j) {
    if (!j.is_object()) throw InputError("bad-json", "domain: expected an object");
    const json& jc = j.contains("curves") ? j.at("curves") : json();
    if (!jc.is_array() || jc.empty()) throw InputError("bad-json", "domain: 'curves' must be a non-empty array");
    std::vector<Curve> curves;
    for (const auto& c : jc) {
        const auto type = detail::field<std::string>(c, "type", "curve");
        if (type == "circle") {
            const cplx center = detail::json_cplx(c.contains("center") ? c.at("center") : json(), "circle center");
            const int orient = c.contains("orientation") ? detail::field<int>(c, "orientation", "circle") : 1;
            curves.push_back(Curve::circle(center, detail::field<double>(c, "radius", "circle"), orient));
        } else if (type == "trig") {
            const auto coeffs = detail::field<std::vector<std::vector<double>>>(c, "coeffs", "trig curve");
            std::vector<FourierTerm> terms;
            for (const auto& t : coeffs) {
                if (t.size() != 3 || t[0] != std::floor(t[0]))
                    throw InputError("bad-json", "trig curve: each coefficient is [mode, re, im]");
                terms.push_back({static_cast<int>(t[0]), {t[1], t[2]}});
            }
            curves.push_back(Curve::trig(std::move(terms)));
        } else {
            throw InputError("bad-json", "unknown curve type '" + type + "'");
        }
    }
    const int outer = j.contains("outer") ? detail::field<int>(j, "outer", "domain") : 0;
    if (outer < 0) throw InputError("bad-domain", "outer index must be non-negative");
    return Domain(std::move(curves), static_cast<std::size_t>(outer));
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("io", "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("bad-json", path + ": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("io", "cannot write '" + path + "'");
    out << text;
    if (!out) throw InputError("io", "write to '" + path + "' failed");
}

inline Domain load_domain(const std::string& path) { return domain_from_json(read_json_file(path)); }

// ---------------------------------------------------------------------------
// Assembly bundle and artifact

/// Szego, Bergman and Poisson data for one domain, resolution and base point.
struct Assembly {
    SzegoPtr szego;
    BergmanPtr bergman;
    PoissonPtr poisson;

    static Assembly from_szego(SzegoPtr s, std::optional<std::vector<cplx>> holes = {}) {
        Assembly out;
        out.szego = std::move(s);
        out.bergman = BergmanData::build(out.szego, std::move(holes));
        out.poisson = PoissonData::build(out.bergman);
        return out;
    }
};

inline Assembly assemble_all(const Domain& domain, int n, std::optional<cplx> a = std::nullopt,
                             const SzegoOptions& opt = {}) {
    return Assembly::from_szego(assemble(domain, n, a, opt));
}

inline json options_json(const SzegoOptions& o) {
    return {{"zero_tol", o.zero_tol},         {"separation_tol", o.separation_tol},
            {"simple_tol", o.simple_tol},     {"max_retries", o.max_retries},
            {"degenerate_tol", o.degenerate_tol}, {"polish_tol", o.polish_tol},
            {"base_offset", o.base_offset}};
}

inline SzegoOptions options_from_json(const json& j) {
    SzegoOptions o;
    if (!j.is_object()) return o;
    o.zero_tol = j.value("zero_tol", o.zero_tol);
    o.separation_tol = j.value("separation_tol", o.separation_tol);
    o.simple_tol = j.value("simple_tol", o.simple_tol);
    o.max_retries = j.value("max_retries", o.max_retries);
    o.degenerate_tol = j.value("degenerate_tol", o.degenerate_tol);
    o.polish_tol = j.value("polish_tol", o.polish_tol);
    o.base_offset = j.value("base_offset", o.base_offset);
    return o;
}

inline json artifact_json(const Assembly& as) {
    const SzegoData& d = *as.szego;
    const BoundaryGrid& g = d.grid();
    json zeros = json::array(), s_zeros = json::array(), holes = json::array();
    for (cplx z : d.zeros()) zeros.push_back(detail::cplx_json(z));
    for (const auto& s : d.s_zeros()) s_zeros.push_back(detail::vector_json(s));
    for (cplx b : as.bergman->holes()) holes.push_back(detail::cplx_json(b));
    const auto& q = d.quality();
    const PoissonData& p = *as.poisson;
    return {
        {"schema", artifact_schema},
        {"domain", domain_to_json(g.domain())},
        {"n", g.nodes_per_curve()},
        {"options", options_json(d.options())},
        {"base_point", detail::cplx_json(d.base_point())},
        {"zeros", zeros},
        {"holes", holes},
        {"ks_rcond", q.ks_rcond},
        {"s_base", detail::vector_json(d.s_base())},
        {"s_zeros", s_zeros},
        {"derived",
         {{"s_aa", d.s_aa()},
          {"coefficients", detail::matrix_json(d.coefficients())},
          {"lambda", detail::matrix_json(as.bergman->lambda())},
          {"periods", detail::matrix_json(p.periods())},
          {"inverse_periods", detail::matrix_json(p.inverse_periods())},
          {"omega_method", p.primary_available() ? "primary" : "antiderivative"}}},
        {"quality",
         {{"inverse_residual", q.inverse_residual},
          {"unimodular_deviation", q.unimodular_deviation},
          {"zero_residual", q.zero_residual},
          {"zero_count", detail::cplx_json(q.zero_count)},
          {"lambda_hermitian_deviation", as.bergman->hermitian_deviation()},
          {"period_inverse_residual", p.inverse_residual()},
          {"period_imag", p.period_imag()}}},
    };
}

inline Assembly artifact_from_json(const json& j) {
    if (!j.is_object() || j.value("schema", std::string()) != artifact_schema)
        throw InputError("bad-artifact", std::string("artifact schema must be '") + artifact_schema + "'");
    const Domain domain = domain_from_json(j.at("domain"));
    const int n = detail::field<int>(j, "n", "artifact");
    auto grid = std::make_shared<const BoundaryGrid>(build_grid(domain, n));
    const SzegoOptions opt = options_from_json(j.contains("options") ? j.at("options") : json());
    std::vector<cplx> zeros, holes;
    for (const auto& z : j.at("zeros")) zeros.push_back(detail::json_cplx(z, "zero"));
    for (const auto& b : j.at("holes")) holes.push_back(detail::json_cplx(b, "hole point"));
    CVector s_base = detail::json_vector(j.at("s_base"), "s_base");
    std::vector<BoundaryFunction> s_zeros;
    for (const auto& s : j.at("s_zeros")) s_zeros.push_back(detail::json_vector(s, "s_zeros"));
    if (s_base.size() != grid->size())
        throw InputError("bad-artifact", "boundary samples do not match the grid size");
    for (const auto& s : s_zeros)
        if (s.size() != grid->size()) throw InputError("bad-artifact", "boundary samples do not match the grid size");
    auto szego = SzegoData::from_boundary(grid, detail::json_cplx(j.at("base_point"), "base_point"), std::move(zeros),
                                          std::move(s_base), std::move(s_zeros), opt, j.value("ks_rcond", 0.0));
    return Assembly::from_szego(std::move(szego), std::move(holes));
}

inline void save_artifact(const Assembly& as, const std::string& path) {
    write_text_file(path, artifact_json(as).dump(1) + "\n");
}

inline Assembly load_artifact(const std::string& path) {
    try {
        return artifact_from_json(read_json_file(path));
    } catch (const json::exception& e) {
        throw InputError("bad-artifact", path + ": " + e.what());
    }
}

} // namespace potkern

#endif // POTKERN_IO_HPP
