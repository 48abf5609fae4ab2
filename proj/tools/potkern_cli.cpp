// potkern: assemble kernel data for a planar domain, evaluate kernels at points,
// run resolution studies and export the canonical fixtures.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "potkern/potkern.hpp"

namespace {

using namespace potkern;

struct RunConfig {
    std::string domain_path;
    std::string fixture;
    std::string artifact;
    int n = 0;
    std::string a = "auto";
    std::string kernel = "szego";
    std::string points;
    std::string out;
    std::string format = "csv";
    bool sum_check = false;
    bool self = false;
    std::string ns = "32,64,128";
};

/// Shortest text that reads back to the same double; NaN becomes an empty field.
std::string fmt_number(double x) {
    if (std::isnan(x)) return "";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

const cplx missing{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};

json number_or_null(double x) { return std::isnan(x) ? json(nullptr) : json(x); }

std::optional<cplx> parse_base_point(const std::string& s) {
    if (s == "auto") return std::nullopt;
    const auto comma = s.find(',');
    try {
        std::size_t used = 0;
        if (comma == std::string::npos) {
            const double re = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return cplx(re, 0.0);
        }
        const std::string rs = s.substr(0, comma), is = s.substr(comma + 1);
        const double re = std::stod(rs, &used);
        if (used != rs.size()) throw std::invalid_argument(s);
        const double im = std::stod(is, &used);
        if (used != is.size()) throw std::invalid_argument(s);
        return cplx(re, im);
    } catch (const std::logic_error&) {
        throw InputError("bad-base-point", "--a expects 're,im' or 'auto', got '" + s + "'");
    }
}

void check_resolution(int n) {
    if (n < 16 || n % 2 != 0) throw InputError("bad-resolution", "N must be even and at least 16");
}

struct Source {
    Domain domain;
    int n;
    std::optional<cplx> a;
    const reference::Fixture* fixture = nullptr;
};

Source resolve_source(const RunConfig& c) {
    if (!c.domain_path.empty() && !c.fixture.empty())
        throw InputError("bad-arguments", "give either --domain or --fixture, not both");
    if (!c.fixture.empty()) {
        const auto& f = reference::fixture(c.fixture);
        const int n = c.n ? c.n : f.n;
        check_resolution(n);
        const auto a = c.a == "auto" && f.base_point ? f.base_point : parse_base_point(c.a);
        return {f.domain, n, a, &f};
    }
    if (c.domain_path.empty()) throw InputError("bad-arguments", "a domain (--domain or --fixture) is required");
    const int n = c.n ? c.n : 256;
    check_resolution(n);
    return {load_domain(c.domain_path), n, parse_base_point(c.a), nullptr};
}

Assembly obtain_assembly(const RunConfig& c) {
    if (!c.artifact.empty() && c.domain_path.empty() && c.fixture.empty()) return load_artifact(c.artifact);
    const Source s = resolve_source(c);
    return assemble_all(s.domain, s.n, s.a);
}

void emit(const RunConfig& c, const std::string& text) {
    if (c.out.empty())
        std::cout << text;
    else
        write_text_file(c.out, text);
}

json cplx_list(const std::vector<cplx>& v) {
    json a = json::array();
    for (cplx z : v) a.push_back(json::array({z.real(), z.imag()}));
    return a;
}

json summary(const Assembly& as) {
    const SzegoData& d = *as.szego;
    const auto& q = d.quality();
    const PoissonData& p = *as.poisson;
    return {{"connectivity", d.connectivity()},
            {"n", d.grid().nodes_per_curve()},
            {"base_point", json::array({d.base_point().real(), d.base_point().imag()})},
            {"zero_count", d.zeros().size()},
            {"zeros", cplx_list(d.zeros())},
            {"ks_rcond", q.ks_rcond},
            {"inverse_residual", q.inverse_residual},
            {"unimodular_deviation", q.unimodular_deviation},
            {"zero_residual", q.zero_residual},
            {"log_moment_rcond", as.bergman->log_moment_rcond()},
            {"lambda_hermitian_deviation", as.bergman->hermitian_deviation()},
            {"period_rcond", p.period_rcond()},
            {"period_inverse_residual", p.inverse_residual()},
            {"period_imag_warning", p.period_imag()},
            {"omega_method", p.primary_available() ? "primary" : "antiderivative"}};
}

int cmd_assemble(const RunConfig& c) {
    const Source s = resolve_source(c);
    const Assembly as = assemble_all(s.domain, s.n, s.a);
    const std::string target = !c.artifact.empty() ? c.artifact : c.out;
    if (!target.empty()) save_artifact(as, target);
    std::cout << summary(as).dump(2) << "\n";
    return 0;
}

struct PointRow {
    cplx z, w;
    std::string parse_error;
};

std::vector<PointRow> read_points(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("io", "cannot open points file '" + path + "'");
    std::vector<PointRow> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const bool header = first && line.find_first_not_of("0123456789+-.eE, \t") != std::string::npos;
        first = false;
        if (line.empty() || line[0] == '#' || header) continue;
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        PointRow r;
        try {
            while (std::getline(ss, cell, ',')) {
                std::size_t used = 0;
                const auto b = cell.find_first_not_of(" \t"), e = cell.find_last_not_of(" \t");
                if (b == std::string::npos) throw std::invalid_argument(cell);
                const std::string t = cell.substr(b, e - b + 1);
                v.push_back(std::stod(t, &used));
                if (used != t.size()) throw std::invalid_argument(cell);
            }
        } catch (const std::logic_error&) {
            r.parse_error = "bad-row";
        }
        if (r.parse_error.empty() && v.size() != 2 && v.size() != 4) r.parse_error = "bad-row";
        if (r.parse_error.empty()) {
            r.z = {v[0], v[1]};
            if (v.size() == 4) r.w = {v[2], v[3]};
        }
        rows.push_back(r);
    }
    return rows;
}

struct OutRow {
    cplx z, w;
    int index = -1;
    cplx value = missing;
    bool near = false;
    std::string error;
    double weight_sum = std::numeric_limits<double>::quiet_NaN();
};

Eigen::Index node_at(const BoundaryGrid& g, cplx w) {
    const double tol = 1e-9 * std::max(1.0, g.diameter());
    Eigen::Index best = 0;
    (g.nodes().array() - w).abs().minCoeff(&best);
    if (std::abs(g.nodes()[best] - w) > tol)
        throw InputError("not-a-node", "Poisson kernel w must be a boundary grid node");
    return best;
}

std::vector<OutRow> evaluate_row(const Assembly& as, const std::string& kernel, const PointRow& p, bool sum_check) {
    OutRow base;
    base.z = p.z;
    base.w = p.w;
    if (!p.parse_error.empty()) {
        base.error = p.parse_error;
        return {base};
    }
    const SzegoData& d = *as.szego;
    try {
        if (kernel == "szego" || kernel == "garabedian") {
            const auto z = szego_point(d, p.z), w = szego_point(d, p.w);
            base.value = kernel == "szego" ? szego_eval(d, z, w) : garabedian_eval(d, z, w);
            base.near = z.probe.near_boundary() || w.probe.near_boundary();
        } else if (kernel == "bergman" || kernel == "lambda") {
            const auto z = bergman_point(*as.bergman, p.z), w = bergman_point(*as.bergman, p.w);
            base.value = kernel == "bergman" ? bergman_eval(*as.bergman, z, w) : lambda_kernel_eval(*as.bergman, z, w);
            base.near = z.szego.probe.near_boundary() || w.szego.probe.near_boundary();
        } else if (kernel == "ahlfors") {
            const auto v = ahlfors_eval(d, p.z);
            base.value = v.value;
            base.near = v.near_boundary;
        } else if (kernel == "poisson") {
            const Eigen::Index k = node_at(d.grid(), p.w);
            const auto row = poisson_row(*as.poisson, p.z);
            base.value = cplx(row.values[k], row.imag[k]);
            base.near = row.near_boundary;
            if (sum_check) base.weight_sum = (row.values.array() * d.grid().weights().array()).sum();
        } else if (kernel == "omega") {
            const auto pp = detail::projection_point(d, p.z);
            const CVector om = as.poisson->omega(pp, p.z, OmegaMethod::primary);
            std::vector<OutRow> out;
            for (Eigen::Index j = 0; j < om.size(); ++j) {
                OutRow r = base;
                r.index = static_cast<int>(j);
                r.value = om[j];
                r.near = pp.szego.probe.near_boundary();
                out.push_back(r);
            }
            return out;
        }
    } catch (const Error& e) {
        base.value = missing;
        base.error = e.code();
    }
    return {base};
}

int cmd_eval(const RunConfig& c) {
    static const std::vector<std::string> kernels = {"szego", "garabedian", "bergman", "lambda",
                                                     "poisson", "ahlfors", "omega"};
    if (std::find(kernels.begin(), kernels.end(), c.kernel) == kernels.end())
        throw InputError("bad-kernel", "unknown kernel '" + c.kernel + "'");
    if (c.points.empty()) throw InputError("bad-arguments", "--points is required");
    const auto points = read_points(c.points);
    const Assembly as = obtain_assembly(c);

    std::vector<OutRow> rows;
    for (const auto& p : points)
        for (auto& r : evaluate_row(as, c.kernel, p, c.sum_check)) rows.push_back(std::move(r));

    std::ostringstream os;
    if (c.format == "json") {
        json a = json::array();
        for (const auto& r : rows) {
            json j = {{"z", json::array({r.z.real(), r.z.imag()})},
                      {"w", json::array({r.w.real(), r.w.imag()})},
                      {"value", json::array({number_or_null(r.value.real()), number_or_null(r.value.imag())})},
                      {"near_boundary", r.near}};
            if (r.index >= 0) j["index"] = r.index;
            if (!r.error.empty()) j["error"] = r.error;
            if (c.sum_check) j["weight_sum"] = number_or_null(r.weight_sum);
            a.push_back(j);
        }
        os << json({{"kernel", c.kernel}, {"rows", a}}).dump(2) << "\n";
    } else {
        os << "z_re,z_im,w_re,w_im,index,value_re,value_im,near_boundary,error";
        if (c.sum_check) os << ",weight_sum";
        os << "\n";
        for (const auto& r : rows) {
            os << fmt_number(r.z.real()) << ',' << fmt_number(r.z.imag()) << ',' << fmt_number(r.w.real()) << ','
               << fmt_number(r.w.imag()) << ',' << (r.index >= 0 ? std::to_string(r.index) : "") << ','
               << fmt_number(r.value.real()) << ',' << fmt_number(r.value.imag()) << ',' << (r.near ? 1 : 0) << ','
               << r.error;
            if (c.sum_check) os << ',' << fmt_number(r.weight_sum);
            os << "\n";
        }
    }
    emit(c, os.str());
    return 0;
}

std::vector<int> parse_ns(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            const int n = std::stoi(cell, &used);
            if (used != cell.size()) throw std::invalid_argument(cell);
            check_resolution(n);
            out.push_back(n);
        } catch (const std::logic_error&) {
            throw InputError("bad-resolution", "--ns expects a comma-separated list of even integers");
        }
    }
    return out;
}

int cmd_convergence(const RunConfig& c) {
    const Source s = resolve_source(c);
    StudyConfig cfg = s.fixture ? study_config(*s.fixture, parse_ns(c.ns), c.self)
                                : StudyConfig{s.domain, s.a, reference::Oracle::none, 0.0, 1.0, parse_ns(c.ns), c.self};
    cfg.base_point = s.a;
    if (!cfg.self && cfg.oracle == reference::Oracle::none)
        std::cerr << "note: no closed form for this domain; only the dirichlet columns are filled (use --self)\n";
    const auto rows = convergence_study(cfg);
    std::ostringstream os;
    if (c.format == "json") {
        json a = json::array();
        for (const auto& r : rows) {
            json j = {{"n", r.n}};
            for (std::size_t k = 0; k < study_columns.size(); ++k) j[study_columns[k]] = number_or_null(r.error[k]);
            a.push_back(j);
        }
        os << json({{"mode", c.self ? "self" : "oracle"}, {"rows", a}}).dump(2) << "\n";
    } else {
        os << "n";
        for (const char* col : study_columns) os << ',' << col;
        os << "\n";
        for (const auto& r : rows) {
            os << r.n;
            for (double e : r.error) os << ',' << fmt_number(e);
            os << "\n";
        }
    }
    emit(c, os.str());
    return 0;
}

int cmd_fixtures(const RunConfig& c) {
    json list = json::array();
    if (!c.out.empty()) std::filesystem::create_directories(c.out);
    for (const auto& f : reference::fixtures()) {
        const char* oracle = f.oracle == reference::Oracle::disc ? "disc" : f.oracle == reference::Oracle::annulus ? "annulus" : "none";
        json j = {{"name", f.name}, {"connectivity", f.domain.connectivity()}, {"n", f.n}, {"oracle", oracle}};
        j["base_point"] = f.base_point ? json::array({f.base_point->real(), f.base_point->imag()}) : json("auto");
        list.push_back(j);
        if (!c.out.empty()) {
            json domain_json = domain_to_json(f.domain);
            write_text_file((std::filesystem::path(c.out) / (f.name + ".json")).string(), domain_json.dump(2) + "\n");
        }
    }
    std::cout << list.dump(2) << "\n";
    return 0;
}

void report(const std::string& code, const std::string& message, ErrorClass cls, std::optional<int> curve = {}) {
    json e = {{"code", code}, {"class", cls == ErrorClass::input ? "input" : "numeric"}, {"message", message}};
    if (curve) e["curve"] = *curve;
    std::cerr << json({{"error", e}}).dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Szego, Bergman and Poisson kernels of smooth planar domains"};
    app.require_subcommand(1, 1);
    RunConfig c;

    auto add_source = [&c](CLI::App* sub) {
        sub->add_option("--domain", c.domain_path, "domain description (JSON)");
        sub->add_option("--fixture", c.fixture, "built-in fixture name");
        sub->add_option("--n", c.n, "nodes per boundary curve (even, >= 16)");
        sub->add_option("--a", c.a, "base point 're,im' or 'auto'");
    };

    auto* assemble_cmd = app.add_subcommand("assemble", "assemble kernel data and write an artifact");
    add_source(assemble_cmd);
    assemble_cmd->add_option("--out,--artifact", c.artifact, "artifact path");

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a kernel at points from a CSV file");
    add_source(eval_cmd);
    eval_cmd->add_option("--artifact", c.artifact, "previously assembled artifact");
    eval_cmd->add_option("--kernel", c.kernel, "szego|garabedian|bergman|lambda|poisson|ahlfors|omega");
    eval_cmd->add_option("--points", c.points, "CSV rows: re z, im z[, re w, im w]");
    eval_cmd->add_option("--out", c.out, "output file (default stdout)");
    eval_cmd->add_option("--format", c.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    eval_cmd->add_flag("--sum-check", c.sum_check, "poisson: add the column sum_k p(z,zeta_k) w_k");

    auto* conv_cmd = app.add_subcommand("convergence", "max kernel errors against N");
    add_source(conv_cmd);
    conv_cmd->add_option("--ns", c.ns, "comma-separated resolutions");
    conv_cmd->add_flag("--self", c.self, "compare against the largest N");
    conv_cmd->add_option("--out", c.out, "output file (default stdout)");
    conv_cmd->add_option("--format", c.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

    auto* fix_cmd = app.add_subcommand("fixtures", "list fixtures; with --out, write their domain files");
    fix_cmd->add_option("--out", c.out, "directory for domain JSON files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report("bad-arguments", e.what(), ErrorClass::input);
        return 2;
    }

    try {
        if (*assemble_cmd) return cmd_assemble(c);
        if (*eval_cmd) return cmd_eval(c);
        if (*conv_cmd) return cmd_convergence(c);
        return cmd_fixtures(c);
    } catch (const Error& e) {
        report(e.code(), e.what(), e.error_class(), e.curve());
        return static_cast<int>(e.error_class());
    } catch (const std::exception& e) {
        report("internal", e.what(), ErrorClass::numeric);
        return 1;
    }
}
