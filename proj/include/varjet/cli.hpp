#pragma once

// Command surface: derive / check / simulate over .vj problem files.
// Exit codes: 0 ok, 1 parse error, 2 derivation error, 3 failed identity,
// 4 degenerate mass matrix, 5 missing initial data.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "varjet/format.hpp"
#include "varjet/ode.hpp"
#include "varjet/oracles.hpp"
#include "varjet/parser.hpp"
#include "varjet/random_lagrangian.hpp"
#include "varjet/varcalc.hpp"

namespace varjet::cli {

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, 0, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string stem(const std::string& path) {
    size_t slash = path.find_last_of("/\\");
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    size_t dot = base.find_last_of('.');
    return dot == std::string::npos ? base : base.substr(0, dot);
}

inline Problem load(const std::string& path) {
    return parse_problem(read_file(path), stem(path));
}

struct Rendered {
    std::string label;
    Expr expr;
};

inline std::string pair_label(const std::string& head, const std::string& field, int mu, int nu) {
    return head + "^" + field + "_" + std::to_string(mu) + std::to_string(nu);
}

inline std::vector<Rendered> render_target(const Problem& p, const std::string& what) {
    std::vector<Rendered> out;
    if (what == "el") {
        ELResult el = euler_lagrange(p);
        for (int A = 0; A < p.field_count(); ++A) out.push_back({p.field_names[A], el.by_field[A]});
    } else if (what == "jacobi") {
        ELResult jac = jacobi_direct(p);
        for (int A = 0; A < p.field_count(); ++A)
            out.push_back({p.field_names[A], normalize_equation(jac.by_field[A])});
    } else if (what == "l1") {
        out.push_back({"L1", l1(p)});
    } else if (what == "l2") {
        out.push_back({"L2", l2(p)});
    } else if (what == "momenta") {
        MomentaResult m = momenta(p);
        for (int A = 0; A < p.field_count(); ++A) {
            const std::string& f = p.field_names[A];
            for (int mu = 0; mu < p.n; ++mu)
                out.push_back({"pi^" + f + "_" + std::to_string(mu), m.pi[A][mu]});
            for (const auto& [idx, e] : m.N[A])
                out.push_back({pair_label("N", f, idx.first, idx.second), e});
            for (int mu = 0; mu < p.n; ++mu)
                out.push_back({"p^" + f + "_" + std::to_string(mu), m.p[A][mu]});
            for (const auto& [idx, e] : m.n[A])
                out.push_back({pair_label("n", f, idx.first, idx.second), e});
        }
    } else if (what == "emt") {
        EMTensor em = energy_momentum(p);
        for (int mu = 0; mu < p.n; ++mu)
            for (int nu = 0; nu < p.n; ++nu)
                out.push_back({"H^" + std::to_string(mu) + "_" + std::to_string(nu),
                               em.at(mu, nu)});
    } else if (what.rfind("ibp:", 0) == 0) {
        std::string v = what.substr(4);
        for (char& c : v) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        IbpVariant variant;
        if (v == "A1") variant = IbpVariant::A1;
        else if (v == "A2") variant = IbpVariant::A2;
        else if (v == "A3") variant = IbpVariant::A3;
        else if (v == "A4") variant = IbpVariant::A4;
        else if (v == "UNIFIED") variant = IbpVariant::Unified;
        else if (v == "SELFADJOINT") variant = IbpVariant::SelfAdjoint;
        else throw Error("unknown ibp variant '" + what.substr(4) + "'");
        IbpForm form = ibp_form(p, variant);
        out.push_back({"bulk", form.bulk});
        for (int mu = 0; mu < p.n; ++mu)
            out.push_back({"current^" + std::to_string(mu), form.current.components[mu]});
    } else {
        throw Error("unknown derivation target '" + what + "'");
    }
    return out;
}

inline int cmd_derive(const std::string& file, const std::string& what, const std::string& format) {
    Problem p;
    try {
        p = load(file);
    } catch (const ParseError& e) {
        std::cerr << file << ": " << e.what() << "\n";
        return 1;
    }
    try {
        std::vector<Rendered> items = render_target(p, what);
        FormatContext ctx;
        ctx.field_names = p.field_names;
        if (format == "json") {
            nlohmann::ordered_json j;
            j["problem"] = p.name;
            j["what"] = what;
            j["fields"] = nlohmann::ordered_json::array();
            for (const Rendered& r : items)
                j["fields"].push_back({{"field", r.label}, {"expr", format_expr(r.expr, Style::Sexp, ctx)}});
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        Style style;
        if (format == "plain") style = Style::Plain;
        else if (format == "latex") style = Style::Latex;
        else if (format == "sexp") style = Style::Sexp;
        else throw Error("unknown format '" + format + "'");
        for (const Rendered& r : items) {
            if (items.size() > 1) std::cout << r.label << ": ";
            std::cout << format_expr(r.expr, style, ctx) << "\n";
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

// Symbolic determinant by Laplace expansion along the first column; the
// Hessian blocks stay small (dim <= 2 N n).
inline Expr determinant_expr(const std::vector<Expr>& m, int dim) {
    if (dim == 0) return Expr::integer(1);
    if (dim == 1) return m[0];
    Expr det;
    for (int r = 0; r < dim; ++r) {
        if (m[r * dim].is_zero()) continue;
        std::vector<Expr> minor;
        minor.reserve((dim - 1) * (dim - 1));
        for (int i = 0; i < dim; ++i) {
            if (i == r) continue;
            for (int j = 1; j < dim; ++j) minor.push_back(m[i * dim + j]);
        }
        Expr term = m[r * dim] * determinant_expr(minor, dim - 1);
        det += (r % 2 == 0) ? term : Rational(-1) * term;
    }
    return det;
}

struct CheckReport {
    int failures = 0;
    void record(const std::string& name, bool ok) {
        std::cout << (ok ? "PASS" : "FAIL") << " " << name << "\n";
        if (!ok) ++failures;
    }
};

inline void check_identities(const Problem& p, const std::string& tag, CheckReport& rep) {
    const int n = p.n, N = p.field_count();
    Expr L1 = l1(p), L2 = l2(p);
    ELResult el0 = euler_lagrange(p);
    ELResult jac = jacobi_direct(p);

    bool ok = true;
    for (int A = 0; A < N; ++A)
        ok = ok && euler_lagrange_expr(L1, A, 1, n) == el0.by_field[A];
    rep.record(tag + "first-variation: dL1/deta = dL0/dphi", ok);

    ok = true;
    for (int A = 0; A < N; ++A) {
        Expr lhs = euler_lagrange_expr(L2, A, 1, n);
        ok = ok && lhs == euler_lagrange_expr(L1, A, 0, n) && lhs == jac.by_field[A];
    }
    rep.record(tag + "second-variation: dl2/deta = dL1/dphi = jacobi", ok);

    for (IbpVariant v : {IbpVariant::A1, IbpVariant::A2, IbpVariant::A3, IbpVariant::A4,
                         IbpVariant::Unified, IbpVariant::SelfAdjoint}) {
        IbpForm form = ibp_form(p, v);
        Expr sum = form.bulk;
        for (int mu = 0; mu < n; ++mu) sum += total_derivative(form.current.components[mu], mu);
        rep.record(tag + std::string("ibp ") + ibp_variant_name(v) + ": bulk + div = 2 l2",
                   sum == Rational(2) * L2);
    }
}

inline void check_divergence(const Problem& p, std::mt19937& rng, CheckReport& rep) {
    RandomSpec spec;
    spec.allow_funcs = true;
    bool ok = true;
    for (int trial = 0; trial < 5; ++trial) {
        Expr v = random_polynomial(rng, p.n, p.field_count(), spec);
        Expr div;
        for (int mu = 0; mu < p.n; ++mu) div += total_derivative(v, mu);
        for (int A = 0; A < p.field_count(); ++A)
            ok = ok && euler_lagrange_expr(div, A, 0, p.n).is_zero();
    }
    rep.record("variational derivative annihilates divergences", ok);
}

inline void check_hessian(const Problem& p, CheckReport& rep) {
    if (jet_order(p.lagrangian) > 1) return;  // the det identity targets first-order L
    HessianMatrix w1 = hessian_matrix(p);
    HessianMatrix w0 = hessian_l0(p);
    Expr d1 = determinant_expr(w1.entries, w1.dim);
    Expr d0 = determinant_expr(w0.entries, w0.dim);
    Expr sq = d0 * d0;
    rep.record("|det W(L1)| = det(W(L0))^2", d1 == sq || d1 == Rational(-1) * sq);
}

inline int cmd_check(const std::string& file) {
    Problem p;
    try {
        p = load(file);
    } catch (const ParseError& e) {
        std::cerr << file << ": " << e.what() << "\n";
        return 1;
    }
    try {
        CheckReport rep;
        unsigned seed = 20240817;
        if (const char* env = std::getenv("VARJET_SEED")) seed = std::stoul(env);
        std::mt19937 rng(seed);

        check_identities(p, "", rep);
        check_divergence(p, rng, rep);
        check_hessian(p, rep);

        // seeded property mode: the same identities on random Lagrangians
        for (int i = 0; i < 5; ++i) {
            Problem rp = random_problem(rng);
            check_identities(rp, "random[" + std::to_string(i) + "] ", rep);
        }
        return rep.failures == 0 ? 0 : 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

inline int cmd_simulate(const std::string& file, double t0, double t1, double dt,
                        const std::string& init_json, bool doubled,
                        const std::vector<std::string>& param_args, const std::string& out_path) {
    Problem p;
    try {
        p = load(file);
    } catch (const ParseError& e) {
        std::cerr << file << ": " << e.what() << "\n";
        return 1;
    }
    try {
        std::map<std::string, double> params;
        for (const std::string& a : param_args) {
            size_t eq = a.find('=');
            if (eq == std::string::npos) throw Error("--param expects name=value, got '" + a + "'");
            params[a.substr(0, eq)] = std::stod(a.substr(eq + 1));
        }

        OdeSystem sys = doubled ? build_doubled_ode(p, params) : build_el_ode(p, params);

        nlohmann::json init;
        try {
            init = nlohmann::json::parse(init_json.empty() ? "{}" : init_json);
        } catch (const nlohmann::json::exception& e) {
            std::cerr << "error: bad --init JSON: " << e.what() << "\n";
            return 5;
        }
        std::vector<double> y0;
        for (const std::string& name : sys.names()) {
            if (!init.contains(name)) {
                std::cerr << "error: missing initial data for '" << name << "'\n";
                return 5;
            }
            y0.push_back(init[name].get<double>());
        }
        for (const auto& [key, _] : init.items())
            if (std::find(sys.names().begin(), sys.names().end(), key) == sys.names().end()) {
                std::cerr << "error: unknown state coordinate '" << key << "' in --init\n";
                return 5;
            }

        Trajectory traj = integrate(sys, y0, t0, t1, dt);

        std::vector<std::string> extra_names;
        std::vector<std::vector<double>> extra_cols;
        if (doubled) {
            CompiledExpr h = sys.compile(energy_momentum(p).at(0, 0));
            std::vector<double> col;
            col.reserve(traj.states.size());
            for (size_t i = 0; i < traj.states.size(); ++i)
                col.push_back(sys.eval(h, traj.time(i), traj.states[i]));
            double h0 = col[0], drift = 0.0;
            for (double v : col) drift = std::max(drift, std::fabs(v - h0));
            std::cerr << "H^0_0 drift: " << drift / std::max(1.0, std::fabs(h0)) << " (initial "
                      << h0 << ")\n";
            extra_names.push_back("H00");
            extra_cols.push_back(std::move(col));
        }

        if (out_path.empty()) {
            write_csv(traj, std::cout, extra_names, extra_cols);
        } else {
            std::ofstream out(out_path);
            if (!out) throw Error("cannot open '" + out_path + "' for writing");
            write_csv(traj, out, extra_names, extra_cols);
        }
        return 0;
    } catch (const DegeneracyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace detail

inline int run(int argc, char** argv) {
    CLI::App app{"variational calculus on jet coordinates"};
    app.require_subcommand(1);

    std::string file, what = "el", format = "plain";
    CLI::App* derive = app.add_subcommand("derive", "derive equations from a problem file");
    derive->add_option("file", file, "problem file (.vj)")->required();
    derive->add_option("--what", what,
                       "el | jacobi | l1 | l2 | momenta | emt | ibp:<variant>");
    derive->add_option("--format", format, "plain | latex | sexp | json");

    std::string check_file;
    CLI::App* check = app.add_subcommand("check", "run the identity suite on a problem file");
    check->add_option("file", check_file, "problem file (.vj)")->required();

    std::string sim_file, init = "{}", out_path;
    double t0 = 0.0, t1 = 10.0, dt = 1e-3;
    bool doubled = false;
    std::vector<std::string> param_args;
    CLI::App* sim = app.add_subcommand("simulate", "integrate an n = 1 problem");
    sim->add_option("file", sim_file, "problem file (.vj)")->required();
    sim->add_option("--t0", t0, "start time");
    sim->add_option("--t1", t1, "end time");
    sim->add_option("--dt", dt, "RK4 step");
    sim->add_option("--init", init, "JSON object binding every state coordinate");
    sim->add_flag("--doubled", doubled, "integrate the doubled (phi, eta) system");
    sim->add_option("--param", param_args, "parameter override name=value (repeatable)");
    sim->add_option("--out", out_path, "CSV output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (derive->parsed()) return detail::cmd_derive(file, what, format);
    if (check->parsed()) return detail::cmd_check(check_file);
    return detail::cmd_simulate(sim_file, t0, t1, dt, init, doubled, param_args, out_path);
}

}  // namespace varjet::cli
