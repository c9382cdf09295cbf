#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "varjet/format.hpp"
#include "varjet/parser.hpp"
#include "varjet/random_lagrangian.hpp"

using namespace varjet;

namespace {
Expr jet(int f, int t, std::vector<int> idx) { return Expr::jet(f, t, std::move(idx)); }
}

TEST_CASE("basic statements") {
    Problem p = parse_problem("dim 2; field phi; param m = 1/2; L = m*phi_0^2;");
    CHECK(p.n == 2);
    CHECK(p.field_names == std::vector<std::string>{"phi"});
    REQUIRE(p.parameters.count("m"));
    CHECK(*p.parameters.at("m") == Rational(1, 2));
    CHECK(p.lagrangian == Expr::param("m") * pow(jet(0, 0, {0}), 2));
}

TEST_CASE("field arrays expand to numbered fields") {
    Problem p = parse_problem("dim 1; field q[3]; L = q0*q1*q2;");
    CHECK(p.field_names == std::vector<std::string>{"q0", "q1", "q2"});
    CHECK(p.lagrangian == jet(0, 0, {}) * jet(1, 0, {}) * jet(2, 0, {}));
}

TEST_CASE("derivative suffixes canonicalize index order") {
    Problem a = parse_problem("dim 2; field phi; L = phi_10;");
    Problem b = parse_problem("dim 2; field phi; L = phi_01;");
    CHECK(a.lagrangian == b.lagrangian);
    CHECK(a.lagrangian == jet(0, 0, {0, 1}));
}

TEST_CASE("d() applies the total derivative") {
    Problem p = parse_problem("dim 1; field q; L = d(q,0);");
    CHECK(p.lagrangian == jet(0, 0, {0}));
    Problem p2 = parse_problem("dim 2; field q; L = d(q^2, 0, 1);");
    CHECK(p2.lagrangian == Rational(2) * (jet(0, 0, {1}) * jet(0, 0, {0}) +
                                          jet(0, 0, {}) * jet(0, 0, {0, 1})));
}

TEST_CASE("sum macro expands over its range") {
    Problem p = parse_problem("dim 1; field q[2]; L = sum(i, 0, 1, d(q[i],0)^2);");
    CHECK(p.lagrangian == pow(jet(0, 0, {0}), 2) + pow(jet(1, 0, {0}), 2));
    Problem empty = parse_problem("dim 1; field q; L = q + sum(i, 1, 0, q^2);");
    CHECK(empty.lagrangian == jet(0, 0, {}));
    Problem nested = parse_problem("dim 2; field phi; L = sum(i,0,1, sum(j,0,1, phi_0*d(phi,i,j)));");
    Expr want;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) want += jet(0, 0, {0}) * jet(0, 0, {i, j});
    CHECK(nested.lagrangian == want);
}

TEST_CASE("rationals, comments and whitespace") {
    Problem p = parse_problem("# heading\ndim 1;\nfield q; # trailing\nL = 3/4 * q; # end\n");
    CHECK(p.lagrangian == Rational(3, 4) * jet(0, 0, {}));
}

TEST_CASE("elementary functions and base coordinates") {
    Problem p = parse_problem("dim 2; field phi; L = sin(phi) * cos(x1) + exp(phi_0);");
    Expr want = apply_func(Func::Sin, jet(0, 0, {})) * apply_func(Func::Cos, Expr::base_coord(1)) +
                apply_func(Func::Exp, jet(0, 0, {0}));
    CHECK(p.lagrangian == want);
}

TEST_CASE("errors carry positions") {
    auto pos = [](const char* src) {
        try {
            parse_problem(src);
        } catch (const ParseError& e) {
            return std::make_pair(e.line, e.column);
        }
        return std::make_pair(-1, -1);
    };
    CHECK(pos("dim 1;\nfield q;\nL = q +;\n") == std::make_pair(3, 8));
    CHECK(pos("dim 1; field q; L = zz;").first == 1);
    CHECK_THROWS_AS(parse_problem("dim 1; field q; L = 1.5*q;"), ParseError);
    CHECK_THROWS_AS(parse_problem("dim 1; field q; L = q_1;"), ParseError);     // index >= n
    CHECK_THROWS_AS(parse_problem("dim 1; field q; L = x1;"), ParseError);     // coord >= n
    CHECK_THROWS_AS(parse_problem("dim 1; field eta_q; L = 1;"), ParseError);  // reserved
    CHECK_THROWS_AS(parse_problem("dim 1; field q; field q; L = q;"), ParseError);
    CHECK_THROWS_AS(parse_problem("dim 1; field q;"), ParseError);  // missing L
    CHECK_THROWS_AS(parse_problem("dim 1; field q; L = d(q,0,0,0);"), ParseError);
    // order > 2 in L is a problem-level error
    CHECK_THROWS_AS(parse_problem("dim 1; field q; L = q_000;"), UnsupportedProblemError);
    CHECK_THROWS_AS(parse_problem("dim 1; field q; L = eta_q;"), UnsupportedProblemError);
}

TEST_CASE("plain formatting round-trips through the problem grammar") {
    std::mt19937 rng(47);
    RandomSpec spec;
    spec.allow_funcs = true;
    for (int i = 0; i < 100; ++i) {
        Problem p = random_problem(rng, spec);
        FormatContext ctx;
        ctx.field_names = p.field_names;
        std::string src = "dim " + std::to_string(p.n) + ";\n";
        for (const std::string& f : p.field_names) src += "field " + f + ";\n";
        src += "L = " + format_expr(p.lagrangian, Style::Plain, ctx) + ";\n";
        Problem q = parse_problem(src, p.name);
        CHECK(q.lagrangian == p.lagrangian);
        CHECK(q.field_names == p.field_names);
    }
}

TEST_CASE("sexp round-trips for 1000 random expressions") {
    std::mt19937 rng(53);
    RandomSpec spec;
    spec.allow_funcs = true;
    std::uniform_int_distribution<int> pct(0, 99);
    for (int i = 0; i < 1000; ++i) {
        Expr e = random_polynomial(rng, 2, 2, spec);
        // widen coverage beyond tier-0 polynomials
        if (pct(rng) < 30) e = e * jet(pct(rng) % 2, 1, {pct(rng) % 2});
        if (pct(rng) < 20) e = e + Expr::param("m") * Expr::base_coord(0);
        if (pct(rng) < 10) e = e * pow(Expr::param("m"), -2);
        std::string s = format_expr(e, Style::Sexp);
        CHECK(parse_sexp(s) == e);
    }
    CHECK(parse_sexp(format_expr(Expr(), Style::Sexp)).is_zero());
    CHECK(parse_sexp("(+ 1/2)") == Expr::constant(Rational(1, 2)));
}

TEST_CASE("interchange grammar examples") {
    Expr e = Rational(3) * jet(0, 0, {0, 0}) * jet(0, 0, {1, 1}) -
             Rational(3) * pow(jet(0, 0, {0, 1}), 2);
    CHECK(format_expr(e, Style::Sexp) ==
          "(+ (* 3 (jet 0 0 (0 0)) (jet 0 0 (1 1))) (* -3 (^ (jet 0 0 (0 1)) 2)))");
    CHECK(parse_sexp("(+ (* 3 (jet 0 0 (0 0)) (jet 0 0 (1 1))) (* -3 (^ (jet 0 0 (0 1)) 2)))") == e);
    CHECK(format_expr(Expr(), Style::Sexp) == "0");
}

TEST_CASE("plain and latex fixtures") {
    Expr e = Rational(3) * jet(0, 0, {0, 0}) * jet(0, 0, {1, 1}) -
             Rational(3) * pow(jet(0, 0, {0, 1}), 2);
    FormatContext ctx;
    ctx.field_names = {"phi"};
    CHECK(format_expr(e, Style::Plain, ctx) == "3*phi_00*phi_11 - 3*phi_01^2");
    CHECK(format_expr(Expr(), Style::Plain, ctx) == "0");
    CHECK(format_expr(Expr(), Style::Latex, ctx) == "0");
}
