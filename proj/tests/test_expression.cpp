#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "common.hpp"
#include "refl/problem.hpp"

using namespace refl;
using namespace testing;

namespace {

double eval(const std::string& src, double t) { return Expression::parse(src).eval(t); }

long parse_offset(const std::string& src) {
    try {
        Expression::parse(src);
    } catch (const ParseError& e) {
        return e.offset;
    }
    return -2;
}

} // namespace

TEST_CASE("expression grammar and precedence") {
    CHECK(eval("sin(2*t) + 1", 0.0) == Catch::Approx(1.0));
    CHECK(eval("2^3^2", 0.0) == Catch::Approx(512.0));        // right-associative power
    CHECK(eval("-2^2", 0.0) == Catch::Approx(-4.0));          // unary minus binds looser than ^
    CHECK(eval("(-2)^2", 0.0) == Catch::Approx(4.0));
    CHECK(eval("2*3 + 4/8", 0.0) == Catch::Approx(6.5));
    CHECK(eval("2 - 3 - 4", 0.0) == Catch::Approx(-5.0));     // left-associative subtraction
    CHECK(eval("--1", 0.0) == Catch::Approx(1.0));
    CHECK(eval("cosh(1) - sinh(1)", 0.0) == Catch::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(eval("pi", 0.0) == Catch::Approx(3.14159265358979323846));
    CHECK(eval("cos(pi)", 0.0) == Catch::Approx(-1.0));
    CHECK(eval("1.5e2 + 2.5E-1", 0.0) == Catch::Approx(150.25));
    CHECK(eval(".5 * 4", 0.0) == Catch::Approx(2.0));
    CHECK(eval("exp(t)*sin(t)", 1.2) == Catch::Approx(std::exp(1.2) * std::sin(1.2)));
    CHECK(eval("t^2 - 2*t + 1", 3.0) == Catch::Approx(4.0));
    CHECK(eval(" ( t + 1 ) * ( t - 1 ) ", 2.0) == Catch::Approx(3.0));
}

TEST_CASE("expression parse errors carry the offending offset") {
    CHECK(parse_offset("1 + ") >= 3);                 // unexpected end
    CHECK(parse_offset("2 @ 3") == 2);                // unexpected character
    CHECK(parse_offset("1 + bogus(2)") == 4);         // unknown identifier starts at 4
    CHECK(parse_offset("sin 2") >= 3);                // function needs '('
    CHECK(parse_offset("(1 + 2") >= 6);               // missing ')'
    CHECK(parse_offset("1 2") >= 2);                  // trailing input
    CHECK_THROWS_AS(Expression::parse(""), ParseError);
    CHECK_THROWS_AS(Expression::parse("t t"), ParseError);
}

TEST_CASE("expression evaluation errors") {
    Expression div = Expression::parse("1/t");
    CHECK(div.eval(2.0) == Catch::Approx(0.5));
    CHECK_THROWS_AS(div.eval(0.0), EvalError);
    CHECK_THROWS_AS(eval("0^(-1)", 0.0), EvalError);
    CHECK_THROWS_AS(eval("(-1)^0.5", 0.0), EvalError);
    CHECK(eval("t^(-1)", 4.0) == Catch::Approx(0.25));
}

TEST_CASE("expression keeps its source text") {
    Expression e = Expression::parse("t + 1");
    CHECK(e.source() == "t + 1");
}

TEST_CASE("system problem files round-trip through write and parse") {
    ProblemSpec spec;
    spec.n = 2;
    spec.F = mat2(1, 0, 0, 1);
    spec.G = mat2(0, 0.25, -0.25, 0);
    spec.A = mat2(0.5, 1, 1, 0);
    spec.B = mat2(-0.5, 0, 0, 0.125);
    spec.delta = RVec(2);
    spec.delta << 1.0, -2.0;
    spec.gamma = {"sin(t)", "cos(2*t) + 0.5"};
    spec.boundary = BoundarySpec{mat2(1, 0, 0, 1), mat2(-1, 0, 0, -1), 1.5};
    spec.mode = "bvp";
    spec.output.t_min = -1.5;
    spec.output.t_max = 1.5;
    spec.output.points = 11;
    spec.output.tol = 1e-9;
    spec.output.grid_s = 5;

    std::string text = write_problem(spec);
    ProblemSpec back = parse_problem(text);
    CHECK(back == spec);
    CHECK(write_problem(back) == text);
}

TEST_CASE("operator problem files round-trip through write and parse") {
    ProblemSpec spec;
    spec.op = OperatorSpec{{parse_rational("-2"), Rational(0), Rational(0), Rational(0),
                            parse_rational("2")},
                           {parse_rational("-1"), Rational(0), Rational(0), Rational(0),
                            parse_rational("1/2")}};
    spec.delta = RVec::Zero(4);
    spec.delta << 1.0, 0.0, 0.0, 0.0;
    spec.mode = "basis";
    std::string text = write_problem(spec);
    ProblemSpec back = parse_problem(text);
    CHECK(back == spec);
    CHECK(back.op->to_operator().order() == 4);
    CHECK(write_problem(back) == text);
}

TEST_CASE("problem parser accepts comments and blank lines") {
    ProblemSpec spec = parse_problem(
        "# demo\n"
        "[system]\n"
        "n = 1\n"
        "F = 1\n"
        "G = 0 # no reflected derivative\n"
        "A = 0\n"
        "B = 2\n"
        "\n"
        "delta = 1\n");
    CHECK(spec.n == 1);
    CHECK(spec.B(0, 0) == 2.0);
    CHECK(spec.delta[0] == 1.0);
    CHECK(spec.gamma.empty());
    CHECK_FALSE(spec.boundary.has_value());
}

TEST_CASE("problem parser rejects malformed input") {
    auto offset_of = [](const std::string& text) -> long {
        try {
            parse_problem(text);
        } catch (const ParseError& e) {
            return e.offset;
        }
        return -2;
    };

    // unknown section, bad header, key outside section
    CHECK(offset_of("[nope]\n") == 1);
    CHECK(offset_of("[system\n") == 1);
    CHECK(offset_of("n = 1\n") == 1);

    std::string base = "[system]\nn = 2\nF = 1 0 0 1\nG = 0 0 0 0\nA = 0 0 0 0\n";

    // wrong matrix size, unknown key, bad number, missing matrix
    CHECK_THROWS_AS(parse_problem(base + "B = 1 0 0\n"), ParseError);
    CHECK_THROWS_AS(parse_problem(base + "B = 0 0 0 0\nQ = 1\n"), ParseError);
    CHECK_THROWS_AS(parse_problem(base + "B = 0 0 zero 0\n"), ParseError);
    CHECK_THROWS_AS(parse_problem("[system]\nn = 2\nF = 1 0 0 1\n"), ParseError);
    CHECK_THROWS_AS(parse_problem("[system]\nF = 1\n"), ParseError);

    std::string sys = base + "B = 0 0 0 0\n";

    // delta length, mode, boundary completeness and sign of T
    CHECK_THROWS_AS(parse_problem(sys + "delta = 1\n"), ParseError);
    CHECK_THROWS_AS(parse_problem(sys + "mode = everything\n"), ParseError);
    CHECK_THROWS_AS(parse_problem(sys + "[boundary]\nC = 1 0 0 1\nT = 1\n"), ParseError);
    CHECK_THROWS_AS(
        parse_problem(sys + "[boundary]\nC = 1 0 0 1\nK = 1 0 0 1\nT = 0\n"), ParseError);
    CHECK_THROWS_AS(
        parse_problem(sys + "[boundary]\nC = 1 0 0 1\nK = 1 0 0 1\nT = -2\n"), ParseError);

    // forcing section accepts only gamma lines, with parsable expressions
    CHECK_THROWS_AS(parse_problem(sys + "[forcing]\nh = t\n"), ParseError);
    CHECK_THROWS_AS(parse_problem(sys + "[forcing]\ngamma = t +\n"), ParseError);

    // operator-specific failures
    CHECK_THROWS_AS(parse_problem("[operator]\n"), ParseError);
    CHECK_THROWS_AS(parse_problem("[operator]\na = 1/0\n"), ParseError);
    CHECK_THROWS_AS(parse_problem(sys + "[operator]\na = 1\n"), ParseError);

    // n out of range
    CHECK_THROWS_AS(parse_problem("[system]\nn = 0\n"), ParseError);
    CHECK_THROWS_AS(parse_problem("[system]\nn = 2.5\n"), ParseError);
    CHECK_THROWS_AS(parse_problem("[system]\nn = 64\n"), ParseError);
}

TEST_CASE("forcing compiles from the problem spec") {
    ProblemSpec spec = parse_problem(
        "[system]\nn = 2\nF = 1 0 0 1\nG = 0 0 0 0\nA = 0 0 0 0\nB = 0 0 0 0\n"
        "[forcing]\ngamma = sin(t)\ngamma = t^2\n");
    ForcingFunction f = forcing_from_spec(spec, 2);
    CHECK(f(0.5)[0] == Catch::Approx(std::sin(0.5)));
    CHECK(f(0.5)[1] == Catch::Approx(0.25));
    CHECK(f.description == "sin(t); t^2");

    ProblemSpec none = parse_problem(
        "[system]\nn = 2\nF = 1 0 0 1\nG = 0 0 0 0\nA = 0 0 0 0\nB = 0 0 0 0\n");
    CHECK(max_abs(RVec(forcing_from_spec(none, 2)(1.0))) == 0.0);

    // one expression per component for systems
    CHECK_THROWS_AS(forcing_from_spec(spec, 3), InvalidInputError);

    // scalar operator forcing lands in the companion's last slot
    ProblemSpec op = parse_problem("[operator]\na = 1\nb = 2\n[forcing]\ngamma = cos(t)\n");
    ForcingFunction g = forcing_from_spec(op, 3);
    CHECK(g(0.0)[0] == 0.0);
    CHECK(g(0.0)[1] == 0.0);
    CHECK(g(0.0)[2] == Catch::Approx(1.0));
}
