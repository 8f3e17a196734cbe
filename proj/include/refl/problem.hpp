#pragma once

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "refl/errors.hpp"
#include "refl/expression.hpp"
#include "refl/matrix.hpp"
#include "refl/opalg.hpp"
#include "refl/rational.hpp"
#include "refl/varpar.hpp"

namespace refl {

struct BoundarySpec {
    RMat C, K;
    double T = 0.0;

    friend bool operator==(const BoundarySpec& a, const BoundarySpec& b) {
        return a.C == b.C && a.K == b.K && a.T == b.T;
    }
};

struct OutputSpec {
    std::optional<double> t_min, t_max, tol;
    std::optional<int> points, grid_s;

    friend bool operator==(const OutputSpec& a, const OutputSpec& b) {
        return a.t_min == b.t_min && a.t_max == b.t_max && a.tol == b.tol &&
               a.points == b.points && a.grid_s == b.grid_s;
    }
};

// A scalar operator problem: exact coefficient lists for the plain part (a)
// and the reflected part (b), index = derivative order.
struct OperatorSpec {
    std::vector<Rational> a, b;

    ReflectionOperator to_operator() const {
        return ReflectionOperator{RationalPoly(std::vector<Rational>(b)),
                                  RationalPoly(std::vector<Rational>(a))};
    }

    friend bool operator==(const OperatorSpec& x, const OperatorSpec& y) {
        return x.a == y.a && x.b == y.b;
    }
};

struct ProblemSpec {
    int n = 0; // 0 when only [operator] is given
    RMat F, G, A, B;
    RVec delta;
    std::vector<std::string> gamma;
    std::optional<BoundarySpec> boundary;
    std::optional<OperatorSpec> op;
    std::string mode; // optional: ivp bvp green-ivp green-bvp basis reduce verify
    OutputSpec output;

    friend bool operator==(const ProblemSpec& a, const ProblemSpec& b) {
        auto mat_eq = [](const RMat& x, const RMat& y) {
            return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
        };
        auto vec_eq = [](const RVec& x, const RVec& y) {
            return x.size() == y.size() && x == y;
        };
        return a.n == b.n && mat_eq(a.F, b.F) && mat_eq(a.G, b.G) && mat_eq(a.A, b.A) &&
               mat_eq(a.B, b.B) && vec_eq(a.delta, b.delta) && a.gamma == b.gamma &&
               a.boundary == b.boundary && a.op == b.op && a.mode == b.mode &&
               a.output == b.output;
    }
};

namespace detail {

inline bool valid_mode(const std::string& m) {
    return m == "ivp" || m == "bvp" || m == "green-ivp" || m == "green-bvp" || m == "basis" ||
           m == "reduce" || m == "verify";
}

inline std::vector<double> parse_number_list(const std::string& text, long line) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end == nullptr || *end != '\0')
            throw ParseError("problem file: bad number '" + tok + "'", line);
        out.push_back(v);
    }
    return out;
}

inline std::vector<Rational> parse_rational_list(const std::string& text, long line) {
    std::vector<Rational> out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        try {
            out.push_back(parse_rational(tok));
        } catch (const InvalidInputError& e) {
            throw ParseError(std::string("problem file: ") + e.what(), line);
        }
    }
    return out;
}

inline RMat to_matrix(const std::vector<double>& vals, int n, const std::string& key, long line) {
    if (static_cast<int>(vals.size()) != n * n)
        throw ParseError("problem file: " + key + " needs " + std::to_string(n * n) +
                             " entries, got " + std::to_string(vals.size()),
                         line);
    RMat m(n, n);
    for (int i = 0; i < n * n; ++i) m(i / n, i % n) = vals[static_cast<std::size_t>(i)];
    return m;
}

inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

// Flat sectioned key-value format. Sections: [system] (n, F, G, A, B, delta,
// mode), [operator] (a, b, delta, mode), [forcing] (one gamma line per
// component), [boundary] (C, K, T), [output] (t_min, t_max, points, tol,
// grid_s). '#' starts a comment; matrices are whitespace-separated row-major.
inline ProblemSpec parse_problem(const std::string& text) {
    ProblemSpec spec;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    long line_no = 0;

    struct Pending {
        std::optional<std::vector<double>> F, G, A, B, C, K, delta;
        std::optional<double> T;
    } pending;
    std::optional<OperatorSpec> op;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("problem file: malformed section header", line_no);
            section = line.substr(1, line.size() - 2);
            if (section != "system" && section != "operator" && section != "forcing" &&
                section != "boundary" && section != "output")
                throw ParseError("problem file: unknown section [" + section + "]", line_no);
            if (section == "operator" && !op) op = OperatorSpec{};
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("problem file: expected 'key = value'", line_no);
        std::string key = line.substr(0, eq);
        if (auto klast = key.find_last_not_of(" \t"); klast != std::string::npos)
            key.erase(klast + 1);
        std::string value = line.substr(eq + 1);
        if (auto vfirst = value.find_first_not_of(" \t"); vfirst != std::string::npos)
            value = value.substr(vfirst);
        else
            value.clear();

        auto scalar = [&]() -> double {
            auto vals = detail::parse_number_list(value, line_no);
            if (vals.size() != 1)
                throw ParseError("problem file: " + key + " expects one number", line_no);
            return vals[0];
        };

        if (section == "system") {
            if (key == "n") {
                double v = scalar();
                spec.n = static_cast<int>(v);
                if (spec.n < 1 || spec.n > kMaxDim || v != spec.n)
                    throw ParseError("problem file: n must be a small positive integer", line_no);
            } else if (key == "F" || key == "G" || key == "A" || key == "B") {
                auto vals = detail::parse_number_list(value, line_no);
                (key == "F"   ? pending.F
                 : key == "G" ? pending.G
                 : key == "A" ? pending.A
                              : pending.B) = vals;
            } else if (key == "delta") {
                pending.delta = detail::parse_number_list(value, line_no);
            } else if (key == "mode") {
                if (!detail::valid_mode(value))
                    throw ParseError("problem file: unknown mode '" + value + "'", line_no);
                spec.mode = value;
            } else {
                throw ParseError("problem file: unknown key '" + key + "' in [system]", line_no);
            }
        } else if (section == "operator") {
            if (key == "a")
                op->a = detail::parse_rational_list(value, line_no);
            else if (key == "b")
                op->b = detail::parse_rational_list(value, line_no);
            else if (key == "delta")
                pending.delta = detail::parse_number_list(value, line_no);
            else if (key == "mode") {
                if (!detail::valid_mode(value))
                    throw ParseError("problem file: unknown mode '" + value + "'", line_no);
                spec.mode = value;
            } else
                throw ParseError("problem file: unknown key '" + key + "' in [operator]", line_no);
        } else if (section == "forcing") {
            if (key != "gamma")
                throw ParseError("problem file: [forcing] accepts only gamma lines", line_no);
            try {
                (void)Expression::parse(value);
            } catch (const ParseError& e) {
                throw ParseError("problem file line " + std::to_string(line_no) + ": " + e.what(),
                                 line_no);
            }
            spec.gamma.push_back(value);
        } else if (section == "boundary") {
            if (key == "C")
                pending.C = detail::parse_number_list(value, line_no);
            else if (key == "K")
                pending.K = detail::parse_number_list(value, line_no);
            else if (key == "T")
                pending.T = scalar();
            else
                throw ParseError("problem file: unknown key '" + key + "' in [boundary]", line_no);
        } else if (section == "output") {
            if (key == "t_min")
                spec.output.t_min = scalar();
            else if (key == "t_max")
                spec.output.t_max = scalar();
            else if (key == "tol")
                spec.output.tol = scalar();
            else if (key == "points")
                spec.output.points = static_cast<int>(scalar());
            else if (key == "grid_s")
                spec.output.grid_s = static_cast<int>(scalar());
            else
                throw ParseError("problem file: unknown key '" + key + "' in [output]", line_no);
        } else {
            throw ParseError("problem file: key outside any section", line_no);
        }
    }

    if (spec.n > 0 && op)
        throw ParseError("problem file: give either [system] or [operator], not both", 0);
    if (spec.n > 0) {
        auto need = [&](const std::optional<std::vector<double>>& v,
                        const char* key) -> const std::vector<double>& {
            if (!v)
                throw ParseError(std::string("problem file: [system] is missing ") + key, 0);
            return *v;
        };
        spec.F = detail::to_matrix(need(pending.F, "F"), spec.n, "F", 0);
        spec.G = detail::to_matrix(need(pending.G, "G"), spec.n, "G", 0);
        spec.A = detail::to_matrix(need(pending.A, "A"), spec.n, "A", 0);
        spec.B = detail::to_matrix(need(pending.B, "B"), spec.n, "B", 0);
    } else if (!op) {
        if (pending.F || pending.G || pending.A || pending.B)
            throw ParseError("problem file: [system] requires n before matrices", 0);
        throw ParseError("problem file: needs a [system] or [operator] section", 0);
    }
    if (op) {
        if (op->a.empty() && op->b.empty())
            throw ParseError("problem file: [operator] needs a or b coefficients", 0);
        spec.op = std::move(op);
    }

    int dim = spec.n > 0 ? spec.n
                         : std::max(spec.op->to_operator().order(), 1);
    if (pending.delta) {
        if (static_cast<int>(pending.delta->size()) != dim)
            throw ParseError("problem file: delta needs " + std::to_string(dim) + " entries", 0);
        spec.delta = Eigen::Map<const RVec>(pending.delta->data(), dim);
    } else {
        spec.delta = RVec::Zero(dim);
    }

    if (pending.C || pending.K || pending.T) {
        if (!pending.C || !pending.K || !pending.T)
            throw ParseError("problem file: [boundary] needs C, K and T", 0);
        BoundarySpec b;
        int bn = spec.n > 0 ? spec.n : dim;
        b.C = detail::to_matrix(*pending.C, bn, "C", 0);
        b.K = detail::to_matrix(*pending.K, bn, "K", 0);
        b.T = *pending.T;
        if (!(b.T > 0.0)) throw ParseError("problem file: T must be positive", 0);
        spec.boundary = std::move(b);
    }
    return spec;
}

inline std::string write_problem(const ProblemSpec& spec) {
    std::ostringstream out;
    auto emit_matrix = [&](const char* key, const RMat& m) {
        out << key << " =";
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) out << " " << detail::fmt17(m(i, j));
        out << "\n";
    };
    if (spec.n > 0) {
        out << "[system]\n";
        out << "n = " << spec.n << "\n";
        emit_matrix("F", spec.F);
        emit_matrix("G", spec.G);
        emit_matrix("A", spec.A);
        emit_matrix("B", spec.B);
    } else if (spec.op) {
        out << "[operator]\n";
        auto emit_rationals = [&](const char* key, const std::vector<Rational>& v) {
            out << key << " =";
            for (const auto& r : v) out << " " << to_string(r);
            out << "\n";
        };
        emit_rationals("a", spec.op->a);
        emit_rationals("b", spec.op->b);
    }
    if (spec.delta.size() > 0) {
        out << "delta =";
        for (Eigen::Index i = 0; i < spec.delta.size(); ++i)
            out << " " << detail::fmt17(spec.delta[i]);
        out << "\n";
    }
    if (!spec.mode.empty()) out << "mode = " << spec.mode << "\n";
    if (spec.n > 0 && spec.op) {
        // unreachable by parse_problem; kept so hand-built specs round-trip loudly
        throw InvalidInputError("write_problem: spec has both system and operator");
    }
    if (!spec.gamma.empty()) {
        out << "\n[forcing]\n";
        for (const auto& g : spec.gamma) out << "gamma = " << g << "\n";
    }
    if (spec.boundary) {
        out << "\n[boundary]\n";
        emit_matrix("C", spec.boundary->C);
        emit_matrix("K", spec.boundary->K);
        out << "T = " << detail::fmt17(spec.boundary->T) << "\n";
    }
    if (spec.output.t_min || spec.output.t_max || spec.output.points || spec.output.tol ||
        spec.output.grid_s) {
        out << "\n[output]\n";
        if (spec.output.t_min) out << "t_min = " << detail::fmt17(*spec.output.t_min) << "\n";
        if (spec.output.t_max) out << "t_max = " << detail::fmt17(*spec.output.t_max) << "\n";
        if (spec.output.points) out << "points = " << *spec.output.points << "\n";
        if (spec.output.tol) out << "tol = " << detail::fmt17(*spec.output.tol) << "\n";
        if (spec.output.grid_s) out << "grid_s = " << *spec.output.grid_s << "\n";
    }
    return out.str();
}

// Compiles the gamma expression list into an evaluator of the given dimension.
inline ForcingFunction forcing_from_spec(const ProblemSpec& spec, int dim) {
    if (spec.gamma.empty()) return zero_forcing(dim);
    std::vector<Expression> exprs;
    exprs.reserve(spec.gamma.size());
    for (const auto& src : spec.gamma) exprs.push_back(Expression::parse(src));
    std::string desc;
    for (const auto& g : spec.gamma) desc += (desc.empty() ? "" : "; ") + g;

    if (spec.n == 0 && spec.op) {
        // scalar forcing enters the companion system through its last row
        if (exprs.size() != 1)
            throw InvalidInputError("operator problems take exactly one gamma expression");
        Expression h = exprs[0];
        return {[h, dim](double t) {
                    RVec v = RVec::Zero(dim);
                    v[dim - 1] = h.eval(t);
                    return v;
                },
                desc};
    }
    if (static_cast<int>(exprs.size()) != dim)
        throw InvalidInputError("forcing needs one gamma expression per component");
    return {[exprs, dim](double t) {
                RVec v(dim);
                for (int i = 0; i < dim; ++i) v[i] = exprs[static_cast<std::size_t>(i)].eval(t);
                return v;
            },
            desc};
}

} // namespace refl
