// Command-line front end for the reflection-system solvers: reads a sectioned
// problem file, dispatches to the requested solver, writes CSV or tables.
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "refl/errors.hpp"
#include "refl/green.hpp"
#include "refl/opalg.hpp"
#include "refl/oracle.hpp"
#include "refl/problem.hpp"
#include "refl/sysfun.hpp"
#include "refl/varpar.hpp"

namespace {

struct Options {
    std::string input;
    std::string output;
    std::optional<double> t_min, t_max, tol;
    std::optional<int> points, grid_s;
};

// Flag beats file beats fallback.
template <typename T>
T pick(const std::optional<T>& flag, const std::optional<T>& file, T fallback) {
    if (flag) return *flag;
    if (file) return *file;
    return fallback;
}

std::vector<double> linspace(double lo, double hi, int m) {
    if (m < 1) throw refl::InvalidInputError("grid needs at least one point");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(m));
    if (m == 1) {
        out.push_back(lo);
        return out;
    }
    double step = (hi - lo) / (m - 1);
    for (int i = 0; i < m; ++i) out.push_back(i + 1 == m ? hi : lo + step * i);
    return out;
}

// Problem data lowered to first-order form. Scalar operator problems run
// through the companion system; `scalar` marks that only the first state
// component (and the kernel entry feeding it) is reported.
struct Runtime {
    refl::ProblemSpec spec;
    std::unique_ptr<refl::ReflectionSystem> sys;
    refl::ForcingFunction gamma;
    refl::RVec delta;
    bool scalar = false;
};

Runtime load_runtime(const std::string& path, bool need_system) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw refl::InvalidInputError("cannot open input file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();

    Runtime rt;
    rt.spec = refl::parse_problem(buf.str());
    rt.delta = rt.spec.delta;
    if (rt.spec.n > 0) {
        rt.sys = std::make_unique<refl::ReflectionSystem>(rt.spec.F, rt.spec.G, rt.spec.A,
                                                          rt.spec.B);
        rt.gamma = refl::forcing_from_spec(rt.spec, rt.spec.n);
    } else if (need_system) {
        rt.scalar = true;
        rt.sys = std::make_unique<refl::ReflectionSystem>(
            refl::companion_system(rt.spec.op->to_operator()));
        rt.gamma = refl::forcing_from_spec(rt.spec, rt.sys->dim());
    }
    return rt;
}

class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw refl::InvalidInputError("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void write_row(std::ostream& out, const std::vector<double>& vals) {
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i) out << ",";
        out << refl::detail::fmt17(vals[i]);
    }
    out << "\n";
}

std::string solution_header(int n) {
    std::string h = "t";
    for (int i = 1; i <= n; ++i) h += ",u" + std::to_string(i);
    return h;
}

std::string kernel_header(int n) {
    std::string h = "t,s";
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            h += ",G" + std::to_string(i) + std::to_string(j);
    return h;
}

const refl::BoundarySpec& require_boundary(const Runtime& rt) {
    if (!rt.spec.boundary)
        throw refl::InvalidInputError("this mode needs a [boundary] section (C, K, T)");
    return *rt.spec.boundary;
}

std::vector<double> time_grid(const Runtime& rt, const Options& opt, bool bvp_mode) {
    double lo_default = -2.0, hi_default = 2.0;
    if (bvp_mode) {
        double T = require_boundary(rt).T;
        lo_default = -T;
        hi_default = T;
    }
    double lo = pick(opt.t_min, rt.spec.output.t_min, lo_default);
    double hi = pick(opt.t_max, rt.spec.output.t_max, hi_default);
    if (!(lo <= hi)) throw refl::InvalidInputError("t-min must not exceed t-max");
    int m = pick(opt.points, rt.spec.output.points, 201);
    return linspace(lo, hi, m);
}

double quad_tol(const Runtime& rt, const Options& opt) {
    return pick(opt.tol, rt.spec.output.tol, 1e-10);
}

void emit_solution(std::ostream& out, const Runtime& rt, const std::vector<double>& ts,
                   const std::function<refl::RVec(double)>& solve) {
    int report = rt.scalar ? 1 : rt.sys->dim();
    out << solution_header(report) << "\n";
    for (double t : ts) {
        refl::RVec u = solve(t);
        std::vector<double> row{t};
        for (int i = 0; i < report; ++i) row.push_back(u[i]);
        write_row(out, row);
    }
}

void emit_kernel(std::ostream& out, const Runtime& rt, const std::vector<double>& ts,
                 const std::vector<double>& ss,
                 const std::function<refl::RMat(double, double)>& kernel) {
    int n = rt.sys->dim();
    int report = rt.scalar ? 1 : n;
    out << kernel_header(report) << "\n";
    for (double t : ts) {
        for (double s : ss) {
            refl::RMat g = kernel(t, s);
            std::vector<double> row{t, s};
            if (rt.scalar) {
                row.push_back(g(0, n - 1));
            } else {
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) row.push_back(g(i, j));
            }
            write_row(out, row);
        }
    }
}

void emit_coeff_line(std::ostream& out, const char* key, const refl::RationalPoly& p) {
    out << key << " =";
    if (p.is_zero()) {
        out << " 0";
    } else {
        for (int k = 0; k <= p.degree(); ++k) out << " " << refl::to_string(p.coeff(k));
    }
    out << "\n";
}

int run_solve_ivp(const Options& opt) {
    Runtime rt = load_runtime(opt.input, true);
    Sink sink(opt.output);
    auto ts = time_grid(rt, opt, false);
    double tol = quad_tol(rt, opt);
    emit_solution(sink.stream(), rt, ts, [&](double t) {
        return refl::solve_ivp(*rt.sys, rt.gamma, rt.delta, t, tol);
    });
    return 0;
}

int run_solve_bvp(const Options& opt) {
    Runtime rt = load_runtime(opt.input, true);
    const auto& b = require_boundary(rt);
    Sink sink(opt.output);
    auto ts = time_grid(rt, opt, true);
    double tol = quad_tol(rt, opt);
    refl::GreenBvp green(*rt.sys, b.C, b.K, b.T);
    emit_solution(sink.stream(), rt, ts, [&](double t) {
        return refl::solve_bvp(green, rt.gamma, rt.delta, t, tol);
    });
    return 0;
}

int run_green_ivp(const Options& opt) {
    Runtime rt = load_runtime(opt.input, true);
    Sink sink(opt.output);
    auto ts = time_grid(rt, opt, false);
    auto ss = linspace(ts.front(), ts.back(), pick(opt.grid_s, rt.spec.output.grid_s, 21));
    refl::GreenIvp green(*rt.sys);
    emit_kernel(sink.stream(), rt, ts, ss, [&](double t, double s) { return green(t, s); });
    return 0;
}

int run_green_bvp(const Options& opt) {
    Runtime rt = load_runtime(opt.input, true);
    const auto& b = require_boundary(rt);
    Sink sink(opt.output);
    auto ts = time_grid(rt, opt, true);
    auto ss = linspace(ts.front(), ts.back(), pick(opt.grid_s, rt.spec.output.grid_s, 21));
    refl::GreenBvp green(*rt.sys, b.C, b.K, b.T);
    emit_kernel(sink.stream(), rt, ts, ss, [&](double t, double s) { return green(t, s); });
    return 0;
}

const refl::OperatorSpec& require_operator(const Runtime& rt) {
    if (!rt.spec.op)
        throw refl::InvalidInputError("this mode needs an [operator] section (a, b)");
    return *rt.spec.op;
}

int run_basis(const Options& opt) {
    Runtime rt = load_runtime(opt.input, false);
    refl::ReflectionOperator op = require_operator(rt).to_operator();
    Sink sink(opt.output);
    for (const auto& f : refl::solution_basis(op)) sink.stream() << f.to_string() << "\n";
    return 0;
}

int run_reduce(const Options& opt) {
    Runtime rt = load_runtime(opt.input, false);
    refl::ReflectionOperator op = require_operator(rt).to_operator();
    Sink sink(opt.output);
    std::ostream& out = sink.stream();

    auto [lhat, r] = refl::refined_reduction(op);
    refl::RationalPoly composed = refl::composed_coefficients(op);
    refl::RationalPoly q_reduced = -lhat.Q.reflected();
    refl::ReflectionOperator purely = refl::compose(lhat, op);

    emit_coeff_line(out, "P", op.P);
    emit_coeff_line(out, "Q", op.Q);
    emit_coeff_line(out, "composed", composed);
    emit_coeff_line(out, "R", r);
    emit_coeff_line(out, "P_reduced", lhat.P);
    emit_coeff_line(out, "Q_reduced", q_reduced);
    emit_coeff_line(out, "composed_reduced", purely.Q);
    return 0;
}

int run_verify(const Options& opt) {
    Runtime rt = load_runtime(opt.input, true);
    Sink sink(opt.output);
    double tol = quad_tol(rt, opt);
    bool bvp_mode = rt.spec.mode == "bvp" || rt.spec.mode == "green-bvp";

    std::function<refl::RVec(double)> u;
    std::vector<double> ts;
    if (bvp_mode) {
        const auto& b = require_boundary(rt);
        auto green = std::make_shared<refl::GreenBvp>(*rt.sys, b.C, b.K, b.T);
        u = [rtp = &rt, green, tol](double t) {
            return refl::solve_bvp(*green, rtp->gamma, rtp->delta, t, tol);
        };
        // keep the centered difference stencil inside [-T, T]
        double margin = 1e-4 * (1.0 + b.T);
        double lo = pick(opt.t_min, rt.spec.output.t_min, -b.T + margin);
        double hi = pick(opt.t_max, rt.spec.output.t_max, b.T - margin);
        ts = linspace(lo, hi, pick(opt.points, rt.spec.output.points, 41));
    } else {
        u = [rtp = &rt, tol](double t) {
            return refl::solve_ivp(*rtp->sys, rtp->gamma, rtp->delta, t, tol);
        };
        double lo = pick(opt.t_min, rt.spec.output.t_min, -2.0);
        double hi = pick(opt.t_max, rt.spec.output.t_max, 2.0);
        ts = linspace(lo, hi, pick(opt.points, rt.spec.output.points, 41));
    }

    double worst = refl::residual(*rt.sys, rt.gamma, u, ts);
    sink.stream() << "max_residual = " << refl::detail::fmt17(worst) << "\n";
    return 0;
}

void add_common_flags(CLI::App* cmd, Options& opt, bool with_grid_s) {
    cmd->add_option("--input", opt.input, "problem file")->required();
    cmd->add_option("--output", opt.output, "output file (default stdout)");
    cmd->add_option("--t-min", opt.t_min, "grid start");
    cmd->add_option("--t-max", opt.t_max, "grid end");
    cmd->add_option("--points", opt.points, "grid size");
    cmd->add_option("--tol", opt.tol, "quadrature tolerance");
    if (with_grid_s) cmd->add_option("--grid-s", opt.grid_s, "second-argument grid size");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"solver for linear differential systems with reflected argument"};
    app.require_subcommand(1);

    Options opt;
    struct Mode {
        const char* name;
        const char* help;
        bool grid_s;
        int (*fn)(const Options&);
    };
    const Mode modes[] = {
        {"solve-ivp", "solve the initial value problem over a time grid", false, run_solve_ivp},
        {"solve-bvp", "solve the two-point boundary value problem", false, run_solve_bvp},
        {"green-ivp", "tabulate the initial value Green kernel", true, run_green_ivp},
        {"green-bvp", "tabulate the boundary value Green kernel", true, run_green_bvp},
        {"basis", "print a homogeneous solution basis for a scalar operator", false, run_basis},
        {"reduce", "print reduction coefficient tables for a scalar operator", false, run_reduce},
        {"verify", "solve, then print the max equation residual", false, run_verify},
    };
    const Mode* chosen = nullptr;
    for (const auto& m : modes) {
        CLI::App* cmd = app.add_subcommand(m.name, m.help);
        add_common_flags(cmd, opt, m.grid_s);
        cmd->callback([&chosen, &m]() { chosen = &m; });
    }

    try {
        app.parse(argc, argv);
        return chosen->fn(opt);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const refl::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return 2;
    } catch (const refl::InvalidInputError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return 2;
    } catch (const refl::UnsolvableBvpError& e) {
        std::cerr << "error: unsolvable-bvp: " << e.what() << "\n";
        return 3;
    } catch (const refl::SingularPathError& e) {
        std::cerr << "error: singular-path: " << e.what() << "\n";
        return 4;
    } catch (const refl::Error& e) {
        std::cerr << "error: numerical: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: numerical: " << e.what() << "\n";
        return 5;
    }
}
