// Command-line front end: krein <command> [options]
#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>

#include "acceptance.hpp"
#include "krein/accelerant.hpp"
#include "krein/krein_ode.hpp"
#include "krein/scattering.hpp"
#include "krein/spectral.hpp"
#include "krein/zeros.hpp"

using namespace krein;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kOutEnv = "KREIN_OUTPUT_DIR";

struct RunConfig {
    std::optional<double> step;  // unset: the step of the input grid
    double lambda_min = -200.0, lambda_max = 200.0;
    std::size_t lambda_count = 40001;
    std::map<std::string, double> tol{{"det", 1e-8}, {"j", 1e-7}, {"tail", 5e-3}};
    std::string out_dir = ".";
    bool lambda_explicit = false;  // inverse picks its own lambda step otherwise

    Grid1D lambda_grid() const { return Grid1D::span(lambda_min, lambda_max, lambda_count - 1); }
    double lambda_step() const { return (lambda_max - lambda_min) / static_cast<double>(lambda_count - 1); }

    ode::Options ode(ode::Method m = ode::Method::rk4) const {
        ode::Options o;
        o.method = m;
        o.det_tol = tol.at("det");
        o.j_tol = tol.at("j");
        return o;
    }

    void validate() const {
        if (step && !(*step > 0)) fail(ErrorKind::usage, "step must be positive");
        if (lambda_count < 2) fail(ErrorKind::usage, "lambda grid needs at least 2 points");
        if (!(lambda_max > lambda_min)) fail(ErrorKind::usage, "lambda grid needs min < max");
        for (const auto& [k, v] : tol)
            if (!(v > 0)) fail(ErrorKind::usage, "tolerance '" + k + "' must be positive");
    }

    json to_json(double resolved_step) const {
        json j;
        j["step"] = step ? *step : resolved_step;
        j["lambda_grid"] = {{"min", lambda_min}, {"max", lambda_max}, {"count", lambda_count}};
        j["tolerances"] = tol;
        j["output_dir"] = out_dir;
        return j;
    }
};

void set_tol(RunConfig& c, const std::string& name, double v) {
    if (!c.tol.count(name)) fail(ErrorKind::usage, "unknown tolerance '" + name + "' (det, j, tail)");
    c.tol[name] = v;
}

void apply_file(RunConfig& c, const std::string& path) {
    json j;
    try {
        j = json::parse(slurp(path));
        if (j.contains("step")) c.step = j["step"].get<double>();
        if (j.contains("lambda_grid")) {
            const auto& g = j["lambda_grid"];
            c.lambda_min = g.at("min").get<double>();
            c.lambda_max = g.at("max").get<double>();
            c.lambda_count = g.at("count").get<std::size_t>();
            c.lambda_explicit = true;
        }
        if (j.contains("tolerances"))
            for (const auto& [k, v] : j["tolerances"].items()) set_tol(c, k, v.get<double>());
        if (j.contains("output_dir")) c.out_dir = j["output_dir"].get<std::string>();
    } catch (const json::exception& e) {
        fail(ErrorKind::format, "config " + path + ": " + e.what());
    }
}

std::vector<double> split_numbers(const std::string& s, std::size_t n, const std::string& what) {
    std::vector<double> v;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto comma = s.find(',', pos);
        const auto tok = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
            v.push_back(parse_number(tok));
        } catch (const Error&) {
            fail(ErrorKind::usage, what + ": bad number '" + tok + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (v.size() != n) fail(ErrorKind::usage, what + " expects " + std::to_string(n) + " comma-separated numbers");
    return v;
}

std::string fmt_c(cplx z) { return fmt_double(z.real()) + (z.imag() < 0 ? " - " : " + ") + fmt_double(std::abs(z.imag())) + "i"; }

ode::Method parse_method(const std::string& m) {
    if (m == "rk4") return ode::Method::rk4;
    if (m == "magnus4") return ode::Method::magnus4;
    if (m == "product") return ode::Method::product;
    fail(ErrorKind::usage, "unknown method '" + m + "'");
}

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::usage: return 1;
        case ErrorKind::format: return 2;
        case ErrorKind::numeric:
        case ErrorKind::range: return 3;
        case ErrorKind::domain: return 4;
    }
    return 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Krein systems: transfer matrices, accelerants, spectral data, zeros and scattering"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_file, lambda_grid_s, out_dir;
    std::vector<std::string> tol_s;
    std::optional<double> step;
    app.add_option("--config", config_file, "JSON config file; flags take precedence");
    app.add_option("--step", step, "step h");
    app.add_option("--lambda-grid", lambda_grid_s, "min,max,count");
    app.add_option("--tol", tol_s, "name=value (det, j, tail)");
    app.add_option("--out", out_dir, std::string("output directory (default $") + kOutEnv + " or .)");

    std::string coef, accel_file, symbol, logdens, lambda_s, box_s, method = "magnus4", suite = "all", fixtures;
    double r = 0.0;
    bool discrete = false, dense = false, unit_diag = false;
    std::vector<double> radii;

    auto* propagate = app.add_subcommand("propagate", "transfer matrix and polynomials at (r, lambda)");
    propagate->add_option("--coef", coef, "coefficient CSV")->required();
    propagate->add_option("--r", r, "radius")->required();
    propagate->add_option("--lambda", lambda_s, "re,im or re")->required();
    propagate->add_option("--method", method, "magnus4 (default) | rk4 | product");

    auto* forward = app.add_subcommand("forward", "coefficient from an accelerant");
    forward->add_option("--accelerant", accel_file, "accelerant CSV")->required();
    forward->add_flag("--dense", dense, "dense Cholesky solves instead of Levinson");
    forward->add_flag("--unit-diagonal", unit_diag, "keep 1 on the discretized diagonal");

    auto* inverse = app.add_subcommand("inverse", "accelerant from a coefficient");
    inverse->add_option("--coef", coef, "coefficient CSV")->required();
    inverse->add_flag("--discrete", discrete, "exact inverse of the forward discretization");

    auto* measure = app.add_subcommand("measure", "Bernstein-Szego density on the lambda grid");
    measure->add_option("--coef", coef, "coefficient CSV")->required();
    measure->add_option("--r", r, "radius")->required();

    auto* szego = app.add_subcommand("szego", "strong Szego report");
    szego->add_option("--coef", coef, "coefficient CSV")->required();
    szego->add_option("--accelerant", accel_file, "accelerant CSV for the eigenvalue determinant");
    szego->add_option("--logdensity", logdens, "log-density CSV on a symmetric grid");
    szego->add_option("--radii", radii, "radii for T_r")->delimiter(',');

    auto* zeros_cmd = app.add_subcommand("zeros", "zeros of P(r, .) in a box");
    zeros_cmd->add_option("--coef", coef, "coefficient CSV")->required();
    zeros_cmd->add_option("--r", r, "radius")->required();
    zeros_cmd->add_option("--box", box_s, "x0,x1,y0,y1")->required();

    auto* scatter_cmd = app.add_subcommand("scatter", "Dirac scattering data on the lambda grid");
    scatter_cmd->add_option("--coef", coef, "coefficient CSV")->required();

    auto* invscatter = app.add_subcommand("invscatter", "coefficient from the transformed symbol D");
    invscatter->add_option("--symbol", symbol, "D CSV on [0, X]")->required();

    auto* verify = app.add_subcommand("verify", "acceptance suite");
    verify->add_option("--suite", suite, "core | identities | bridges | all");
    verify->add_option("--fixtures", fixtures, "fixture directory (generated in memory if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg;
        if (const char* env = std::getenv(kOutEnv); env && *env) cfg.out_dir = env;
        if (!config_file.empty()) apply_file(cfg, config_file);
        if (step) cfg.step = step;
        if (!lambda_grid_s.empty()) {
            const auto g = split_numbers(lambda_grid_s, 3, "--lambda-grid");
            if (g[2] < 2 || g[2] != std::floor(g[2])) fail(ErrorKind::usage, "lambda grid count must be an integer >= 2");
            cfg.lambda_min = g[0];
            cfg.lambda_max = g[1];
            cfg.lambda_count = static_cast<std::size_t>(g[2]);
            cfg.lambda_explicit = true;
        }
        for (const auto& t : tol_s) {
            const auto eq = t.find('=');
            if (eq == std::string::npos) fail(ErrorKind::usage, "--tol expects name=value");
            set_tol(cfg, t.substr(0, eq), split_numbers(t.substr(eq + 1), 1, "--tol")[0]);
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        cfg.validate();

        auto out = [&](const std::string& name) {
            fs::create_directories(cfg.out_dir);
            return (fs::path(cfg.out_dir) / name).string();
        };
        auto echo = [&](double resolved_step) { std::cout << "config " << cfg.to_json(resolved_step).dump() << "\n"; };
        auto load_coef = [&] { return read_sampled(coef); };

        if (*propagate) {
            auto A = load_coef();
            echo(A.grid().step);
            if (cfg.step) A = accel::resample(A, *cfg.step);
            const auto l = split_numbers(lambda_s, lambda_s.find(',') == std::string::npos ? 1 : 2, "--lambda");
            const cplx lambda(l[0], l.size() > 1 ? l[1] : 0.0);
            const auto opt = cfg.ode(parse_method(method));
            const auto t = ode::propagate(A, r, lambda, opt);
            const auto p = ode::polys(t.X);
            std::cout << "r " << fmt_double(r) << "\nlambda " << fmt_c(lambda) << "\n";
            for (int i = 0; i < 2; ++i)
                std::cout << "X" << i + 1 << "1 " << fmt_c(t.X(i, 0)) << "\nX" << i + 1 << "2 " << fmt_c(t.X(i, 1)) << "\n";
            std::cout << "P " << fmt_c(p.P) << "\nP* " << fmt_c(p.P_star) << "\nP^ " << fmt_c(p.P_hat) << "\nP^* "
                      << fmt_c(p.P_hat_star) << "\n";
            std::cout << "det_residual " << fmt_double(t.det_residual()) << "\nj_residual " << fmt_double(t.j_residual()) << "\n";
            ode::check_invariants(t, opt);
        } else if (*forward) {
            const auto H = read_sampled(accel_file);
            echo(H.grid().step);
            accel::HToAOptions o;
            o.solver = dense ? accel::Solver::dense : accel::Solver::levinson;
            o.unit_diagonal = unit_diag;
            const auto A = cfg.step ? accel::h_to_a(H, *cfg.step, o) : accel::h_to_a(H, o);
            write_sampled(out("A.csv"), A);
            std::cout << "wrote " << out("A.csv") << " (" << A.size() << " points)\n";
        } else if (*inverse) {
            auto A = load_coef();
            echo(A.grid().step);
            if (cfg.step) A = accel::resample(A, *cfg.step);
            SampledFunction H;
            if (discrete) {
                H = accel::a_to_h_discrete(A);
            } else {
                accel::AToHOptions o;
                o.lambda_max = std::max(std::abs(cfg.lambda_min), std::abs(cfg.lambda_max));
                if (cfg.lambda_explicit) o.lambda_step = cfg.lambda_step();
                o.tail_tolerance = cfg.tol.at("tail");
                const auto res = accel::a_to_h_detailed(A, o);
                H = res.H;
                if (res.truncated)
                    std::cerr << "warning: symbol tail " << fmt_double(res.tail) << " above tolerance; widen the lambda grid\n";
            }
            write_sampled(out("H.csv"), H);
            std::cout << "wrote " << out("H.csv") << " (" << H.size() << " points)\n";
        } else if (*measure) {
            const auto A = load_coef();
            echo(A.grid().step);
            const auto m = spectral::bernstein_szego_density(A, r, cfg.lambda_grid(), cfg.ode(ode::Method::magnus4));
            write_measure(out("density.csv"), out("masses.csv"), m);
            std::cout << "wrote " << out("density.csv") << " and " << out("masses.csv") << "\n";
        } else if (*szego) {
            const auto A = load_coef();
            echo(A.grid().step);
            spectral::StrongSzegoInput in;
            in.A = A;
            SampledFunction H, l;
            if (!accel_file.empty()) {
                H = read_sampled(accel_file);
                in.H = &H;
            }
            if (!logdens.empty()) {
                l = read_sampled(logdens);
                in.l = &l;
            }
            in.T_radii = radii;
            const auto text = spectral::format_report(spectral::strong_szego(in));
            spit(out("szego.txt"), text);
            std::cout << text;
        } else if (*zeros_cmd) {
            const auto A = load_coef();
            echo(A.grid().step);
            const auto b = split_numbers(box_s, 4, "--box");
            const auto z = zeros::find_zeros(A, r, {b[0], b[1], b[2], b[3]}, cfg.ode());
            spit(out("zeros.csv"), zeros::format_zeros(z));
            std::cout << "found " << z.zeros.size() << " zeros; wrote " << out("zeros.csv") << "\n";
        } else if (*scatter_cmd) {
            const auto A = load_coef();
            echo(A.grid().step);
            const auto s = scatter::scattering_data_dirac(A, cfg.lambda_grid(), cfg.ode(ode::Method::magnus4));
            const double res = s.energy_residual();
            scatter::write_scattering(out("scatter"), s);
            std::cout << "energy_residual " << fmt_double(res) << "\nwrote " << out("scatter_manifest.json") << "\n";
            if (res > cfg.tol.at("det")) fail(ErrorKind::numeric, "energy identity |A|^2 - |B|^2 = 1 violated by " + fmt_double(res));
        } else if (*invscatter) {
            const auto D = read_sampled(symbol);
            echo(D.grid().step);
            std::cout << "hankel_norm " << fmt_double(scatter::hankel_norm(D)) << "\n";
            const auto A = scatter::hankel_inverse_scattering(D);
            write_sampled(out("A_recovered.csv"), A);
            std::cout << "wrote " << out("A_recovered.csv") << " (" << A.size() << " points)\n";
        } else if (*verify) {
            echo(cfg.step.value_or(1e-3));
            const auto s = acceptance::parse_suite(suite);
            const auto f = fixtures.empty() ? acceptance::Fixtures::generate() : acceptance::Fixtures::load(fixtures);
            int failed = 0;
            for (const auto& o : acceptance::run(f, s)) {
                std::cout << acceptance::format_line(o) << std::endl;
                failed += !o.pass;
            }
            return failed ? 3 : 0;
        }
    } catch (const accel::PositivityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
