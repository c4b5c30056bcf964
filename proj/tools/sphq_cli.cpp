// Command-line front end: runs the library's analyses as named recipes over
// parameter grids and emits plot-ready CSV plus a JSON sidecar with the
// resolved configuration.
//
// Exit codes: 0 success, 2 invalid specification, 3 numerical failure.

#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sphq/montecarlo.hpp"
#include "sphq/radial_json.hpp"
#include "sphq/search.hpp"
#include "sphq/sphq.hpp"

namespace {

using nlohmann::json;

struct CliError {
    int code;
    std::string message;
};

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_cell(double v) { return format_double(v); }
template <class T, std::enable_if_t<std::is_integral_v<T>, int> = 0>
std::string format_cell(T v) {
    return std::to_string(v);
}

template <class... Ts>
std::string csv_row(const Ts&... cells) {
    std::string out;
    bool first = true;
    ((out += (first ? "" : ","), out += format_cell(cells), first = false), ...);
    return out;
}

// "2,8,32" or "2:10:2" (inclusive); single values allowed
template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& key) {
    std::vector<T> out;
    const auto parse_one = [&](const std::string& tok) {
        T v{};
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
            throw CliError{2, "invalid spec: key '" + key + "' has malformed value '" + tok + "'"};
        return v;
    };
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string tok;
        while (std::getline(ss, tok, ':')) parts.push_back(tok);
        if (parts.size() != 3)
            throw CliError{2, "invalid spec: key '" + key + "' range must be lo:hi:step"};
        const T lo = parse_one(parts[0]), hi = parse_one(parts[1]), step = parse_one(parts[2]);
        if (!(step > 0) || hi < lo)
            throw CliError{2, "invalid spec: key '" + key + "' has an empty range"};
        for (T v = lo; v <= hi; v += step) out.push_back(v);
        return out;
    }
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(parse_one(tok));
    if (out.empty()) throw CliError{2, "invalid spec: key '" + key + "' is empty"};
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw CliError{2, "invalid spec: key '" + key + "' has malformed value '" + tok + "'"};
        }
    }
    if (out.empty()) throw CliError{2, "invalid spec: key '" + key + "' is empty"};
    return out;
}

sphq::RadialLaw make_target(const std::string& name, double scale, int d) {
    if (name == "sphere") return sphq::RadialLaw::point_mass(scale, d);
    if (name == "ball") return sphq::RadialLaw::ball_power(scale, d);
    if (name == "normal") return sphq::RadialLaw::scaled_chi(scale, d);
    throw CliError{2, "invalid spec: key '--target' must be sphere, ball or normal"};
}

sphq::QuantiserFamily make_family(const std::string& name, double param, double alpha, int d) {
    if (name == "sphere") return sphq::QuantiserFamily::sphere(param, d);
    if (name == "ball") return sphq::QuantiserFamily::ball(param, d);
    if (name == "normal") return sphq::QuantiserFamily::normal(param, d);
    if (name == "atom-sphere") return sphq::QuantiserFamily::sphere_with_atom(alpha, param, d);
    throw CliError{2, "invalid spec: key '--family' must be sphere, ball, normal or atom-sphere"};
}

unsigned worker_count() {
    if (const char* env = std::getenv("SPHQ_WORKERS")) {
        const int v = std::atoi(env);
        if (v >= 1) return unsigned(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// runs fn over [0, count) on the worker pool; rethrows the first failure
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = std::min<std::size_t>(worker_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
                next.store(count);
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct Output {
    std::string path;
    std::string header;
    std::vector<std::string> comments;
    std::vector<std::string> rows;
    json config;

    void write(double wall_seconds) const {
        if (path.empty()) throw CliError{2, "invalid spec: key '--out' is required"};
        std::ofstream csv(path);
        if (!csv) throw CliError{2, "invalid spec: key '--out' is not writable: " + path};
        csv << "# sphq " << SPHQ_VERSION << "\n";
        for (const auto& c : comments) csv << "# " << c << "\n";
        csv << header << "\n";
        for (const auto& r : rows) csv << r << "\n";
        json sidecar;
        sidecar["config"] = config;
        sidecar["library_version"] = SPHQ_VERSION;
        sidecar["wall_time_seconds"] = wall_seconds;
        sidecar["rows"] = rows.size();
        sidecar["output"] = path;
        std::ofstream side(path + ".json");
        side << sidecar.dump(2) << "\n";
    }
};

struct CommonOpts {
    std::string d_list = "3";
    std::string n_list = "10";
    std::string s_list = "2";
    std::string target = "sphere";
    std::string family = "sphere";
    double target_scale = 1.0;
    double param = 1.0;
    double alpha = 1.0;
    double gamma = 0.5;
    double rel_tol = 1.0e-8;
    std::uint64_t seed = 20240801;
    std::uint64_t n_samples = 100000;
    std::uint64_t n_hi = 4096;
    std::string name;
    std::string out;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--d", o.d_list, "dimension list (comma or lo:hi:step)");
    cmd->add_option("--n", o.n_list, "design size list (comma or lo:hi:step)");
    cmd->add_option("--s", o.s_list, "moment order list (comma separated)");
    cmd->add_option("--target", o.target, "target measure: sphere, ball or normal");
    cmd->add_option("--target-scale", o.target_scale, "radius/scale of the target");
    cmd->add_option("--family", o.family, "quantiser family: sphere, ball, normal, atom-sphere");
    cmd->add_option("--param", o.param, "family parameter (a, b or sigma)");
    cmd->add_option("--alpha", o.alpha, "atom weight for atom-sphere");
    cmd->add_option("--gamma", o.gamma, "quantile order");
    cmd->add_option("--rel-tol", o.rel_tol, "quadrature relative tolerance");
    cmd->add_option("--seed", o.seed, "base seed");
    cmd->add_option("--N", o.n_samples, "Monte-Carlo sample count");
    cmd->add_option("--n-hi", o.n_hi, "crossover search cap");
    cmd->add_option("--name", o.name, "figure name");
    cmd->add_option("--out", o.out, "output CSV path")->required();
}

json resolved_config(const std::string& recipe, const CommonOpts& o) {
    json j;
    j["recipe"] = recipe;
    j["d"] = o.d_list;
    j["n"] = o.n_list;
    j["s"] = o.s_list;
    j["target"] = o.target;
    j["target_scale"] = o.target_scale;
    j["family"] = o.family;
    j["param"] = o.param;
    j["alpha"] = o.alpha;
    j["gamma"] = o.gamma;
    j["rel_tol"] = o.rel_tol;
    j["seed"] = o.seed;
    j["N"] = o.n_samples;
    j["n_hi"] = o.n_hi;
    if (!o.name.empty()) j["name"] = o.name;
    j["workers"] = worker_count();
    return j;
}

sphq::QuadratureConfig quad_of(const CommonOpts& o) {
    sphq::QuadratureConfig q;
    q.rel_tol = o.rel_tol;
    return q;
}

struct GridPoint {
    int d;
    std::uint64_t n;
    double s;
};

std::vector<GridPoint> make_grid(const CommonOpts& o) {
    const auto ds = parse_list<int>(o.d_list, "--d");
    const auto ns = parse_list<std::uint64_t>(o.n_list, "--n");
    const auto ss = parse_double_list(o.s_list, "--s");
    for (int d : ds)
        if (d < 2) throw CliError{2, "invalid spec: key '--d' must be >= 2"};
    for (auto n : ns)
        if (n < 1) throw CliError{2, "invalid spec: key '--n' must be >= 1"};
    std::vector<GridPoint> grid;
    for (int d : ds)
        for (auto n : ns)
            for (double s : ss) grid.push_back({d, n, s});
    return grid;
}

template <class Fn>
void fill_rows(Output& out, const std::vector<GridPoint>& grid, const Fn& fn) {
    out.rows.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        try {
            out.rows[i] = fn(grid[i], i);
        } catch (const sphq::numerical_error& e) {
            std::ostringstream msg;
            msg << "numerical failure at grid point (d=" << grid[i].d << ", n=" << grid[i].n
                << ", s=" << grid[i].s << "): " << e.what();
            throw CliError{3, msg.str()};
        }
    });
}

Output run_distortion(const CommonOpts& o) {
    Output out{o.out, "d,n,s,param,alpha,distortion", {}, {}, resolved_config("distortion", o)};
    fill_rows(out, make_grid(o), [&](const GridPoint& g, std::size_t) {
        sphq::DistortionQuery q{g.d, g.n, g.s, make_target(o.target, o.target_scale, g.d),
                                make_family(o.family, o.param, o.alpha, g.d), quad_of(o)};
        const double v = sphq::expected_distortion(q);
        return csv_row(g.d, g.n, g.s, o.param, o.alpha, v);
    });
    return out;
}

Output run_optimize(const CommonOpts& o) {
    Output out{o.out, "d,n,s,param_star,distortion_star", {}, {}, resolved_config("optimize", o)};
    fill_rows(out, make_grid(o), [&](const GridPoint& g, std::size_t) {
        sphq::DistortionQuery q{g.d, g.n, g.s, make_target(o.target, o.target_scale, g.d),
                                make_family(o.family, o.param, o.alpha, g.d), quad_of(o)};
        const auto r = sphq::optimal_parameter(q);
        return csv_row(g.d, g.n, g.s, r.value, r.distortion);
    });
    return out;
}

Output run_evt(const CommonOpts& o) {
    Output out{o.out,
               "d,n,s,kappa,kappa_lo,kappa_hi,a_hat_star,e_hat,gamma,q_hat,a_quantile_star",
               {"kappa bounds below d=5 are the trivial envelope (0, 1/2)"},
               {},
               resolved_config("evt", o)};
    fill_rows(out, make_grid(o), [&](const GridPoint& g, std::size_t) {
        const auto target = make_target(o.target, o.target_scale, g.d);
        const auto summary = sphq::evt_summary(target, g.n, g.d, g.s);
        const double lo = summary.bounds ? summary.bounds->lo : 0.0;
        const double hi = summary.bounds ? summary.bounds->hi : 0.5;
        const auto quant = sphq::evt_quantile(o.gamma, summary.a_star, g.n, g.d);
        return csv_row(g.d, g.n, g.s, summary.kappa_value, lo, hi, summary.a_star,
                       summary.e_hat, o.gamma, quant.q_hat, quant.a_star);
    });
    return out;
}

Output run_bounds(const CommonOpts& o) {
    Output out{o.out, "d,n,kappa,kappa_lo,kappa_hi",
               {"bounds below d=5 are the trivial envelope (0, 1/2)"},
               {},
               resolved_config("bounds", o)};
    CommonOpts oo = o;
    oo.s_list = "2";
    fill_rows(out, make_grid(oo), [&](const GridPoint& g, std::size_t) {
        const double k = sphq::kappa(g.n, g.d);
        double lo = 0.0, hi = 0.5;
        if (g.d >= 5) {
            const auto b = sphq::kappa_bounds(g.n, g.d);
            lo = b.lo;
            hi = b.hi;
        }
        return csv_row(g.d, g.n, k, lo, hi);
    });
    return out;
}

Output run_mc(const CommonOpts& o) {
    Output out{o.out,
               "d,n,s,param,n_samples,seed,estimate,std_error,hoeffding_bound,exact,abs_error,"
               "z_score",
               {},
               {},
               resolved_config("mc", o)};
    const auto grid = make_grid(o);
    fill_rows(out, grid, [&](const GridPoint& g, std::size_t idx) {
        const auto target = make_target(o.target, o.target_scale, g.d);
        const auto family = make_family(o.family, o.param, o.alpha, g.d);
        // per-point seed keeps grid rows on independent streams
        const std::uint64_t mix = o.seed + 1000003ULL * idx;
        const auto pts = sphq::sample_quantiser(family, g.n, mix);
        const auto rep = sphq::mc_distortion(pts, target, g.s, o.n_samples, mix + 1);
        sphq::DistortionQuery q{g.d, g.n, g.s, target, family, quad_of(o)};
        const double exact = sphq::expected_distortion(q);
        const double err = std::fabs(rep.estimate - exact);
        const double z = rep.std_error > 0.0 ? err / rep.std_error : 0.0;
        return csv_row(g.d, g.n, g.s, o.param, rep.n_samples, rep.seed, rep.estimate,
                       rep.std_error, rep.hoeffding_bound, exact, err, z);
    });
    return out;
}

Output run_crossover(const CommonOpts& o) {
    Output out{o.out, "d,s,found,n_star",
               {"n_star = 0 means no crossover at or below the cap"},
               {},
               resolved_config("crossover", o)};
    const auto ds = parse_list<int>(o.d_list, "--d");
    const auto ss = parse_double_list(o.s_list, "--s");
    std::vector<GridPoint> grid;
    for (int d : ds)
        for (double s : ss) grid.push_back({d, 1, s});
    sphq::QuadratureConfig quad = quad_of(o);
    quad.rel_tol = std::max(quad.rel_tol, 1.0e-6);
    fill_rows(out, grid, [&](const GridPoint& g, std::size_t) {
        const auto target = make_target(o.target, o.target_scale, g.d);
        const auto fam_a = sphq::QuantiserFamily::sphere(1.0, g.d);
        const auto fam_b = make_family(o.family, 1.0, o.alpha, g.d);
        const auto res = sphq::crossover_size(target, fam_a, fam_b, g.s, o.n_hi, quad);
        return csv_row(g.d, g.s, int(res.found), res.found ? res.n_star : 0ULL);
    });
    return out;
}

Output run_factorial(const CommonOpts& o) {
    Output out{o.out, "d,b2_star,distortion2,b4_star,distortion4,b_inf_star,covering_radius",
               {},
               {},
               resolved_config("factorial", o)};
    const auto ds = parse_list<int>(o.d_list, "--d");
    std::vector<GridPoint> grid;
    for (int d : ds) grid.push_back({d, 1, 2.0});
    fill_rows(out, grid, [&](const GridPoint& g, std::size_t) {
        const auto o2 = sphq::factorial_optimal(g.d, 2.0);
        const auto o4 = sphq::factorial_optimal(g.d, 4.0);
        const auto oi = sphq::factorial_optimal(g.d, std::numeric_limits<double>::infinity());
        return csv_row(g.d, o2.b_star, o2.value, o4.b_star, o4.value, oi.b_star, oi.value);
    });
    return out;
}

Output run_figure(const CommonOpts& o) {
    if (o.name == "sphere-left" || o.name == "ball-grid") {
        CommonOpts oo = o;
        oo.target = o.name == "sphere-left" ? "sphere" : "ball";
        oo.family = o.name == "sphere-left" ? "sphere" : "ball";
        Output out = run_optimize(oo);
        out.config["recipe"] = "figure";
        out.config["name"] = o.name;
        return out;
    }
    if (o.name == "normal-sigma") {
        // distortion roots vs sigma for the sphere and normal families
        Output out{o.out, "d,n,s,sigma,e_sphere,e_normal", {}, {},
                   resolved_config("figure", o)};
        const auto ds = parse_list<int>(o.d_list, "--d");
        const auto ns = parse_list<std::uint64_t>(o.n_list, "--n");
        const auto ss = parse_double_list(o.s_list, "--s");
        const auto sigmas = parse_double_list(
            "0.6,0.7,0.8,0.9,1.0,1.05,1.1,1.15,1.2,1.3,1.4,1.5", "--param");
        struct Point {
            GridPoint g;
            double sigma;
        };
        std::vector<Point> grid;
        for (int d : ds)
            for (auto n : ns)
                for (double s : ss)
                    for (double sg : sigmas) grid.push_back({{d, n, s}, sg});
        out.rows.resize(grid.size());
        parallel_for(grid.size(), [&](std::size_t i) {
            const auto& p = grid[i];
            const auto target = sphq::RadialLaw::scaled_chi(o.target_scale, p.g.d);
            sphq::DistortionQuery qs{p.g.d, p.g.n, p.g.s, target,
                                     sphq::QuantiserFamily::sphere(p.sigma, p.g.d), quad_of(o)};
            sphq::DistortionQuery qn{p.g.d, p.g.n, p.g.s, target,
                                     sphq::QuantiserFamily::normal(p.sigma, p.g.d), quad_of(o)};
            const double es = std::pow(sphq::expected_distortion(qs), 1.0 / p.g.s);
            const double en = std::pow(sphq::expected_distortion(qn), 1.0 / p.g.s);
            out.rows[i] = csv_row(p.g.d, p.g.n, p.g.s, p.sigma, es, en);
        });
        return out;
    }
    if (o.name == "kappa") {
        Output out = run_bounds(o);
        out.config["recipe"] = "figure";
        out.config["name"] = "kappa";
        return out;
    }
    if (o.name == "evt-error") {
        Output out{o.out, "d,n,s,exact,approx,rel_error", {}, {}, resolved_config("figure", o)};
        fill_rows(out, make_grid(o), [&](const GridPoint& g, std::size_t) {
            const auto target = make_target(o.target, o.target_scale, g.d);
            sphq::DistortionQuery q{g.d, g.n, g.s, target,
                                    sphq::QuantiserFamily::sphere(1.0, g.d), quad_of(o)};
            const auto opt = sphq::optimal_parameter(q);
            const double approx =
                sphq::evt_distortion(target, opt.value, g.n, g.d, g.s);
            const double rel =
                std::fabs(1.0 - std::pow(approx / opt.distortion, 1.0 / g.s));
            return csv_row(g.d, g.n, g.s, opt.distortion, approx, rel);
        });
        return out;
    }
    if (o.name == "mixture-alpha") {
        Output out{o.out, "d,n,s,alpha_star,distortion_star", {}, {},
                   resolved_config("figure", o)};
        fill_rows(out, make_grid(o), [&](const GridPoint& g, std::size_t) {
            sphq::DistortionQuery q{g.d, g.n, g.s,
                                    sphq::RadialLaw::point_mass(1.0, g.d),
                                    sphq::QuantiserFamily::sphere_with_atom(0.5, o.param, g.d),
                                    quad_of(o)};
            const auto r = sphq::optimal_parameter(q);
            return csv_row(g.d, g.n, g.s, r.value, r.distortion);
        });
        return out;
    }
    if (o.name == "crossover") {
        Output out = run_crossover(o);
        out.config["recipe"] = "figure";
        out.config["name"] = "crossover";
        return out;
    }
    throw CliError{2,
                   "invalid spec: key '--name' must be one of sphere-left, ball-grid, "
                   "normal-sigma, kappa, evt-error, mixture-alpha, crossover"};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"random-quantiser distortion toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;
    const std::vector<std::pair<std::string, Output (*)(const CommonOpts&)>> recipes = {
        {"distortion", run_distortion}, {"optimize", run_optimize}, {"evt", run_evt},
        {"bounds", run_bounds},         {"mc", run_mc},             {"crossover", run_crossover},
        {"factorial", run_factorial},   {"figure", run_figure},
    };
    for (const auto& [name, fn] : recipes) {
        auto* cmd = app.add_subcommand(name);
        add_common_flags(cmd, opts);
        (void)fn;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << "invalid spec: " << e.what() << "\n";
        return 2;
    }

    try {
        const auto t0 = std::chrono::steady_clock::now();
        Output out;
        bool ran = false;
        for (const auto& [name, fn] : recipes) {
            if (app.get_subcommand(name)->parsed()) {
                out = fn(opts);
                ran = true;
                break;
            }
        }
        if (!ran) {
            std::cerr << "invalid spec: no recipe selected\n";
            return 2;
        }
        for (const auto& row : out.rows) {
            std::stringstream ss(row);
            std::string cell;
            while (std::getline(ss, cell, ',')) {
                try {
                    const double v = std::stod(cell);
                    if (!std::isfinite(v)) throw CliError{3, "non-finite value in row: " + row};
                } catch (const std::invalid_argument&) {
                    // non-numeric cells are not produced by any recipe
                    throw CliError{3, "malformed cell in row: " + row};
                }
            }
        }
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.write(wall);
        return 0;
    } catch (const CliError& e) {
        std::cerr << e.message << "\n";
        return e.code;
    } catch (const sphq::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "invalid spec: " << e.what() << "\n";
        return 2;
    }
}
