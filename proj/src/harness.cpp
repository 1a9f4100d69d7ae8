#include "xcross/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "xcross/crossing_approx.hpp"
#include "xcross/errors.hpp"
#include "xcross/exact_exponential.hpp"
#include "xcross/gig.hpp"
#include "xcross/mc_simulator.hpp"

namespace xcross {

using nlohmann::json;

namespace {

const std::pair<Command, const char*> kCommands[] = {
    {Command::gig_cdf, "gig-cdf"}, {Command::approx, "approx"}, {Command::exact_exp, "exact-exp"},
    {Command::simulate, "simulate"}, {Command::sweep, "sweep"},  {Command::compare, "compare"},
};

double number(const json& j, const char* what) {
    if (!j.is_number()) throw ConfigError(std::string(what) + " must be a number");
    return j.get<double>();
}

double required(const json& obj, const char* key, const char* block) {
    if (!obj.contains(key)) throw ConfigError(std::string(block) + "." + key + " is required");
    return number(obj.at(key), key);
}

void allow_keys(const json& obj, std::initializer_list<const char*> keys, const char* block) {
    if (!obj.is_object()) throw ConfigError(std::string(block) + " must be an object");
    for (const auto& [k, _] : obj.items())
        if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
            throw ConfigError(std::string("unknown key ") + block + "." + k);
}

DistSpec parse_dist(const json& j, const char* block) {
    allow_keys(j, {"kind", "rate", "shape", "value"}, block);
    if (!j.contains("kind") || !j.at("kind").is_string()) throw ConfigError(std::string(block) + ".kind is required");
    const std::string kind = j.at("kind");
    DistSpec d;
    if (kind == "exponential") d = Exponential{required(j, "rate", block)};
    else if (kind == "gamma") d = Gamma{required(j, "shape", block), required(j, "rate", block)};
    else if (kind == "deterministic") d = Deterministic{required(j, "value", block)};
    else throw ConfigError(std::string(block) + ".kind must be exponential, gamma or deterministic");
    try {
        validate(d);
    } catch (const DomainError& e) {
        throw ConfigError(std::string(block) + ": " + e.what());
    }
    return d;
}

std::vector<double> parse_c(const json& j) {
    if (j.is_number()) return {j.get<double>()};
    if (j.is_array()) {
        std::vector<double> out;
        for (const auto& x : j) out.push_back(number(x, "query.c[]"));
        return out;
    }
    if (j.is_object()) {
        allow_keys(j, {"from", "to", "step"}, "query.c");
        return expand_grid(required(j, "from", "query.c"), required(j, "to", "query.c"), required(j, "step", "query.c"));
    }
    throw ConfigError("query.c must be a number, an array or {from, to, step}");
}

double parse_t_value(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return kInfinity;
        throw ConfigError("query.t strings must be \"inf\"");
    }
    return number(j, "query.t");
}

std::vector<double> parse_t(const json& j) {
    if (j.is_array()) {
        std::vector<double> out;
        for (const auto& x : j) out.push_back(parse_t_value(x));
        return out;
    }
    return {parse_t_value(j)};
}

std::vector<double> number_list(const json& j, const char* what) {
    if (j.is_number()) return {j.get<double>()};
    if (!j.is_array()) throw ConfigError(std::string(what) + " must be a number or an array");
    std::vector<double> out;
    for (const auto& x : j) out.push_back(number(x, what));
    return out;
}

bool is_exponential_pair(const RunConfig& cfg) {
    return cfg.model && std::holds_alternative<Exponential>(cfg.model->t) &&
           std::holds_alternative<Exponential>(cfg.model->y);
}

ExpModel exp_model(const RunConfig& cfg) {
    return {std::get<Exponential>(cfg.model->t).rate, std::get<Exponential>(cfg.model->y).rate};
}

std::optional<MomentSet> full_moments(const RunConfig& cfg) {
    if (cfg.moments) return cfg.moments;
    if (cfg.m) return std::nullopt;
    if (cfg.model) return moments_of(*cfg.model);
    return std::nullopt;
}

// Constants at drift c: full set when all moments are known, M and D^2 only otherwise.
DerivedConstants constants_at(const RunConfig& cfg, double c) {
    if (const auto mo = full_moments(cfg)) {
        if (c == 0.0) {
            const DerivedConstants unit = derive_constants(*mo, 1.0);
            return constants_from_md2(unit.m, unit.d2, 0.0);
        }
        DerivedConstants k = derive_constants(*mo, c);
        if (cfg.k_f == KfVariant::sign_corrected) k.k_f = sign_corrected_k_f(*mo, c);
        return k;
    }
    if (cfg.m) return constants_from_md2(*cfg.m, *cfg.d2, c);
    throw ConfigError("a model or moments block is required");
}

template <class F>
void parallel_for(std::size_t n, int threads, F&& body) {
    const int workers = static_cast<int>(std::min<std::size_t>(std::max(1, threads), std::max<std::size_t>(n, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            try {
                for (std::size_t i = next++; i < n; i = next++) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = n;
            }
        });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

Command parse_command(const std::string& name) {
    for (const auto& [c, n] : kCommands)
        if (name == n) return c;
    throw ConfigError("unknown command '" + name + "' (gig-cdf, approx, exact-exp, simulate, sweep, compare)");
}

std::string command_name(Command c) {
    for (const auto& [k, n] : kCommands)
        if (k == c) return n;
    return "?";
}

std::vector<double> expand_grid(double from, double to, double step) {
    if (!std::isfinite(from) || !std::isfinite(to) || !(step > 0.0) || !std::isfinite(step))
        throw ConfigError("grid needs finite from/to and a positive step");
    if (to < from) return {};
    const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = from + static_cast<double>(i) * step;
    return out;
}

RunConfig parse_config(const json& doc) {
    allow_keys(doc, {"$schema", "command", "model", "moments", "query", "sim", "gig", "compare", "out", "gnuplot", "k_f"},
               "config");
    RunConfig cfg;
    if (doc.contains("command")) cfg.command = parse_command(doc.at("command").get<std::string>());

    if (doc.contains("model")) {
        const json& m = doc.at("model");
        allow_keys(m, {"T", "Y", "T1"}, "model");
        if (!m.contains("T") || !m.contains("Y")) throw ConfigError("model needs T and Y");
        ModelSpec spec{parse_dist(m.at("T"), "model.T"), parse_dist(m.at("Y"), "model.Y"), std::nullopt};
        if (m.contains("T1")) spec.first_arrival = parse_dist(m.at("T1"), "model.T1");
        cfg.model = spec;
    }
    if (doc.contains("moments")) {
        const json& m = doc.at("moments");
        if (m.contains("m") || m.contains("d2")) {
            allow_keys(m, {"m", "d2"}, "moments");
            cfg.m = required(m, "m", "moments");
            cfg.d2 = required(m, "d2", "moments");
            if (!(*cfg.m > 0.0) || !(*cfg.d2 > 0.0)) throw ConfigError("moments.m and moments.d2 must be positive");
        } else {
            allow_keys(m, {"e_t", "var_t", "mu3_t", "e_t4", "e_y", "var_y", "mu3_y", "e_y4", "e_y2"}, "moments");
            MomentSet s;
            s.e_t = required(m, "e_t", "moments");
            s.var_t = required(m, "var_t", "moments");
            s.mu3_t = required(m, "mu3_t", "moments");
            s.e_t4 = required(m, "e_t4", "moments");
            s.e_y = required(m, "e_y", "moments");
            s.var_y = required(m, "var_y", "moments");
            s.mu3_y = required(m, "mu3_y", "moments");
            s.e_y4 = required(m, "e_y4", "moments");
            s.e_y2 = m.contains("e_y2") ? number(m.at("e_y2"), "e_y2") : s.var_y + s.e_y * s.e_y;
            try {
                validate(s);
            } catch (const DomainError& e) {
                throw ConfigError(e.what());
            }
            cfg.moments = s;
        }
    }
    if (doc.contains("k_f")) {
        const std::string v = doc.at("k_f");
        if (v == "reference") cfg.k_f = KfVariant::reference;
        else if (v == "sign_corrected") cfg.k_f = KfVariant::sign_corrected;
        else throw ConfigError("k_f must be \"reference\" or \"sign_corrected\"");
    }

    if (doc.contains("query")) {
        const json& q = doc.at("query");
        allow_keys(q, {"u", "v", "c", "t"}, "query");
        if (q.contains("u")) cfg.u = number(q.at("u"), "query.u");
        if (q.contains("v")) cfg.v = number(q.at("v"), "query.v");
        if (q.contains("c")) cfg.c_grid = parse_c(q.at("c"));
        if (q.contains("t")) cfg.t_list = parse_t(q.at("t"));
    }
    if (!(cfg.u > 0.0) || !std::isfinite(cfg.u)) throw ConfigError("query.u must be positive");
    if (!(cfg.v >= 0.0) || !std::isfinite(cfg.v)) throw ConfigError("query.v must be nonnegative");
    for (std::size_t i = 0; i < cfg.c_grid.size(); ++i) {
        if (!(cfg.c_grid[i] >= 0.0) || !std::isfinite(cfg.c_grid[i])) throw ConfigError("query.c values must be >= 0");
        if (i > 0 && !(cfg.c_grid[i] > cfg.c_grid[i - 1])) throw ConfigError("query.c grid must be strictly increasing");
    }
    for (double t : cfg.t_list)
        if (!(t >= cfg.v)) throw ConfigError("query.t values must not be below v");

    if (doc.contains("sim")) {
        const json& s = doc.at("sim");
        allow_keys(s, {"paths", "seed"}, "sim");
        SimBlock b;
        if (s.contains("paths")) b.paths = s.at("paths").get<std::int64_t>();
        if (s.contains("seed")) b.seed = s.at("seed").get<std::uint64_t>();
        if (b.paths < 1) throw ConfigError("sim.paths must be at least 1");
        cfg.sim = b;
    }
    if (doc.contains("gig")) {
        const json& g = doc.at("gig");
        allow_keys(g, {"mu", "lambda", "p", "x"}, "gig");
        GigBlock b;
        b.mu = required(g, "mu", "gig");
        b.lambda = required(g, "lambda", "gig");
        b.p = required(g, "p", "gig");
        if (g.contains("x")) b.x = number_list(g.at("x"), "gig.x");
        cfg.gig = b;
    }
    if (doc.contains("compare")) {
        const json& c = doc.at("compare");
        allow_keys(c, {"c", "u", "t_multipliers", "threshold"}, "compare");
        if (c.contains("c")) cfg.compare.c = number_list(c.at("c"), "compare.c");
        if (c.contains("u")) cfg.compare.u = number_list(c.at("u"), "compare.u");
        if (c.contains("t_multipliers")) cfg.compare.t_multipliers = number_list(c.at("t_multipliers"), "compare.t_multipliers");
        if (c.contains("threshold")) cfg.compare.threshold = number(c.at("threshold"), "compare.threshold");
        for (std::size_t i = 1; i < cfg.compare.u.size(); ++i)
            if (!(cfg.compare.u[i] > cfg.compare.u[i - 1])) throw ConfigError("compare.u must be strictly increasing");
    }
    if (doc.contains("out")) cfg.out = doc.at("out").get<std::string>();
    if (doc.contains("gnuplot")) cfg.gnuplot = doc.at("gnuplot").get<std::string>();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        return parse_config(doc);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config has a value of the wrong type: ") + e.what());
    }
}

Columns columns_for(Command c) {
    switch (c) {
        case Command::approx: return {true, false, false};
        case Command::exact_exp: return {false, true, false};
        case Command::simulate: return {false, false, true};
        default: return {true, true, true};
    }
}

CsvRow evaluate_row(const RunConfig& cfg, double c, double t, const Columns& cols, std::vector<RowIssue>* issues,
                    std::size_t row_index, int mc_threads) {
    CsvRow row;
    row.c = c;
    row.t = t;
    row.u = cfg.u;
    row.v = cfg.v;
    auto note = [&](const char* column, const ConvergenceError& e) {
        if (issues) issues->push_back({row_index, column, e.what(), e.value(), e.abs_error()});
    };
    const CrossingQuery q{cfg.u, c, cfg.v, t};

    if (cols.approx) {
        try {
            const DerivedConstants k = constants_at(cfg, c);
            if (c == 0.0) {
                row.i_m = integral_M(q, k);
            } else if (std::isnan(k.k_f)) {
                row.i_m = integral_M(q, k);
                row.i_f = integral_F(q, k);
                row.i_s = integral_S(q, k);
            } else {
                const ApproxTerms a = approx_terms(q, k);
                row.approx = a.value;
                row.i_m = a.i_m;
                row.i_f = a.i_f;
                row.i_s = a.i_s;
            }
        } catch (const ConvergenceError& e) {
            note("approx", e);
        }
    }
    if (cols.exact && is_exponential_pair(cfg) && c > 0.0) {
        try {
            row.exact = exact_conditional_exp(q, exp_model(cfg));
        } catch (const UnsupportedError&) {
            // Near-critical drift at t = inf: the cell stays empty.
        } catch (const ConvergenceError& e) {
            note("exact", e);
        }
    }
    if (cols.mc && cfg.sim && cfg.model && std::isfinite(t) && t > cfg.v && c > 0.0) {
        SimConfig sc;
        sc.n_paths = cfg.sim->paths;
        sc.seed = cfg.sim->seed;
        sc.u = cfg.u;
        sc.c = c;
        sc.t = t;
        sc.model = *cfg.model;
        sc.conditioning = cfg.v;
        const SimEstimate e = simulate_ruin(sc, mc_threads);
        row.mc_p = e.p_hat;
        row.mc_lo = e.ci_low;
        row.mc_hi = e.ci_high;
    }
    if (row.approx && row.exact) row.abs_err = std::abs(*row.approx - *row.exact);
    else if (row.approx && row.mc_p) row.abs_err = std::abs(*row.approx - *row.mc_p);
    return row;
}

std::string format_double(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_row(const CsvRow& r) {
    auto cell = [](const std::optional<double>& x) { return x ? format_double(*x) : std::string(); };
    std::string s = format_double(r.c) + "," + format_double(r.t) + "," + format_double(r.u) + "," + format_double(r.v);
    for (const auto* x : {&r.approx, &r.i_m, &r.i_f, &r.i_s, &r.exact, &r.mc_p, &r.mc_lo, &r.mc_hi, &r.abs_err})
        s += "," + cell(*x);
    return s;
}

CsvRow parse_row(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 13) throw ConfigError("CSV row must have 13 cells: " + line);
    auto num = [](const std::string& s) { return s == "inf" ? kInfinity : std::stod(s); };
    auto opt = [&](const std::string& s) { return s.empty() ? std::optional<double>() : std::optional<double>(num(s)); };
    CsvRow r;
    r.c = num(cells[0]);
    r.t = num(cells[1]);
    r.u = num(cells[2]);
    r.v = num(cells[3]);
    std::optional<double>* slots[] = {&r.approx, &r.i_m, &r.i_f, &r.i_s, &r.exact, &r.mc_p, &r.mc_lo, &r.mc_hi, &r.abs_err};
    for (int i = 0; i < 9; ++i) *slots[i] = opt(cells[4 + i]);
    return r;
}

SweepResult run_sweep(const RunConfig& cfg, const Columns& cols, int threads) {
    const std::vector<double> ts = cfg.t_list.empty() ? std::vector<double>{kInfinity} : cfg.t_list;
    const std::size_t n = ts.size() * cfg.c_grid.size();
    SweepResult out;
    out.rows.resize(n);
    std::mutex issue_mutex;
    // With a simulator in the row the paths carry the parallelism; otherwise the rows do.
    const bool mc_rows = cols.mc && cfg.sim.has_value();
    const int row_threads = mc_rows ? 1 : threads;
    const int mc_threads = mc_rows ? threads : 1;
    parallel_for(n, row_threads, [&](std::size_t i) {
        std::vector<RowIssue> local;
        const double t = ts[i / cfg.c_grid.size()];
        const double c = cfg.c_grid[i % cfg.c_grid.size()];
        out.rows[i] = evaluate_row(cfg, c, t, cols, &local, i, mc_threads);
        if (!local.empty()) {
            std::lock_guard<std::mutex> lock(issue_mutex);
            out.issues.insert(out.issues.end(), local.begin(), local.end());
        }
    });
    std::sort(out.issues.begin(), out.issues.end(), [](const RowIssue& a, const RowIssue& b) { return a.row < b.row; });
    return out;
}

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows) {
    os << kCsvHeader << '\n';
    for (const auto& r : rows) os << format_row(r) << '\n';
}

json run_compare(const RunConfig& cfg, int threads) {
    if (!is_exponential_pair(cfg)) throw ConfigError("compare needs exponential T and Y (the exact kernel)");
    const ExpModel em = exp_model(cfg);
    const auto& cb = cfg.compare;

    struct Point {
        double c, u, t, exact, approx;
    };
    std::vector<Point> pts;
    for (double c : cb.c)
        for (double u : cb.u)
            for (double m : cb.t_multipliers) pts.push_back({c, u, m * u, 0.0, 0.0});
    parallel_for(pts.size(), threads, [&](std::size_t i) {
        Point& p = pts[i];
        RunConfig local = cfg;
        local.u = p.u;
        const CrossingQuery q{p.u, p.c, cfg.v, cfg.v + p.t};
        p.exact = exact_conditional_exp(q, em);
        p.approx = approx_conditional(q, constants_at(local, p.c));
    });

    json report;
    report["v"] = cfg.v;
    report["k_f"] = cfg.k_f == KfVariant::reference ? "reference" : "sign_corrected";
    report["threshold"] = cb.threshold;
    report["series"] = json::array();
    bool pass = true;
    std::size_t idx = 0;
    for (double c : cb.c) {
        json series;
        series["c"] = c;
        series["ladder"] = json::array();
        std::vector<double> errs;
        for (double u : cb.u) {
            json rung;
            rung["u"] = u;
            rung["points"] = json::array();
            double sup = 0.0, t_sup = 0.0;
            for (std::size_t j = 0; j < cb.t_multipliers.size(); ++j, ++idx) {
                const Point& p = pts[idx];
                const double err = std::abs(p.exact - p.approx);
                rung["points"].push_back({{"t", p.t}, {"exact", p.exact}, {"approx", p.approx}, {"abs_err", err}});
                if (err >= sup) {
                    sup = err;
                    t_sup = p.t;
                }
            }
            rung["sup_err"] = sup;
            rung["t_at_sup"] = t_sup;
            errs.push_back(sup);
            series["ladder"].push_back(rung);
        }
        series["ratios"] = json::array();
        for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
            const double r = errs[i + 1] / errs[i];
            series["ratios"].push_back({{"u", cb.u[i]}, {"u_next", cb.u[i + 1]}, {"ratio", r}});
            pass = pass && r <= cb.threshold;
        }
        report["series"].push_back(series);
    }
    report["pass"] = pass;
    return report;
}

std::string run_gig_cdf(const RunConfig& cfg) {
    if (!cfg.gig) throw ConfigError("gig-cdf needs a gig block");
    const GigParams g{cfg.gig->mu, cfg.gig->lambda, cfg.gig->p};
    std::string out = "mu,lambda,p,x,cdf_closed,cdf_quadrature,pdf\n";
    for (double x : cfg.gig->x) {
        std::string closed, quad;
        if (has_closed_cdf(g.p)) closed = format_double(gig_cdf_closed(g, x));
        try {
            quad = format_double(gig_cdf_quadrature(g, x).value);
        } catch (const ConvergenceError&) {
        }
        out += format_double(g.mu) + "," + format_double(g.lambda) + "," + format_double(g.p) + "," + format_double(x) +
               "," + closed + "," + quad + "," + format_double(gig_pdf(g, x)) + "\n";
    }
    return out;
}

std::string gnuplot_script(const std::string& csv_path, const RunConfig& cfg) {
    std::ostringstream s;
    s << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set xlabel 'c'\n"
      << "set title 'u = " << format_double(cfg.u) << ", v = " << format_double(cfg.v) << "'\n"
      << "plot '" << csv_path << "' using 1:5 with lines title 'approx', \\\n"
      << "     '' using 1:9 with lines title 'exact', \\\n"
      << "     '' using 1:6 with lines title 'I_M', \\\n"
      << "     '' using 1:10 with points title 'mc'\n";
    return s.str();
}

std::string error_record(const std::string& kind, const std::string& message, const json& context) {
    json j{{"error", kind}, {"message", message}};
    if (!context.is_null()) j["context"] = context;
    return j.dump();
}

}  // namespace xcross
