#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "xcross/errors.hpp"
#include "xcross/harness.hpp"
#include "xcross/mc_simulator.hpp"

using namespace xcross;

namespace {

enum Exit { ok = 0, config_error = 1, not_converged = 2, io_error = 3, domain_error = 4 };

void emit(const std::string& text, const std::optional<std::string>& path) {
    if (!path) {
        std::cout << text;
        return;
    }
    std::ofstream f(*path);
    if (!f) throw std::ios_base::failure("cannot write " + *path);
    f << text;
    if (!f) throw std::ios_base::failure("write failed for " + *path);
}

int run(Command cmd, RunConfig& cfg) {
    const int threads = thread_cap();
    switch (cmd) {
        case Command::gig_cdf:
            emit(run_gig_cdf(cfg), cfg.out);
            return ok;
        case Command::compare: {
            const auto report = run_compare(cfg, threads);
            emit(report.dump(2) + "\n", cfg.out);
            return ok;
        }
        default:
            break;
    }
    if (cmd == Command::simulate && !cfg.sim) cfg.sim = SimBlock{};
    const SweepResult res = run_sweep(cfg, columns_for(cmd), threads);
    std::ostringstream csv;
    write_csv(csv, res.rows);
    emit(csv.str(), cfg.out);
    if (cfg.gnuplot) emit(gnuplot_script(cfg.out.value_or("-"), cfg), cfg.gnuplot);
    for (const auto& issue : res.issues)
        std::cerr << error_record("not_converged", issue.message,
                                  {{"row", issue.row}, {"column", issue.column}, {"value", issue.value},
                                   {"abs_error", issue.abs_error}})
                  << '\n';
    return res.issues.empty() ? ok : not_converged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"First-crossing probabilities: GIG-based approximation, exact exponential formula, Monte Carlo"};
    std::string command, config, out, gnuplot;
    std::uint64_t seed = 0;
    std::int64_t paths = 0;
    app.add_option("command", command, "gig-cdf | approx | exact-exp | simulate | sweep | compare")->required();
    app.add_option("--config", config, "JSON configuration file")->required();
    app.add_option("--out", out, "output file (CSV, or JSON for compare); stdout if omitted");
    app.add_option("--seed", seed, "simulator seed, overrides sim.seed");
    app.add_option("--paths", paths, "simulator paths, overrides sim.paths")->check(CLI::PositiveNumber);
    app.add_option("--gnuplot", gnuplot, "also write a gnuplot script for the CSV");
    CLI11_PARSE(app, argc, argv);

    try {
        const Command cmd = parse_command(command);
        RunConfig cfg = load_config(config);
        if (!out.empty()) cfg.out = out;
        if (!gnuplot.empty()) cfg.gnuplot = gnuplot;
        if (app.count("--seed") || app.count("--paths")) {
            if (!cfg.sim) cfg.sim = SimBlock{};
            if (app.count("--seed")) cfg.sim->seed = seed;
            if (app.count("--paths")) cfg.sim->paths = paths;
        }
        return run(cmd, cfg);
    } catch (const ConfigError& e) {
        std::cerr << error_record("config", e.what()) << '\n';
        return config_error;
    } catch (const ConvergenceError& e) {
        std::cerr << error_record("not_converged", e.what(), {{"value", e.value()}, {"abs_error", e.abs_error()}}) << '\n';
        return not_converged;
    } catch (const std::ios_base::failure& e) {
        std::cerr << error_record("io", e.what()) << '\n';
        return io_error;
    } catch (const std::exception& e) {
        std::cerr << error_record("domain", e.what()) << '\n';
        return domain_error;
    }
}
