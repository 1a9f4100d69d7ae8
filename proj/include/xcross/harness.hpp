#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "xcross/renewal_model.hpp"

namespace xcross {

// Bad or inconsistent configuration. The CLI maps it to exit code 1.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Command { gig_cdf, approx, exact_exp, simulate, sweep, compare };

Command parse_command(const std::string& name);
std::string command_name(Command c);

enum class KfVariant { reference, sign_corrected };

struct SimBlock {
    std::int64_t paths = 100000;
    std::uint64_t seed = 1;
};

struct GigBlock {
    double mu = 1.0;
    double lambda = 1.0;
    double p = -0.5;
    std::vector<double> x;
};

struct CompareBlock {
    std::vector<double> c{1.0};
    std::vector<double> u{25.0, 50.0, 100.0, 200.0};
    std::vector<double> t_multipliers{0.5, 1.0, 2.0, 5.0, 20.0};
    double threshold = 0.35;
};

struct RunConfig {
    std::optional<Command> command;
    std::optional<ModelSpec> model;
    std::optional<MomentSet> moments;  // full override: K_F and K_S available
    std::optional<double> m;           // partial override: only M and D^2
    std::optional<double> d2;
    KfVariant k_f = KfVariant::reference;

    double u = 1.0;
    double v = 0.0;
    std::vector<double> c_grid;
    std::vector<double> t_list;

    std::optional<SimBlock> sim;
    std::optional<GigBlock> gig;
    CompareBlock compare;
    std::optional<std::string> out;
    std::optional<std::string> gnuplot;
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

// Expands {"from", "to", "step"}; the count is rounded so that "to" is included when it lies on
// the lattice, and values are from + i * step.
std::vector<double> expand_grid(double from, double to, double step);

inline constexpr const char* kCsvHeader = "c,t,u,v,approx,i_m,i_f,i_s,exact,mc_p,mc_lo,mc_hi,abs_err";

struct Columns {
    bool approx = true;
    bool exact = true;
    bool mc = true;
};
Columns columns_for(Command c);

struct CsvRow {
    double c = 0.0;
    double t = 0.0;
    double u = 0.0;
    double v = 0.0;
    std::optional<double> approx, i_m, i_f, i_s, exact, mc_p, mc_lo, mc_hi, abs_err;
};

// A computation in one row that failed to converge; the row keeps the other cells.
struct RowIssue {
    std::size_t row = 0;
    std::string column;
    std::string message;
    double value = 0.0;
    double abs_error = 0.0;
};

// One grid point. mc threads parallelize the simulator inside the row.
CsvRow evaluate_row(const RunConfig& cfg, double c, double t, const Columns& cols, std::vector<RowIssue>* issues = nullptr,
                    std::size_t row_index = 0, int mc_threads = 1);

std::string format_row(const CsvRow& row);
CsvRow parse_row(const std::string& line);
std::string format_double(double x);

struct SweepResult {
    std::vector<CsvRow> rows;
    std::vector<RowIssue> issues;
};

// Rows ordered t-major then c, evaluated concurrently and collected in grid order.
SweepResult run_sweep(const RunConfig& cfg, const Columns& cols, int threads);
void write_csv(std::ostream& os, const std::vector<CsvRow>& rows);

// Sup over the t-grid of |exact - approx| per u, and the ratios err(2u)/err(u).
nlohmann::json run_compare(const RunConfig& cfg, int threads);

// CSV with columns mu,lambda,p,x,cdf_closed,cdf_quadrature,pdf; quadrature blank if it fails.
std::string run_gig_cdf(const RunConfig& cfg);

std::string gnuplot_script(const std::string& csv_path, const RunConfig& cfg);

// Machine-readable error record, one JSON object per line.
std::string error_record(const std::string& kind, const std::string& message, const nlohmann::json& context = {});

}  // namespace xcross
