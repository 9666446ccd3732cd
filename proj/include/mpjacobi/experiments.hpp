#pragma once

// Experiment drivers behind the command-line tool. Every driver writes
// records in deterministic grid order, one CSV row each, flushing as it goes.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "mpjacobi/matrix.hpp"
#include "mpjacobi/matrix_io.hpp"
#include "mpjacobi/mpjacobi.hpp"
#include "mpjacobi/precond.hpp"

namespace mpj {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ExperimentRecord {
    std::string experiment;
    std::string matrix;
    std::size_t n = 0;
    double kappa_target = kNaN;
    int mode = 0; ///< 0 when not a randsvd matrix
    std::string solver;
    std::string precond;
    double off_ratio = kNaN;
    double envelope = kNaN;
    double kappa2_A = kNaN;
    double kappaS_A = kNaN;
    double kappaS_At = kNaN;
    double max_fwd_err = kNaN;
    double bound_7n_kappaS_u = kNaN;
    int sweeps = -1; ///< -1 when not applicable
    double wall_time_s = kNaN;
    std::uint64_t seed = 0;
    std::string note;
};

const std::vector<std::string>& csv_columns();
std::string csv_header();
std::string csv_row(const ExperimentRecord& r, NumberFormat f);

class CsvWriter {
public:
    CsvWriter(std::ostream& out, NumberFormat f) : out_(out), format_(f) {}

    void header();
    void write(const ExperimentRecord& r);
    void write_raw(const std::string& line);

private:
    std::ostream& out_;
    NumberFormat format_;
};

struct ExperimentOptions {
    std::vector<std::size_t> sizes;
    std::vector<double> kappas;
    std::vector<int> modes;
    std::vector<PrecondMethod> methods;
    std::vector<Variant> variants;
    std::vector<std::string> matrices; ///< cond-reduction specs
    std::uint64_t seed = 1;
    unsigned threads = 0; ///< 0 picks the hardware concurrency
    bool timing = false;
};

/// Desk-scale grid, or the large grid when full is set. Names:
/// off, fwd-vs-kappa, fwd-vs-n, cond-reduction.
ExperimentOptions default_options(std::string_view experiment, bool full);

/// Seed of the randsvd matrix at one grid point.
std::uint64_t grid_seed(std::uint64_t base, std::size_t n, int mode, double kappa);

void run_off_experiment(const ExperimentOptions& opt, CsvWriter& out);
void run_fwd_vs_kappa(const ExperimentOptions& opt, CsvWriter& out);
void run_fwd_vs_n(const ExperimentOptions& opt, CsvWriter& out);

struct MatrixSpec {
    std::string label;
    int mode = 0;
    double kappa = kNaN;
    std::uint64_t seed = 0;
    bool optional = false; ///< external data; failure to load skips the row
    std::function<SymMatrix<double>()> make;
};

/// randsvd:N:KAPPA:MODE, hilbert:N, invhilbert:N, pascal:N, lauchli:N:MU,
/// identity:N, file:PATH (optional).
MatrixSpec parse_matrix_spec(const std::string& spec, std::uint64_t seed);

/// Skipped optional matrices are reported on notices.
void run_cond_reduction(const ExperimentOptions& opt, CsvWriter& out, std::ostream& notices);

/// Rows of an externally produced CSV (for example another eigensolver's
/// errors) with the same header, validated before anything is written.
std::vector<std::string> read_baseline(std::istream& baseline);

} // namespace mpj
