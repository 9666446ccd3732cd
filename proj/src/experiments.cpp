#include "mpjacobi/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cctype>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "mpjacobi/linalg.hpp"
#include "mpjacobi/metrics.hpp"
#include "mpjacobi/testmat.hpp"

namespace mpj {
namespace {

constexpr double kIndicativeKappa = 1e12;

/// Runs job(i) for i < count on a worker pool and writes the results in
/// index order as soon as each prefix is complete.
template <class Job>
void run_ordered(std::size_t count, unsigned threads, Job job, CsvWriter& out)
{
    std::vector<std::vector<ExperimentRecord>> results(count);
    std::vector<char> done(count, 0);
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count)
                return;
            auto recs = job(i);
            {
                std::lock_guard lk(mu);
                results[i] = std::move(recs);
                done[i] = 1;
            }
            cv.notify_all();
        }
    };

    unsigned t = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    t = static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(count, 1)));
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < t; ++k)
        pool.emplace_back(worker);
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<ExperimentRecord> recs;
        {
            std::unique_lock lk(mu);
            cv.wait(lk, [&] { return done[i] != 0; });
            recs = std::move(results[i]);
        }
        for (const auto& r : recs)
            out.write(r);
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string error_note(const std::exception& e)
{
    std::string s = std::string("error: ") + e.what();
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

void append_note(std::string& note, const std::string& what)
{
    if (!note.empty())
        note += ';';
    note += what;
}

std::vector<double> decades(int lo, int hi, int step = 1)
{
    std::vector<double> k;
    for (int e = lo; e <= hi; e += step)
        k.push_back(std::pow(10.0, e));
    return k;
}

double envelope_p2(std::size_t n) { return 5.0 * std::sqrt(static_cast<double>(n)) * kUnitRoundoffLow; }

struct Point {
    std::size_t n;
    double kappa;
    int mode;
};

std::vector<ExperimentRecord> forward_error_point(const std::string& name, const Point& pt,
                                                  const ExperimentOptions& opt)
{
    ExperimentRecord base;
    base.experiment = name;
    base.matrix = "randsvd";
    base.n = pt.n;
    base.kappa_target = pt.kappa;
    base.mode = pt.mode;
    base.seed = grid_seed(opt.seed, pt.n, pt.mode, pt.kappa);
    if (pt.kappa > kIndicativeKappa)
        base.note = "indicative";

    std::vector<ExperimentRecord> out;
    try {
        const auto a = randsvd_spd({pt.n, pt.kappa, pt.mode, base.seed});
        const auto ref = reference_eigenvalues(a);
        base.kappa2_A = dd_div(ref.front(), ref.back()).to_double();
        base.kappaS_A = scaled_cond(a);
        const double fa = frobenius(a);

        const PrecondMethod method = opt.methods.empty() ? PrecondMethod::SpectralHHQR : opt.methods.front();
        Preconditioner p;
        double kappaS_At = kNaN;
        double off_ratio = kNaN;
        const bool needs_p = std::any_of(opt.variants.begin(), opt.variants.end(),
                                         [](Variant v) { return v != Variant::Jacobi; });
        double precond_time = 0.0;
        if (needs_p) {
            const auto t0 = std::chrono::steady_clock::now();
            p = build_preconditioner(a, method);
            precond_time = seconds_since(t0);
            const auto at_high = sandwich_high(p.q_tilde, a);
            off_ratio = off(at_high).to_double() / fa;
            kappaS_At = scaled_cond(at_high);
        }

        for (Variant v : opt.variants) {
            ExperimentRecord r = base;
            r.solver = std::string(to_string(v));
            try {
                SolveConfig cfg;
                cfg.variant = v;
                cfg.precond_method = method;
                cfg.check_assumptions = false;
                cfg.accumulate = false;
                const auto t0 = std::chrono::steady_clock::now();
                const auto res = solve_preconditioned(a, p, cfg);
                const double elapsed = seconds_since(t0);
                const double ks = v == Variant::Jacobi ? r.kappaS_A : kappaS_At;
                const auto prof = forward_errors(res.lambda, ref, ks);
                r.kappaS_At = ks;
                r.max_fwd_err = prof.max_rel_error;
                r.bound_7n_kappaS_u = prof.bound_7n_kappaS_u;
                r.sweeps = res.report.sweeps;
                if (v != Variant::Jacobi) {
                    r.precond = std::string(to_string(method));
                    r.off_ratio = off_ratio;
                }
                if (opt.timing)
                    r.wall_time_s = elapsed + (v == Variant::Jacobi ? 0.0 : precond_time);
                if (!res.report.converged)
                    append_note(r.note, "not-converged");
            } catch (const std::exception& e) {
                append_note(r.note, error_note(e));
            }
            out.push_back(std::move(r));
        }
    } catch (const std::exception& e) {
        ExperimentRecord r = base;
        append_note(r.note, error_note(e));
        out.assign(1, r);
    }
    return out;
}

void run_forward(const std::string& name, const ExperimentOptions& opt, CsvWriter& out)
{
    std::vector<Point> pts;
    for (std::size_t n : opt.sizes)
        for (double k : opt.kappas)
            for (int m : opt.modes)
                pts.push_back({n, k, m});
    if (pts.empty())
        throw DomainError(name + ": empty grid (need at least one size, kappa and mode)");
    if (opt.variants.empty())
        throw DomainError(name + ": no solver variants selected");
    out.header();
    run_ordered(pts.size(), opt.threads, [&](std::size_t i) { return forward_error_point(name, pts[i], opt); }, out);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, sep))
        parts.push_back(cur);
    return parts;
}

std::size_t parse_size(const std::string& s, const std::string& spec)
{
    std::size_t pos = 0;
    unsigned long long v = 0;
    // stoull would quietly wrap "-3"
    if (!s.empty() && std::isdigit(static_cast<unsigned char>(s[0]))) {
        try {
            v = std::stoull(s, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
    }
    if (pos == 0 || pos != s.size() || v == 0)
        throw DomainError("matrix spec '" + spec + "': '" + s + "' is not a positive size");
    return static_cast<std::size_t>(v);
}

double parse_real(const std::string& s, const std::string& spec)
{
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size())
        throw DomainError("matrix spec '" + spec + "': '" + s + "' is not a number");
    return v;
}

} // namespace

const std::vector<std::string>& csv_columns()
{
    static const std::vector<std::string> cols{
        "experiment", "matrix",    "n",         "kappa_target", "mode",        "solver",
        "precond",    "off_ratio", "envelope",  "kappa2_A",     "kappaS_A",    "kappaS_At",
        "max_fwd_err", "bound_7n_kappaS_u", "sweeps", "wall_time_s", "seed", "rng", "note"};
    return cols;
}

std::string csv_header()
{
    std::string h;
    for (const auto& c : csv_columns()) {
        if (!h.empty())
            h += ',';
        h += c;
    }
    return h;
}

std::string csv_row(const ExperimentRecord& r, NumberFormat f)
{
    auto num = [&](double x) { return format_number(x, f); };
    std::string s;
    bool first = true;
    auto add = [&](const std::string& field) {
        if (!first)
            s += ',';
        first = false;
        s += field;
    };
    add(r.experiment);
    add(r.matrix);
    add(std::to_string(r.n));
    add(num(r.kappa_target));
    add(r.mode > 0 ? std::to_string(r.mode) : "nan");
    add(r.solver);
    add(r.precond);
    add(num(r.off_ratio));
    add(num(r.envelope));
    add(num(r.kappa2_A));
    add(num(r.kappaS_A));
    add(num(r.kappaS_At));
    add(num(r.max_fwd_err));
    add(num(r.bound_7n_kappaS_u));
    add(r.sweeps >= 0 ? std::to_string(r.sweeps) : "nan");
    add(num(r.wall_time_s));
    add(std::to_string(r.seed));
    add(std::string(Rng::kName));
    add(r.note);
    return s;
}

void CsvWriter::header()
{
    out_ << csv_header() << '\n';
    out_.flush();
}

void CsvWriter::write(const ExperimentRecord& r)
{
    out_ << csv_row(r, format_) << '\n';
    out_.flush();
}

void CsvWriter::write_raw(const std::string& line)
{
    out_ << line << '\n';
    out_.flush();
}

ExperimentOptions default_options(std::string_view experiment, bool full)
{
    ExperimentOptions o;
    const std::vector<std::size_t> desk_sizes{10, 20, 50, 100, 200};
    const std::vector<std::size_t> full_sizes{10, 18, 32, 56, 100, 178, 316, 562, 1000};
    o.modes = {1, 2, 3, 4, 5};
    o.variants = {Variant::Jacobi, Variant::MP2, Variant::MP3};
    if (experiment == "off") {
        o.sizes = full ? full_sizes : desk_sizes;
        o.kappas = {1e6};
        o.methods = {PrecondMethod::SpectralHHQR, PrecondMethod::SpectralMGS, PrecondMethod::SpectralNS,
                     PrecondMethod::Tridiag};
    } else if (experiment == "fwd-vs-kappa") {
        o.sizes = {100};
        o.kappas = full ? decades(1, 16) : decades(1, 10);
        o.methods = {PrecondMethod::SpectralHHQR};
    } else if (experiment == "fwd-vs-n") {
        o.sizes = full ? full_sizes : desk_sizes;
        o.kappas = {1e10};
        o.methods = {PrecondMethod::SpectralHHQR};
    } else if (experiment == "cond-reduction") {
        o.sizes = {100};
        o.kappas = full ? decades(1, 16) : decades(2, 10, 2);
        o.methods = {PrecondMethod::SpectralHHQR};
        o.matrices = {"hilbert:20", "invhilbert:20", "pascal:15", "lauchli:500:1e-3"};
    } else {
        throw DomainError("unknown experiment '" + std::string(experiment) + "'");
    }
    return o;
}

std::uint64_t grid_seed(std::uint64_t base, std::size_t n, int mode, double kappa)
{
    return derive_seed(base, n, static_cast<std::uint64_t>(mode), std::bit_cast<std::uint64_t>(kappa));
}

void run_off_experiment(const ExperimentOptions& opt, CsvWriter& out)
{
    std::vector<Point> pts;
    for (std::size_t n : opt.sizes)
        for (double k : opt.kappas)
            for (int m : opt.modes)
                pts.push_back({n, k, m});
    if (pts.empty())
        throw DomainError("off: empty grid (need at least one size, kappa and mode)");
    if (opt.methods.empty())
        throw DomainError("off: no preconditioner methods selected");
    out.header();
    run_ordered(
        pts.size(), opt.threads,
        [&](std::size_t i) {
            const Point& pt = pts[i];
            ExperimentRecord base;
            base.experiment = "off";
            base.matrix = "randsvd";
            base.n = pt.n;
            base.kappa_target = pt.kappa;
            base.mode = pt.mode;
            base.envelope = envelope_p2(pt.n);
            base.seed = grid_seed(opt.seed, pt.n, pt.mode, pt.kappa);
            std::vector<ExperimentRecord> recs;
            SymMatrix<double> a;
            try {
                a = randsvd_spd({pt.n, pt.kappa, pt.mode, base.seed});
            } catch (const std::exception& e) {
                append_note(base.note, error_note(e));
                return std::vector<ExperimentRecord>{base};
            }
            const double fa = frobenius(a);
            for (PrecondMethod m : opt.methods) {
                ExperimentRecord r = base;
                r.solver = "precond";
                r.precond = std::string(to_string(m));
                try {
                    const auto t0 = std::chrono::steady_clock::now();
                    const auto p = build_preconditioner(a, m);
                    const double elapsed = seconds_since(t0);
                    r.off_ratio = off(sandwich_high(p.q_tilde, a)).to_double() / fa;
                    if (opt.timing)
                        r.wall_time_s = elapsed;
                    if (!(r.off_ratio <= r.envelope))
                        append_note(r.note, "above-envelope");
                } catch (const std::exception& e) {
                    append_note(r.note, error_note(e));
                }
                recs.push_back(std::move(r));
            }
            return recs;
        },
        out);
}

void run_fwd_vs_kappa(const ExperimentOptions& opt, CsvWriter& out) { run_forward("fwd-vs-kappa", opt, out); }

void run_fwd_vs_n(const ExperimentOptions& opt, CsvWriter& out) { run_forward("fwd-vs-n", opt, out); }

MatrixSpec parse_matrix_spec(const std::string& spec, std::uint64_t seed)
{
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    if (kind == "file") {
        if (colon == std::string::npos || colon + 1 == spec.size())
            throw DomainError("matrix spec '" + spec + "': missing path");
        const std::string path = spec.substr(colon + 1);
        MatrixSpec m;
        m.label = "file:" + path.substr(path.find_last_of('/') == std::string::npos ? 0 : path.find_last_of('/') + 1);
        m.optional = true;
        m.make = [path] { return read_matrix_file(path); };
        return m;
    }
    const auto parts = split(spec, ':');
    auto need = [&](std::size_t k) {
        if (parts.size() != k)
            throw DomainError("matrix spec '" + spec + "': expected " + std::to_string(k - 1) + " parameter(s)");
    };
    MatrixSpec m;
    m.label = kind;
    if (kind == "randsvd") {
        need(4);
        RandSvdSpec rs;
        rs.n = parse_size(parts[1], spec);
        rs.kappa = parse_real(parts[2], spec);
        rs.mode = static_cast<int>(parse_size(parts[3], spec));
        rs.seed = grid_seed(seed, rs.n, rs.mode, rs.kappa);
        randsvd_spectrum(rs); // validates
        m.mode = rs.mode;
        m.kappa = rs.kappa;
        m.seed = rs.seed;
        m.make = [rs] { return randsvd_spd(rs); };
    } else if (kind == "hilbert" || kind == "invhilbert" || kind == "pascal" || kind == "identity") {
        need(2);
        const std::size_t n = parse_size(parts[1], spec);
        if (kind == "hilbert")
            m.make = [n] { return hilbert(n); };
        else if (kind == "invhilbert")
            m.make = [n] { return invhilbert(n); };
        else if (kind == "pascal")
            m.make = [n] { return pascal(n); };
        else
            m.make = [n] { return SymMatrix<double>::identity(n); };
    } else if (kind == "lauchli") {
        need(3);
        const std::size_t n = parse_size(parts[1], spec);
        const double mu = parse_real(parts[2], spec);
        m.make = [n, mu] { return lauchli_gram(n, mu); };
    } else {
        throw DomainError("matrix spec '" + spec + "': unknown kind '" + kind + "'");
    }
    return m;
}

void run_cond_reduction(const ExperimentOptions& opt, CsvWriter& out, std::ostream& notices)
{
    std::vector<MatrixSpec> specs;
    for (std::size_t n : opt.sizes)
        for (double k : opt.kappas)
            for (int mode : opt.modes) {
                std::ostringstream s;
                s << "randsvd:" << n << ':' << format_number(k, NumberFormat::Decimal) << ':' << mode;
                specs.push_back(parse_matrix_spec(s.str(), opt.seed));
            }
    for (const auto& s : opt.matrices)
        specs.push_back(parse_matrix_spec(s, opt.seed));
    if (specs.empty())
        throw DomainError("cond-reduction: no matrices selected");
    const PrecondMethod method = opt.methods.empty() ? PrecondMethod::SpectralHHQR : opt.methods.front();

    std::mutex notice_mu;
    out.header();
    run_ordered(
        specs.size(), opt.threads,
        [&](std::size_t i) -> std::vector<ExperimentRecord> {
            const MatrixSpec& ms = specs[i];
            ExperimentRecord r;
            r.experiment = "cond-reduction";
            r.matrix = ms.label;
            r.kappa_target = ms.kappa;
            r.mode = ms.mode;
            r.seed = ms.seed;
            r.solver = "precond";
            r.precond = std::string(to_string(method));
            SymMatrix<double> a;
            try {
                a = ms.make();
            } catch (const std::exception& e) {
                if (ms.optional) {
                    std::lock_guard lk(notice_mu);
                    notices << "skipping " << ms.label << ": " << e.what() << '\n';
                    return {};
                }
                append_note(r.note, error_note(e));
                return {r};
            }
            r.n = a.n();
            auto measure = [&](auto&& f) {
                try {
                    return f();
                } catch (const std::exception& e) {
                    append_note(r.note, error_note(e));
                    return kNaN;
                }
            };
            const auto t0 = std::chrono::steady_clock::now();
            // A matrix that lost definiteness when rounded to binary64 is
            // measured by |lambda| ratios instead and flagged.
            bool indefinite = false;
            auto cond = [&](auto&& strict, auto&& by_abs) {
                try {
                    return strict();
                } catch (const IndefiniteMatrixError&) {
                    indefinite = true;
                    return by_abs();
                }
            };
            r.kappa2_A = measure([&] { return cond([&] { return cond2(a); }, [&] { return cond2_abs(a); }); });
            r.kappaS_A =
                measure([&] { return cond([&] { return scaled_cond(a); }, [&] { return scaled_cond_abs(a); }); });
            r.kappaS_At = measure([&] {
                const auto p = build_preconditioner(a, method);
                const auto at = sandwich_high(p.q_tilde, a);
                r.off_ratio = off(at).to_double() / frobenius(a);
                return cond([&] { return scaled_cond(at); }, [&] { return scaled_cond_abs(at); });
            });
            if (indefinite)
                append_note(r.note, "indefinite-in-binary64");
            if (opt.timing)
                r.wall_time_s = seconds_since(t0);
            if (std::isfinite(r.kappa2_A) && r.kappa2_A > kIndicativeKappa)
                append_note(r.note, "indicative");
            return {r};
        },
        out);
}

std::vector<std::string> read_baseline(std::istream& baseline)
{
    std::vector<std::string> rows;
    std::string line;
    if (!std::getline(baseline, line))
        throw ParseError(1, "baseline CSV is empty");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != csv_header())
        throw ParseError(1, "baseline CSV header does not match: expected '" + csv_header() + "'");
    const std::size_t ncols = csv_columns().size();
    std::size_t lineno = 1;
    while (std::getline(baseline, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto fields = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
        if (fields != ncols)
            throw ParseError(lineno, "expected " + std::to_string(ncols) + " fields, found " + std::to_string(fields));
        rows.push_back(line);
    }
    return rows;
}

} // namespace mpj
