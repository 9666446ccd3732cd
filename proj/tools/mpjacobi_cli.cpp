// mpjacobi: experiment harness and one-shot solver.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mpjacobi/experiments.hpp"
#include "mpjacobi/kernels.hpp"
#include "mpjacobi/matrix_io.hpp"
#include "mpjacobi/mpjacobi.hpp"

namespace {

struct GridFlags {
    std::vector<std::size_t> sizes;
    std::vector<double> kappas;
    std::vector<int> modes;
    std::vector<std::string> variants;
    std::vector<std::string> preconds;
    std::vector<std::string> matrices;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "hex";
    std::string baseline;
    unsigned threads = 0;
    bool full = false;
    bool timing = false;
};

void add_grid_flags(CLI::App* cmd, GridFlags& f, bool forward, bool cond)
{
    cmd->add_option("--n", f.sizes, "matrix sizes")->delimiter(',');
    cmd->add_option("--kappa", f.kappas, "target condition numbers")->delimiter(',');
    cmd->add_option("--mode", f.modes, "randsvd modes (1-5)")->delimiter(',')->check(CLI::Range(1, 5));
    cmd->add_option("--precond", f.preconds, "hhqr, mgs, ns, tridiag")->delimiter(',');
    if (forward) {
        cmd->add_option("--variant", f.variants, "jacobi, mp2, mp3")->delimiter(',');
        cmd->add_option("--baseline", f.baseline, "CSV with the same header whose rows are appended");
    }
    if (cond)
        cmd->add_option("--matrix", f.matrices,
                        "extra matrices: hilbert:N, invhilbert:N, pascal:N, lauchli:N:MU, identity:N, "
                        "randsvd:N:KAPPA:MODE, file:PATH")
            ->delimiter(',');
    cmd->add_option("--seed", f.seed, "base seed");
    cmd->add_option("--out", f.out, "CSV output file (default stdout)");
    cmd->add_option("--format", f.format, "hex or dec")->check(CLI::IsMember({"hex", "dec"}));
    cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)");
    cmd->add_flag("--full", f.full, "use the large grid (slow)");
    cmd->add_flag("--timing", f.timing, "fill the wall_time_s column (makes output non-reproducible)");
}

mpj::ExperimentOptions resolve(const std::string& name, const GridFlags& f, CLI::App* cmd)
{
    auto o = mpj::default_options(name, f.full);
    if (cmd->count("--n"))
        o.sizes = f.sizes;
    if (cmd->count("--kappa"))
        o.kappas = f.kappas;
    if (cmd->count("--mode"))
        o.modes = f.modes;
    if (cmd->count("--precond")) {
        o.methods.clear();
        for (const auto& s : f.preconds)
            o.methods.push_back(mpj::parse_precond_method(s));
    }
    if (cmd->get_option_no_throw("--variant") && cmd->count("--variant")) {
        o.variants.clear();
        for (const auto& s : f.variants)
            o.variants.push_back(mpj::parse_variant(s));
    }
    if (cmd->get_option_no_throw("--matrix") && cmd->count("--matrix"))
        o.matrices = f.matrices;
    for (double k : o.kappas)
        if (!(k >= 1.0))
            throw mpj::DomainError("kappa must be >= 1");
    o.seed = f.seed;
    o.threads = f.threads;
    o.timing = f.timing;
    return o;
}

class Output {
public:
    explicit Output(const std::string& path)
    {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_)
                throw mpj::Error("cannot open '" + path + "' for writing");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

int run_experiment(const std::string& name, const GridFlags& f, CLI::App* cmd)
{
    const auto opt = resolve(name, f, cmd);
    std::vector<std::string> baseline;
    if (!f.baseline.empty()) {
        std::ifstream in(f.baseline);
        if (!in)
            throw mpj::Error("cannot open baseline '" + f.baseline + "'");
        baseline = mpj::read_baseline(in);
    }
    Output out(f.out);
    mpj::CsvWriter w(out.stream(), mpj::parse_number_format(f.format));
    if (name == "off")
        mpj::run_off_experiment(opt, w);
    else if (name == "fwd-vs-kappa")
        mpj::run_fwd_vs_kappa(opt, w);
    else if (name == "fwd-vs-n")
        mpj::run_fwd_vs_n(opt, w);
    else
        mpj::run_cond_reduction(opt, w, std::cerr);
    for (const auto& row : baseline)
        w.write_raw(row);
    return 0;
}

struct SolveFlags {
    std::string file;
    std::string variant = "mp3";
    std::string precond = "hhqr";
    std::string format = "hex";
    std::string vectors;
};

int run_solve(const SolveFlags& f)
{
    const auto fmt = mpj::parse_number_format(f.format);
    mpj::SolveConfig cfg;
    cfg.variant = mpj::parse_variant(f.variant);
    cfg.precond_method = mpj::parse_precond_method(f.precond);
    cfg.accumulate = !f.vectors.empty();

    const auto a = mpj::read_matrix_file(f.file);
    const auto res = mpj::solve(a, cfg);
    if (!f.vectors.empty()) {
        std::ofstream v(f.vectors);
        if (!v)
            throw mpj::Error("cannot open '" + f.vectors + "' for writing");
        mpj::write_matrix(v, res.q, fmt);
    }

    const auto& d = res.diagnostics;
    auto yn = [](const std::optional<bool>& b) { return b ? (*b ? "yes" : "no") : "n/a"; };
    std::cout << "# variant: " << f.variant << '\n';
    if (cfg.variant != mpj::Variant::Jacobi)
        std::cout << "# precond: " << f.precond << '\n';
    std::cout << "# n: " << a.n() << '\n'
              << "# sweeps: " << res.report.sweeps << '\n'
              << "# rotations: " << res.report.rotations_applied << '\n'
              << "# converged: " << (res.report.converged ? "yes" : "no") << '\n'
              << "# scale_exponent: " << d.scale_exponent << '\n'
              << "# off_ratio: " << mpj::format_number(d.off_ratio, mpj::NumberFormat::Decimal) << '\n'
              << "# theta: " << mpj::format_number(d.theta, mpj::NumberFormat::Decimal) << '\n';
    if (cfg.variant != mpj::Variant::Jacobi)
        std::cout << "# kappa_estimate: " << mpj::format_number(d.kappa_estimate, mpj::NumberFormat::Decimal) << '\n'
                  << "# assumptions: A1=" << yn(d.a1) << " A2=" << yn(d.a2) << " A3=" << yn(d.a3) << '\n';
    for (const auto& w : d.warnings)
        std::cout << "# warning: " << w << '\n';
    for (double l : res.lambda)
        std::cout << mpj::format_number(l, fmt) << '\n';
    return res.report.converged ? 0 : 4;
}

struct GenerateFlags {
    std::string matrix;
    std::uint64_t seed = 1;
    std::string format = "hex";
    std::string out;
};

int run_generate(const GenerateFlags& f)
{
    const auto spec = mpj::parse_matrix_spec(f.matrix, f.seed);
    const auto a = spec.make();
    Output out(f.out);
    mpj::write_matrix(out.stream(), a, mpj::parse_number_format(f.format));
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mixed-precision preconditioned Jacobi eigensolver"};
    app.require_subcommand(1);
    bool show_kernels = false;
    app.add_flag("--kernels", show_kernels, "print the selected kernel set to stderr");

    const std::vector<std::pair<std::string, std::string>> experiments{
        {"off", "off(A~)/||A||_F against n for each preconditioner"},
        {"fwd-vs-kappa", "maximal relative forward error against kappa_2(A)"},
        {"fwd-vs-n", "maximal relative forward error against n"},
        {"cond-reduction", "kappa_2(A), scaled condition numbers of A and A~"}};
    std::vector<GridFlags> grid(experiments.size());
    std::vector<CLI::App*> grid_cmds;
    for (std::size_t i = 0; i < experiments.size(); ++i) {
        auto* c = app.add_subcommand(experiments[i].first, experiments[i].second);
        const bool forward = experiments[i].first.rfind("fwd", 0) == 0;
        add_grid_flags(c, grid[i], forward, experiments[i].first == "cond-reduction");
        grid_cmds.push_back(c);
    }

    SolveFlags sf;
    auto* solve = app.add_subcommand("solve", "eigenvalues of a matrix file");
    solve->add_option("file", sf.file, "matrix file (n, then n rows)")->required();
    solve->add_option("--variant", sf.variant, "jacobi, mp2, mp3")->check(CLI::IsMember({"jacobi", "mp2", "mp3"}));
    solve->add_option("--precond", sf.precond, "hhqr, mgs, ns, tridiag")
        ->check(CLI::IsMember({"hhqr", "mgs", "ns", "tridiag"}));
    solve->add_option("--format", sf.format, "hex or dec")->check(CLI::IsMember({"hex", "dec"}));
    solve->add_option("--out", sf.vectors, "write the eigenvector matrix here");

    GenerateFlags gf;
    auto* gen = app.add_subcommand("generate", "write a test matrix in the matrix file format");
    gen->add_option("--matrix", gf.matrix, "matrix spec, e.g. randsvd:100:1e8:3 or pascal:15")->required();
    gen->add_option("--seed", gf.seed, "base seed");
    gen->add_option("--format", gf.format, "hex or dec")->check(CLI::IsMember({"hex", "dec"}));
    gen->add_option("--out", gf.out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    if (show_kernels)
        std::cerr << "kernels: " << mpj::kernels::active().name << '\n';

    try {
        for (std::size_t i = 0; i < grid_cmds.size(); ++i)
            if (grid_cmds[i]->parsed())
                return run_experiment(experiments[i].first, grid[i], grid_cmds[i]);
        if (solve->parsed())
            return run_solve(sf);
        if (gen->parsed())
            return run_generate(gf);
    } catch (const mpj::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const mpj::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const mpj::IndefiniteMatrixError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
