#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "porowg/experiments.hpp"
#include "porowg/mesh.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolverFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitOracleFailure = 3;

int run_sweep(const porowg::ExperimentConfig& config, const std::string& markdown_path)
{
    const std::vector<porowg::ResultRow> rows = porowg::run_experiment(config);

    std::ofstream out(config.output);
    if (!out) throw porowg::ConfigError("cannot write output file: " + config.output);
    porowg::emit_csv(rows, out);
    if (!markdown_path.empty()) {
        std::ofstream md(markdown_path);
        if (!md) throw porowg::ConfigError("cannot write markdown file: " + markdown_path);
        md << porowg::emit_markdown(rows);
    }

    bool any_failed = false;
    for (const auto& r : rows) {
        std::cout << r.problem << " n=" << r.mesh_n << " lambda=" << r.lambda;
        if (r.dt > 0) std::cout << " dt=" << r.dt;
        std::cout << " " << r.solver << "/" << r.precond << ": ";
        if (r.ok) {
            std::cout << r.outer_iters << " iterations (relres " << r.final_relres << ")\n";
        } else {
            std::cout << "FAILED (" << r.error << ")\n";
            any_failed = true;
        }
    }
    std::cout << "wrote " << config.output << "\n";
    return any_failed ? kExitSolverFailure : kExitOk;
}

int run_oracle(int max_n, int max_n_3d, const std::string& out_path)
{
    std::ostringstream csv;
    const int violations = porowg::run_oracle_suite(max_n, max_n_3d, csv);
    if (out_path.empty() || out_path == "-") {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_path);
        if (!out) throw porowg::ConfigError("cannot write oracle report: " + out_path);
        out << csv.str();
    }
    if (violations > 0) {
        std::cerr << violations << " lemma check(s) violated\n";
        return kExitOracleFailure;
    }
    std::cout << "all lemma checks passed\n";
    return kExitOk;
}

int run_mesh(int dim, int n, const std::string& dump_path, bool stats)
{
    const porowg::Mesh mesh = porowg::build_structured_mesh(dim, n);
    if (stats) {
        const porowg::MeshStats s = porowg::mesh_stats(mesh);
        std::cout << "dim " << mesh.dim << " N " << s.n_elements << " N_f " << s.n_facets
                  << " boundary_facets " << s.n_boundary_facets << " h_max " << s.h_max
                  << " min_volume " << s.min_volume << " max_volume " << s.max_volume << "\n";
    }
    if (!dump_path.empty()) {
        if (dump_path == "-") {
            porowg::dump_mesh(mesh, std::cout);
        } else {
            std::ofstream out(dump_path);
            if (!out) throw porowg::ConfigError("cannot write mesh file: " + dump_path);
            porowg::dump_mesh(mesh, out);
        }
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"weak Galerkin poroelasticity solver and experiment driver"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run an experiment sweep");
    std::string config_path;
    std::vector<std::string> overrides;
    std::string markdown_path;
    run->add_option("--config", config_path, "config file (flat key = value)");
    run->add_option("--set", overrides, "config override key=value (repeatable)");
    run->add_option("--markdown", markdown_path, "also emit a markdown table");
    // Every config key doubles as a flag of the same name.
    std::vector<std::pair<std::string, std::string>> flag_values;
    for (const char* key : {"problem", "mesh_n", "lambda", "dt", "solver", "precond",
                            "regularize", "tol", "maxit", "restart", "rho_mode", "rho_value",
                            "seed", "output", "out"}) {
        run->add_option_function<std::string>(
               std::string("--") + key,
               [&flag_values, key](const std::string& v) { flag_values.push_back({key, v}); },
               std::string("config key ") + key)
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }

    auto* oracle = app.add_subcommand("oracle", "run the dense lemma-verification suite");
    int max_n = 8;
    int max_n_3d = 2;
    std::string oracle_out;
    oracle->add_option("--max-n", max_n, "largest 2D subdivision (cap 8)");
    oracle->add_option("--max-n-3d", max_n_3d, "largest 3D subdivision (cap 3)");
    oracle->add_option("--out", oracle_out, "oracle CSV path (default stdout)");

    auto* mesh_cmd = app.add_subcommand("mesh", "build and inspect a structured mesh");
    int dim = 2;
    int n = 4;
    std::string dump_path;
    bool stats = false;
    mesh_cmd->add_option("--dim", dim, "2 or 3")->required();
    mesh_cmd->add_option("--n", n, "subdivisions per axis")->required();
    mesh_cmd->add_option("--dump", dump_path, "write the plain-text mesh (- for stdout)");
    mesh_cmd->add_flag("--stats", stats, "print mesh statistics");

    try {
        app.parse(argc, argv);
        if (run->parsed()) {
            porowg::ExperimentConfig config;
            if (!config_path.empty()) config = porowg::load_config_file(config_path);
            for (const auto& [k, v] : flag_values) porowg::apply_config_line(config, k, v);
            for (const auto& kv : overrides) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos)
                    throw porowg::ConfigError("override must be key=value, got: " + kv);
                porowg::apply_config_line(config, kv.substr(0, eq), kv.substr(eq + 1));
            }
            config.validate();
            return run_sweep(config, markdown_path);
        }
        if (oracle->parsed()) return run_oracle(max_n, max_n_3d, oracle_out);
        if (mesh_cmd->parsed()) return run_mesh(dim, n, dump_path, stats);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    } catch (const porowg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolverFailure;
    }
    return kExitOk;
}
