#ifndef POROWG_EXPERIMENTS_HPP
#define POROWG_EXPERIMENTS_HPP

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace porowg {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One experiment sweep: a problem family, mesh sizes, and parameter lists.
/// Defaults mirror the reference setups: tolerance 1e-10 for 2D elasticity,
/// 1e-8 otherwise, 1000 iterations max, restart 30, zero initial guess,
/// incomplete-Cholesky drop tolerance 1e-3, nested tolerance 1e-12.
struct ExperimentConfig {
    std::string problem = "elasticity2d"; // elasticity2d|elasticity3d|poro2_2d|poro2_3d|poro3_2d|poro3_3d
    std::vector<int> mesh_n = {16, 32, 64};
    std::vector<double> lambda = {1.0, 1e4};
    std::vector<double> dt = {1e-3};
    std::string solver = "minres"; // minres|gmres
    std::string precond = "auto";  // diag|tri|auto (diag with minres, tri with gmres)
    bool regularize = true;
    double tol = -1.0; // negative: per-problem default
    int maxit = 1000;
    int restart = 30;
    std::string rho_mode = "auto"; // auto | fixed
    double rho_value = 1.0;
    unsigned seed = 0;
    std::string output = "results.csv";

    bool is_poro() const { return problem.rfind("poro", 0) == 0; }
    bool is_three_field() const { return problem.rfind("poro3", 0) == 0; }
    int dim() const;
    double effective_tol() const;
    void validate() const;
};

struct ResultRow {
    std::string problem;
    int dim = 0;
    int mesh_n = 0;
    int n_elements = 0;
    int n_facets = 0;
    double lambda = 0.0;
    double dt = 0.0;
    std::string solver;
    std::string precond;
    int regularized = 1;
    double rho = 0.0;
    int outer_iters = 0;
    long inner_iters_total = 0;
    double final_relres = 0.0;
    double wall_time_s = 0.0;
    bool ok = true;
    std::string error;
};

/// Runs every (mesh_n, lambda, dt) cell; failures are recorded in-row and
/// the sweep continues. Deterministic for a fixed config up to wall times.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& os);
std::vector<ResultRow> parse_csv(std::istream& is);
/// Markdown table with one row per (solver, regularized, dt, lambda)
/// combination and one column per mesh size, mirroring the iteration-count
/// table layout.
std::string emit_markdown(const std::vector<ResultRow>& rows);

/// Flat key = value config file (TOML subset: comments with #, lists
/// comma-separated, optional brackets).
ExperimentConfig load_config_file(const std::string& path);
void apply_config_line(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Runs every lemma check on dense-feasible meshes and streams one CSV row
/// per report. Returns the number of failed hard assertions.
int run_oracle_suite(int max_n_2d, int max_n_3d, std::ostream& csv);

} // namespace porowg

#endif
