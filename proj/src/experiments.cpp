#include "porowg/experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "porowg/elasticity.hpp"
#include "porowg/oracle.hpp"
#include "porowg/poro3.hpp"
#include "porowg/problems.hpp"

namespace porowg {

namespace {

using Clock = std::chrono::steady_clock;

KrylovMethod parse_method(const std::string& s)
{
    if (s == "minres") return KrylovMethod::minres;
    if (s == "gmres") return KrylovMethod::gmres;
    throw ConfigError("unknown solver '" + s + "' (expected minres or gmres)");
}

int parse_precond(const std::string& s)
{
    if (s == "auto") return -1;
    if (s == "diag") return static_cast<int>(PrecondKind::diag);
    if (s == "tri") return static_cast<int>(PrecondKind::tri);
    throw ConfigError("unknown precond '" + s + "' (expected diag, tri, or auto)");
}

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(std::string v)
{
    for (char& c : v)
        if (c == '[' || c == ']') c = ' ';
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(v);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace

int ExperimentConfig::dim() const { return problem.find("3d") != std::string::npos ? 3 : 2; }

double ExperimentConfig::effective_tol() const
{
    if (tol > 0.0) return tol;
    if (problem == "elasticity2d") return 1e-10;
    if (problem == "elasticity3d") return 1e-8;
    return 1e-8;
}

void ExperimentConfig::validate() const
{
    static const char* known[] = {"elasticity2d", "elasticity3d", "poro2_2d",
                                  "poro2_3d",     "poro3_2d",     "poro3_3d"};
    bool ok = false;
    for (const char* k : known) ok = ok || problem == k;
    if (!ok) throw ConfigError("unknown problem '" + problem + "'");
    if (mesh_n.empty()) throw ConfigError("mesh_n sweep list is empty");
    if (lambda.empty()) throw ConfigError("lambda sweep list is empty");
    if (is_poro() && dt.empty()) throw ConfigError("dt sweep list is empty");
    for (int n : mesh_n)
        if (n < 1) throw ConfigError("mesh_n entries must be >= 1");
    if (!(effective_tol() > 0.0 && effective_tol() < 1.0))
        throw ConfigError("tol must lie in (0, 1)");
    if (restart < 1) throw ConfigError("restart must be >= 1");
    if (maxit < 1) throw ConfigError("maxit must be >= 1");
    parse_method(solver);
    parse_precond(precond);
    if (rho_mode != "auto" && rho_mode != "fixed")
        throw ConfigError("rho_mode must be auto or fixed");
    if (rho_mode == "fixed" && !(rho_value > 0.0))
        throw ConfigError("fixed rho must be positive");
}

namespace {

ProblemSetup setup_for(const ExperimentConfig& config, const PhysicalParams& params)
{
    if (config.problem == "elasticity2d") return make_elasticity_2d(params);
    if (config.problem == "elasticity3d") return make_elasticity_3d(params);
    if (config.dim() == 2) return make_poro_2d(params);
    return make_poro_3d(params);
}

ResultRow run_cell(const ExperimentConfig& config, const Mesh& mesh, const WgBlocks& blocks,
                   const PhysicalParams& params, int mesh_n)
{
    ResultRow row;
    row.problem = config.problem;
    row.dim = config.dim();
    row.mesh_n = mesh_n;
    row.n_elements = mesh.n_elements();
    row.n_facets = mesh.n_facets();
    row.lambda = params.lambda;
    row.dt = config.is_poro() ? params.dt : 0.0;
    row.solver = config.solver;
    const KrylovMethod method = parse_method(config.solver);
    const int precond = parse_precond(config.precond);
    const PrecondKind kind = precond >= 0
                                 ? static_cast<PrecondKind>(precond)
                                 : (method == KrylovMethod::minres ? PrecondKind::diag
                                                                   : PrecondKind::tri);
    row.precond = kind == PrecondKind::diag ? "diag" : "tri";
    row.regularized = config.regularize ? 1 : 0;

    const ProblemSetup prob = setup_for(config, params);
    const auto t0 = Clock::now();
    SolveReport rep;

    if (!config.is_poro()) {
        const double rho = config.rho_mode == "fixed" ? config.rho_value : 1.0;
        row.rho = rho;
        ElasticityOptions opts;
        opts.method = method;
        opts.precond_override = precond;
        opts.tol = config.effective_tol();
        opts.maxit = config.maxit;
        opts.restart = config.restart;
        const Loads loads = assemble_loads(blocks, prob.body_force(), nullptr, params);
        const std::vector<double> rhs1 = elasticity_rhs(blocks, params, loads.b1);
        const RegularizedElasticitySystem sys(blocks, params, rho);
        std::vector<double> u, z;
        rep = sys.solve(rhs1, opts, u, z);
    } else {
        PoroSolveOptions opts;
        opts.method = method;
        opts.precond_override = precond;
        opts.tol = config.effective_tol();
        opts.maxit = config.maxit;
        opts.restart = config.restart;
        const PoroState prev = PoroState::zero(mesh);
        const double t1 = params.dt; // first implicit Euler level
        if (!config.is_three_field()) {
            opts.elasticity_rho = config.rho_mode == "fixed" ? config.rho_value : 1.0;
            row.rho = opts.elasticity_rho;
            const TwoFieldSystem system(blocks, params, opts);
            auto [state, r] = solve_two_field_step(system, prob.body_force(t1),
                                                   prob.source(t1), prev, t1);
            rep = r;
        } else {
            const double rho_override = config.rho_mode == "fixed" ? config.rho_value : -1.0;
            const ThreeFieldSystem system(blocks, params, config.regularize, opts, rho_override);
            row.rho = system.rho();
            auto [state, z, r] = solve_three_field_step(system, prob.body_force(t1),
                                                        prob.source(t1), prev, t1);
            rep = r;
        }
    }

    row.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
    row.outer_iters = rep.iterations;
    row.inner_iters_total = rep.inner_iterations_total;
    row.final_relres = rep.final_relres;
    row.ok = rep.converged;
    if (!rep.converged) row.error = rep.stagnated ? "stagnated" : "maxit";
    return row;
}

} // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& config)
{
    config.validate();
    std::vector<ResultRow> rows;
    const std::vector<double> dts = config.is_poro() ? config.dt : std::vector<double>{1e-3};

    for (int n : config.mesh_n) {
        const Mesh mesh = build_structured_mesh(config.dim(), n);
        for (double dt : dts) {
            // The blocks depend on dt but not on lambda; assemble once per pair.
            PhysicalParams params;
            params.dt = dt;
            if (config.problem == "elasticity2d" || config.problem == "elasticity3d") {
                params.mu = 0.5;
            } else {
                params.mu = 1.0;
            }
            params.lambda = config.lambda.front();
            const ProblemSetup bc_probe = setup_for(config, params);
            WgBlocks blocks = config.is_poro()
                                  ? assemble_blocks(mesh, params, bc_probe.u_dirichlet, nullptr)
                                  : assemble_elasticity(mesh, params, bc_probe.u_dirichlet);
            for (double lambda : config.lambda) {
                params.lambda = lambda;
                ResultRow row;
                try {
                    row = run_cell(config, mesh, blocks, params, n);
                } catch (const std::exception& e) {
                    row.problem = config.problem;
                    row.dim = config.dim();
                    row.mesh_n = n;
                    row.n_elements = mesh.n_elements();
                    row.n_facets = mesh.n_facets();
                    row.lambda = lambda;
                    row.dt = config.is_poro() ? dt : 0.0;
                    row.solver = config.solver;
                    row.precond = config.precond;
                    row.regularized = config.regularize ? 1 : 0;
                    row.outer_iters = -1;
                    row.ok = false;
                    row.error = e.what();
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& os)
{
    os << "problem,dim,mesh_n,N,N_f,lambda,dt,solver,precond,regularized,rho,"
          "outer_iters,inner_iters_total,final_relres,wall_time_s\n";
    os.precision(12);
    for (const auto& r : rows) {
        os << r.problem << ',' << r.dim << ',' << r.mesh_n << ',' << r.n_elements << ','
           << r.n_facets << ',' << r.lambda << ',' << r.dt << ',' << r.solver << ','
           << r.precond << ',' << r.regularized << ',' << r.rho << ',' << r.outer_iters << ','
           << r.inner_iters_total << ',' << r.final_relres << ',' << r.wall_time_s << '\n';
    }
}

std::vector<ResultRow> parse_csv(std::istream& is)
{
    std::vector<ResultRow> rows;
    std::string line;
    bool header = true;
    while (std::getline(is, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (trim(line).empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) f.push_back(item);
        if (f.size() != 15) throw std::runtime_error("parse_csv: malformed row");
        ResultRow r;
        r.problem = f[0];
        r.dim = std::stoi(f[1]);
        r.mesh_n = std::stoi(f[2]);
        r.n_elements = std::stoi(f[3]);
        r.n_facets = std::stoi(f[4]);
        r.lambda = std::stod(f[5]);
        r.dt = std::stod(f[6]);
        r.solver = f[7];
        r.precond = f[8];
        r.regularized = std::stoi(f[9]);
        r.rho = std::stod(f[10]);
        r.outer_iters = std::stoi(f[11]);
        r.inner_iters_total = std::stol(f[12]);
        r.final_relres = std::stod(f[13]);
        r.wall_time_s = std::stod(f[14]);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string emit_markdown(const std::vector<ResultRow>& rows)
{
    // Rows: (solver, regularized, dt, lambda) in first-appearance order;
    // columns: mesh sizes in first-appearance order.
    std::vector<std::tuple<std::string, int, double, double>> row_keys;
    std::vector<int> col_keys;
    std::map<std::pair<std::size_t, int>, int> cells;
    for (const auto& r : rows) {
        const auto key = std::make_tuple(r.solver, r.regularized, r.dt, r.lambda);
        std::size_t ri = 0;
        for (; ri < row_keys.size(); ++ri)
            if (row_keys[ri] == key) break;
        if (ri == row_keys.size()) row_keys.push_back(key);
        bool found = false;
        for (int c : col_keys) found = found || c == r.n_elements;
        if (!found) col_keys.push_back(r.n_elements);
        cells[{ri, r.n_elements}] = r.outer_iters;
    }

    std::ostringstream os;
    os << "| solver | regularized | dt | lambda |";
    for (int c : col_keys) os << " N=" << c << " |";
    os << "\n|---|---|---|---|";
    for (std::size_t i = 0; i < col_keys.size(); ++i) os << "---|";
    os << "\n";
    for (std::size_t ri = 0; ri < row_keys.size(); ++ri) {
        const auto& [solver, reg, dt, lambda] = row_keys[ri];
        os << "| " << solver << " | " << reg << " | " << dt << " | " << lambda << " |";
        for (int c : col_keys) {
            const auto it = cells.find({ri, c});
            if (it == cells.end())
                os << " - |";
            else
                os << ' ' << it->second << " |";
        }
        os << "\n";
    }
    return os.str();
}

void apply_config_line(ExperimentConfig& config, const std::string& key, const std::string& value)
{
    try {
        if (key == "problem") config.problem = value;
        else if (key == "mesh_n") {
            config.mesh_n.clear();
            for (const auto& s : split_list(value)) config.mesh_n.push_back(std::stoi(s));
        } else if (key == "lambda") {
            config.lambda.clear();
            for (const auto& s : split_list(value)) config.lambda.push_back(std::stod(s));
        } else if (key == "dt") {
            config.dt.clear();
            for (const auto& s : split_list(value)) config.dt.push_back(std::stod(s));
        } else if (key == "solver") config.solver = value;
        else if (key == "precond") config.precond = value;
        else if (key == "regularize") config.regularize = (value == "on" || value == "true" || value == "1");
        else if (key == "tol") config.tol = std::stod(value);
        else if (key == "maxit") config.maxit = std::stoi(value);
        else if (key == "restart") config.restart = std::stoi(value);
        else if (key == "rho_mode") config.rho_mode = value;
        else if (key == "rho_value") config.rho_value = std::stod(value);
        else if (key == "seed") config.seed = static_cast<unsigned>(std::stoul(value));
        else if (key == "output" || key == "out") config.output = value;
        else throw ConfigError("unknown config key '" + key + "'");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("bad value for config key '" + key + "': " + value);
    }
}

ExperimentConfig load_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    ExperimentConfig config;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value, got: " + line);
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        apply_config_line(config, key, value);
    }
    return config;
}

int run_oracle_suite(int max_n_2d, int max_n_3d, std::ostream& csv)
{
    if (max_n_2d > 8 || max_n_3d > 3)
        throw ConfigError("oracle: dense checks are capped at n <= 8 (2D) and n <= 3 (3D)");
    csv << "lemma,dim,mesh_n,lambda,min_eig,max_eig,lower,upper,pass\n";
    csv.precision(10);
    int violations = 0;

    const double lambdas[] = {1.0, 1e2, 1e4};
    auto emit = [&](const SpectrumReport& r, int dim) {
        csv << r.lemma << ',' << dim << ',' << r.mesh_n << ',' << r.lambda_param << ','
            << r.min_eig() << ',' << r.max_eig() << ',' << r.lower << ',' << r.upper << ','
            << (r.pass ? 1 : 0) << '\n';
        if (!r.pass) ++violations;
    };

    for (int dim : {2, 3}) {
        std::vector<int> ns;
        if (dim == 2) {
            for (int n : {2, 4, 8})
                if (n <= max_n_2d) ns.push_back(n);
        } else {
            for (int n : {1, 2, 3})
                if (n <= max_n_3d) ns.push_back(n);
        }
        for (int n : ns) {
            const Mesh mesh = build_structured_mesh(dim, n);
            // The preconditioned-system spectra live on the full dof space;
            // keep those eigensolves to a few hundred unknowns.
            const bool full_checks =
                mesh.n_elements() * (dim + 2) + DofMap::build(mesh, dim).n_free() <= 700;
            for (double lambda : lambdas) {
                { // elasticity lemmas with the setup of the elasticity tables
                    PhysicalParams params;
                    params.mu = 0.5;
                    params.lambda = lambda;
                    const WgBlocks blocks = assemble_blocks(mesh, params);
                    for (auto& r :
                         verify_bounds(LemmaCase::elasticity, blocks, params, 1.0, n, full_checks))
                        emit(r, dim);
                }
                { // poroelasticity lemmas
                    PhysicalParams params;
                    params.mu = 1.0;
                    params.lambda = lambda;
                    params.dt = 1e-3;
                    const WgBlocks blocks = assemble_blocks(mesh, params);
                    const double rho = choose_rho(blocks.M_int);
                    for (auto& r :
                         verify_bounds(LemmaCase::two_field, blocks, params, rho, n, full_checks))
                        emit(r, dim);
                    for (auto& r : verify_bounds(LemmaCase::three_field, blocks, params, rho, n))
                        emit(r, dim);
                }
            }
        }
    }
    return violations;
}

} // namespace porowg
