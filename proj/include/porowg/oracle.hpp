#ifndef POROWG_ORACLE_HPP
#define POROWG_ORACLE_HPP

#include <string>
#include <vector>

#include "porowg/dense.hpp"
#include "porowg/poro2.hpp"
#include "porowg/problems.hpp"
#include "porowg/wgfem.hpp"

namespace porowg {

/// Constants entering the spectrum bounds, measured on a given mesh: the
/// inf-sup constant beta, gamma = 1^T w, and the derived interval endpoints.
struct BoundConstants {
    double beta = 0.0;
    double gamma = 0.0;
    double c3 = 0.0;
    double c4 = 0.0;
    double c5 = 0.0;
    double lambda_min_m = 0.0;
    double lambda_max_m = 0.0;
    double lambda_min_dtilde = 0.0;
    double rho_formula = 0.0; // the exact admissible-rho expression
};

struct SpectrumReport {
    std::string lemma;
    int mesh_n = 0;
    double lambda_param = 0.0;
    std::vector<double> eigenvalues; // sorted
    double lower = 0.0;
    double upper = 0.0;
    double slack_lower = 0.0;
    double slack_upper = 0.0;
    bool has_gap = false; // interval-union bounds exclude a band around zero
    double gap_lo = 0.0;
    double gap_hi = 0.0;
    std::vector<double> violations;
    bool pass = true;

    double min_eig() const { return eigenvalues.front(); }
    double max_eig() const { return eigenvalues.back(); }
};

enum class LemmaCase { elasticity, two_field, three_field };

inline constexpr int kDenseDimensionCap = 4000;

/// Full (generalized) symmetric eigendecomposition; refuses dimensions
/// above the desk-scale cap.
std::vector<double> dense_spectrum(const DenseMatrix& op, const DenseMatrix* generalized_rhs);

/// Inf-sup constant: square root of the smallest nonzero generalized
/// eigenvalue of B A1^{-1} B^T against M, the constant direction excluded.
double measure_inf_sup(const WgBlocks& blocks);

/// All measured constants for the given blocks and rho of Eq-style choice.
BoundConstants measure_constants(const WgBlocks& blocks, const PhysicalParams& params);

/// Constructs each lemma's matrix explicitly on a dense-feasible mesh and
/// checks the claimed interval with a documented slack. Violations are data,
/// not errors. full_operator_checks additionally verifies the preconditioned
/// system spectra (dimension displacement + pressure, noticeably costlier).
std::vector<SpectrumReport> verify_bounds(LemmaCase which, const WgBlocks& blocks,
                                          const PhysicalParams& params, double rho,
                                          int mesh_n, bool full_operator_checks = true);

/// Broken H1-type error ||grad u - grad_w u_h|| over the mesh.
double error_grad_u(const Mesh& mesh, const WgField& u, const GradField& exact_grad);
/// L2 pressure error against the piecewise-constant interior values.
double error_p(const Mesh& mesh, const WgField& p, const ScalarField& exact);

struct RateRow {
    int n = 0;
    double h = 0.0;
    double dt = 0.0;
    double err_grad_u = 0.0;
    double err_p = 0.0;
    double total() const { return err_grad_u + err_p; }
};

struct RateTable {
    std::vector<RateRow> rows;
    /// Least-squares slope of log(total error) against log h.
    double spatial_slope() const;
};

/// Manufactured-solution study for the 2D poroelasticity example: dt scales
/// with h (steps = n), errors evaluated at final time.
RateTable convergence_study_poro_2d(const PhysicalParams& base, const std::vector<int>& mesh_ns,
                                    double final_time, int time_power,
                                    const PoroSolveOptions& opts);

struct TemporalRow {
    int steps = 0;
    double dt = 0.0;
    double diff = 0.0; // distance to the small-dt reference trajectory
};

/// Time-discretization error at fixed h, isolated by comparing against a
/// fine-step reference run of the same discretization.
std::vector<TemporalRow> temporal_study_poro_2d(const PhysicalParams& base, int mesh_n,
                                                double final_time,
                                                const std::vector<int>& steps_list,
                                                int reference_steps, int time_power,
                                                const PoroSolveOptions& opts);

double least_squares_slope(const std::vector<double>& log_x, const std::vector<double>& log_y);

} // namespace porowg

#endif
