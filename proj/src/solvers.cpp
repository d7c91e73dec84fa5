#include "porowg/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

#include "porowg/vec.hpp"

namespace porowg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

thread_local int g_krylov_depth = 0;
thread_local int g_krylov_max_depth = 0;

} // namespace

KrylovScope::KrylovScope()
{
    ++g_krylov_depth;
    g_krylov_max_depth = std::max(g_krylov_max_depth, g_krylov_depth);
}

KrylovScope::~KrylovScope() { --g_krylov_depth; }

int KrylovScope::current_depth() { return g_krylov_depth; }
int KrylovScope::max_depth_seen() { return g_krylov_max_depth; }
void KrylovScope::reset_max() { g_krylov_max_depth = g_krylov_depth; }

LinearOperator LinearOperator::from_matrix(const SparseMatrix& m, bool symmetric)
{
    if (m.rows() != m.cols() && symmetric)
        throw std::invalid_argument("LinearOperator: non-square matrix cannot be symmetric");
    return LinearOperator(m.rows(),
                          [&m](std::span<const double> x, std::span<double> y) { m.apply(x, y); },
                          symmetric);
}

LinearOperator LinearOperator::identity(int n)
{
    return LinearOperator(n,
                          [](std::span<const double> x, std::span<double> y) {
                              std::copy(x.begin(), x.end(), y.begin());
                          },
                          true);
}

std::vector<double> LinearOperator::apply(std::span<const double> x) const
{
    std::vector<double> y(static_cast<std::size_t>(n_), 0.0);
    apply_(x, y);
    return y;
}

double LinearOperator::symmetry_defect(unsigned seed, int probes) const
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> x(n_), y(n_), ax(n_), ay(n_);
    double defect = 0.0;
    for (int p = 0; p < probes; ++p) {
        for (auto& v : x) v = dist(rng);
        for (auto& v : y) v = dist(rng);
        apply_(x, ax);
        apply_(y, ay);
        const double lhs = dot(x, ay);
        const double rhs = dot(y, ax);
        const double scale = norm2(x) * norm2(y) * std::max(norm2(ax) / std::max(norm2(x), 1e-300), 1e-300);
        defect = std::max(defect, std::abs(lhs - rhs) / std::max(scale, 1e-300));
    }
    return defect;
}

// ---------------------------------------------------------------------------
// Incomplete Cholesky with threshold dropping (column-oriented ICT)
// ---------------------------------------------------------------------------

namespace {

struct IctResult {
    bool ok = false;
    std::vector<int> col_ptr;
    std::vector<int> row_idx;
    std::vector<double> val;
};

IctResult ict_attempt(const SparseMatrix& a, double droptol, double shift)
{
    const int n = a.rows();
    const auto offs = a.row_offsets();
    const auto cols = a.col_indices();
    const auto vals = a.values();

    // 1-norms of the lower-triangular columns of A drive the drop test.
    std::vector<double> colnorm(static_cast<std::size_t>(n), 0.0);
    for (int r = 0; r < n; ++r)
        for (int k = offs[r]; k < offs[static_cast<std::size_t>(r) + 1]; ++k)
            if (cols[k] <= r) colnorm[cols[k]] += std::abs(vals[k]);

    IctResult res;
    res.col_ptr.assign(static_cast<std::size_t>(n) + 1, 0);

    // L stored column-wise while factoring. rowlist[j] holds, for each
    // finished column i with L(j,i) != 0, the position of that entry so the
    // update loop can start scanning at row j.
    std::vector<std::vector<std::pair<int, int>>> rowlist(static_cast<std::size_t>(n));
    std::vector<double> work(static_cast<std::size_t>(n), 0.0);
    std::vector<int> touched;
    std::vector<char> in_work(static_cast<std::size_t>(n), 0);

    for (int j = 0; j < n; ++j) {
        touched.clear();
        auto touch = [&](int r, double v) {
            if (!in_work[r]) {
                in_work[r] = 1;
                work[r] = 0.0;
                touched.push_back(r);
            }
            work[r] += v;
        };
        for (int k = offs[j]; k < offs[static_cast<std::size_t>(j) + 1]; ++k)
            if (cols[k] >= j) touch(cols[k], vals[k]);
        touch(j, shift);

        for (const auto& [i, pos] : rowlist[j]) {
            const double lji = res.val[pos];
            for (int k = pos; k < res.col_ptr[static_cast<std::size_t>(i) + 1]; ++k)
                touch(res.row_idx[k], -lji * res.val[k]);
        }

        const double diag = work[j];
        if (!(diag > 0.0)) {
            for (int r : touched) in_work[r] = 0;
            return res; // breakdown, retry with a larger shift
        }
        const double ljj = std::sqrt(diag);

        // Collect kept entries sorted by row so later scans are ordered.
        std::vector<std::pair<int, double>> kept;
        kept.reserve(touched.size());
        for (int r : touched) {
            if (r == j) continue;
            if (std::abs(work[r]) >= droptol * colnorm[j]) kept.push_back({r, work[r] / ljj});
            in_work[r] = 0;
        }
        in_work[j] = 0;
        std::sort(kept.begin(), kept.end());

        res.row_idx.push_back(j);
        res.val.push_back(ljj);
        for (const auto& [r, v] : kept) {
            rowlist[r].push_back({j, static_cast<int>(res.row_idx.size())});
            res.row_idx.push_back(r);
            res.val.push_back(v);
        }
        res.col_ptr[static_cast<std::size_t>(j) + 1] = static_cast<int>(res.row_idx.size());
    }
    res.ok = true;
    return res;
}

} // namespace

IncompleteCholesky IncompleteCholesky::factor(const SparseMatrix& a, double droptol)
{
    if (a.rows() != a.cols()) throw std::invalid_argument("ichol: matrix not square");
    const int n = a.rows();
    double diag_mean = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = a.coeff(i, i);
        if (!(d > 0.0)) throw std::invalid_argument("ichol: nonpositive diagonal entry");
        diag_mean += d;
    }
    diag_mean /= std::max(n, 1);

    IncompleteCholesky ic;
    double shift = 0.0;
    for (int attempt = 0; attempt <= 20; ++attempt) {
        IctResult res = ict_attempt(a, droptol, shift);
        if (res.ok) {
            // Columns of L = rows of L^T: assemble both triangles as CSR.
            std::vector<Triplet> tl;
            tl.reserve(res.val.size());
            for (int j = 0; j < n; ++j)
                for (int k = res.col_ptr[j]; k < res.col_ptr[static_cast<std::size_t>(j) + 1]; ++k)
                    tl.push_back({res.row_idx[k], j, res.val[k]});
            ic.lower_ = SparseMatrix::from_triplets(n, n, tl);
            ic.upper_ = ic.lower_.transpose();
            ic.shift_retries_ = attempt;
            ic.shift_used_ = shift;
            return ic;
        }
        shift = (shift == 0.0) ? 1e-3 * diag_mean : 2.0 * shift;
    }
    throw std::runtime_error("ichol: breakdown persists after 20 diagonal shifts");
}

void IncompleteCholesky::solve(std::span<const double> r, std::span<double> y) const
{
    const int n = lower_.rows();
    const auto loffs = lower_.row_offsets();
    const auto lcols = lower_.col_indices();
    const auto lvals = lower_.values();
    // Forward: L z = r. The diagonal entry is the last one in each row.
    for (int i = 0; i < n; ++i) {
        double s = r[i];
        const int end = loffs[static_cast<std::size_t>(i) + 1];
        for (int k = loffs[i]; k < end - 1; ++k) s -= lvals[k] * y[lcols[k]];
        y[i] = s / lvals[end - 1];
    }
    // Backward: L^T y = z. In the CSR of L^T the diagonal entry comes first.
    const auto uoffs = upper_.row_offsets();
    const auto ucols = upper_.col_indices();
    const auto uvals = upper_.values();
    for (int i = n - 1; i >= 0; --i) {
        double s = y[i];
        const int begin = uoffs[i];
        for (int k = begin + 1; k < uoffs[static_cast<std::size_t>(i) + 1]; ++k)
            s -= uvals[k] * y[ucols[k]];
        y[i] = s / uvals[begin];
    }
}

LinearOperator IncompleteCholesky::as_operator() const
{
    return LinearOperator(size(),
                          [this](std::span<const double> r, std::span<double> y) { solve(r, y); },
                          true);
}

// ---------------------------------------------------------------------------
// PCG
// ---------------------------------------------------------------------------

SolveReport pcg(const LinearOperator& a, std::span<const double> b,
                const LinearOperator& minv, double tol, int maxit,
                std::vector<double>& x)
{
    KrylovScope scope;
    const auto t0 = Clock::now();
    const int n = a.size();
    SolveReport rep;
    rep.relative_residuals.push_back(1.0);

    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        set_zero(x);
        rep.converged = true;
        rep.final_relres = 0.0;
        rep.true_relres = 0.0;
        rep.wall_time = seconds_since(t0);
        return rep;
    }

    std::vector<double> r(n), z(n), p(n), ap(n);
    a.apply(x, ap);
    for (int i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    minv.apply(r, z);
    p = z;
    double rz = dot(r, z);

    for (int it = 1; it <= maxit; ++it) {
        a.apply(p, ap);
        const double pap = dot(p, ap);
        if (!(pap > 0.0) || !std::isfinite(pap)) {
            rep.breakdown = true;
            break;
        }
        const double alpha = rz / pap;
        axpy(alpha, p, x);
        axpy(-alpha, ap, r);
        rep.iterations = it;
        const double relres = norm2(r) / bnorm;
        rep.relative_residuals.push_back(relres);
        rep.final_relres = relres;
        if (!std::isfinite(relres)) throw std::runtime_error("pcg: non-finite iterate");
        if (relres <= tol) {
            rep.converged = true;
            break;
        }
        minv.apply(r, z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }

    a.apply(x, ap);
    for (int i = 0; i < n; ++i) ap[i] = b[i] - ap[i];
    rep.true_relres = norm2(ap) / bnorm;
    rep.wall_time = seconds_since(t0);
    return rep;
}

// ---------------------------------------------------------------------------
// MINRES (preconditioned Lanczos formulation)
// ---------------------------------------------------------------------------

SolveReport minres(const LinearOperator& a, std::span<const double> b,
                   const LinearOperator& pinv, double tol, int maxit,
                   std::vector<double>& x)
{
    KrylovScope scope;
    const auto t0 = Clock::now();
    const int n = a.size();
    SolveReport rep;
    rep.relative_residuals.push_back(1.0);

    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        set_zero(x);
        rep.converged = true;
        rep.final_relres = 0.0;
        rep.true_relres = 0.0;
        rep.wall_time = seconds_since(t0);
        return rep;
    }

    std::vector<double> v(n), v_old(n, 0.0), v_new(n), z(n), z_new(n), az(n);
    std::vector<double> w(n, 0.0), w_old(n, 0.0), w_new(n);

    a.apply(x, az);
    for (int i = 0; i < n; ++i) v[i] = b[i] - az[i];
    pinv.apply(v, z);
    double gamma_sq = dot(v, z);
    if (!(gamma_sq >= 0.0))
        throw std::runtime_error("minres: preconditioner is not positive definite");
    double gamma = std::sqrt(gamma_sq);
    const double res0 = gamma; // preconditioned norm of the initial residual
    if (gamma == 0.0) {
        rep.converged = true;
        rep.final_relres = 0.0;
        rep.true_relres = 0.0;
        rep.wall_time = seconds_since(t0);
        return rep;
    }

    double gamma_old = 1.0;
    double eta = gamma;
    double c = 1.0, c_old = 1.0, s = 0.0, s_old = 0.0;

    for (int it = 1; it <= maxit; ++it) {
        // Lanczos step on the preconditioned operator.
        const double inv_gamma = 1.0 / gamma;
        for (int i = 0; i < n; ++i) z[i] *= inv_gamma;
        a.apply(z, az);
        const double delta = dot(az, z);
        for (int i = 0; i < n; ++i)
            v_new[i] = az[i] - (delta * inv_gamma) * v[i] - (gamma / gamma_old) * v_old[i];
        pinv.apply(v_new, z_new);
        double gn_sq = dot(v_new, z_new);
        if (gn_sq < 0.0) gn_sq = 0.0; // roundoff guard
        const double gamma_new = std::sqrt(gn_sq);

        // Givens rotations applied to the tridiagonal system.
        const double alpha0 = c * delta - c_old * s * gamma;
        const double alpha1 = std::sqrt(alpha0 * alpha0 + gamma_new * gamma_new);
        const double alpha2 = s * delta + c_old * c * gamma;
        const double alpha3 = s_old * gamma;
        if (alpha1 == 0.0) {
            rep.breakdown = true;
            rep.converged = true;
            break;
        }
        c_old = c;
        s_old = s;
        c = alpha0 / alpha1;
        s = gamma_new / alpha1;

        for (int i = 0; i < n; ++i)
            w_new[i] = (z[i] - alpha3 * w_old[i] - alpha2 * w[i]) / alpha1;
        axpy(c * eta, w_new, x);
        eta = -s * eta;

        std::swap(w_old, w);
        std::swap(w, w_new);
        std::swap(v_old, v);
        std::swap(v, v_new);
        std::swap(z, z_new);
        gamma_old = gamma;
        gamma = gamma_new;

        rep.iterations = it;
        const double relres = std::abs(eta) / res0;
        rep.relative_residuals.push_back(relres);
        if (!all_finite(x)) throw std::runtime_error("minres: non-finite iterate");
        // Stopping follows the true relative residual, the contract the
        // iteration tables are calibrated against; the preconditioner-norm
        // history above stays monotone and is reported alongside.
        a.apply(x, az);
        double tnorm = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = b[i] - az[i];
            tnorm += d * d;
        }
        rep.true_relres = std::sqrt(tnorm) / bnorm;
        rep.final_relres = rep.true_relres;
        if (rep.true_relres <= tol) {
            rep.converged = true;
            break;
        }
        if (gamma == 0.0) { // Krylov space exhausted; iterate is exact
            rep.breakdown = true;
            rep.converged = true;
            break;
        }
    }

    rep.wall_time = seconds_since(t0);
    return rep;
}

// ---------------------------------------------------------------------------
// Restarted GMRES, left preconditioning, modified Gram-Schmidt
// ---------------------------------------------------------------------------

SolveReport gmres_restarted(const LinearOperator& a, std::span<const double> b,
                            const LinearOperator& pinv, int restart, double tol,
                            int maxit, std::vector<double>& x)
{
    KrylovScope scope;
    if (restart < 1) throw std::invalid_argument("gmres: restart must be >= 1");
    const auto t0 = Clock::now();
    const int n = a.size();
    SolveReport rep;
    rep.relative_residuals.push_back(1.0);

    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        set_zero(x);
        rep.converged = true;
        rep.final_relres = 0.0;
        rep.true_relres = 0.0;
        rep.wall_time = seconds_since(t0);
        return rep;
    }

    std::vector<double> tmp(n), r(n);
    double norm0 = -1.0; // reference ||P^{-1} b||; set on the first cycle
    if (norm2(x) != 0.0) {
        pinv.apply(b, tmp);
        norm0 = norm2(tmp);
    }

    const int m = restart;
    std::vector<std::vector<double>> basis(static_cast<std::size_t>(m) + 1,
                                           std::vector<double>(n));
    std::vector<double> h(static_cast<std::size_t>(m + 1) * m, 0.0);
    auto H = [&](int i, int j) -> double& { return h[static_cast<std::size_t>(i) * m + j]; };
    std::vector<double> cs(m), sn(m), g(static_cast<std::size_t>(m) + 1);

    double last_cycle_relres = 1.0;
    bool first_cycle = true;

    while (rep.iterations < maxit) {
        a.apply(x, tmp);
        for (int i = 0; i < n; ++i) tmp[i] = b[i] - tmp[i];
        pinv.apply(tmp, r);
        double beta = norm2(r);
        if (norm0 < 0.0) norm0 = beta; // x0 = 0: first residual is P^{-1} b
        if (norm0 == 0.0) {
            rep.converged = true;
            rep.final_relres = 0.0;
            break;
        }
        double relres = beta / norm0;
        rep.final_relres = relres;
        if (relres <= tol) {
            rep.converged = true;
            break;
        }
        if (!first_cycle && relres >= last_cycle_relres * (1.0 - 1e-14)) {
            rep.stagnated = true;
            break;
        }
        last_cycle_relres = relres;
        first_cycle = false;

        for (int i = 0; i < n; ++i) basis[0][i] = r[i] / beta;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;

        int j = 0;
        bool cycle_converged = false;
        for (; j < m && rep.iterations < maxit; ++j) {
            a.apply(basis[j], tmp);
            pinv.apply(tmp, basis[static_cast<std::size_t>(j) + 1]);
            auto& w = basis[static_cast<std::size_t>(j) + 1];
            for (int i = 0; i <= j; ++i) {
                const double hij = dot(w, basis[i]);
                H(i, j) = hij;
                axpy(-hij, basis[i], w);
            }
            const double hjj = norm2(w);
            H(j + 1, j) = hjj;
            bool lucky = false;
            if (hjj > 1e-300) {
                scale(1.0 / hjj, w);
            } else {
                lucky = true; // happy breakdown: exact solution inside this cycle
            }

            for (int i = 0; i < j; ++i) {
                const double t1 = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
                const double t2 = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
                H(i, j) = t1;
                H(i + 1, j) = t2;
            }
            const double denom = std::sqrt(H(j, j) * H(j, j) + H(j + 1, j) * H(j + 1, j));
            cs[j] = denom == 0.0 ? 1.0 : H(j, j) / denom;
            sn[j] = denom == 0.0 ? 0.0 : H(j + 1, j) / denom;
            H(j, j) = denom;
            H(j + 1, j) = 0.0;
            g[static_cast<std::size_t>(j) + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];

            ++rep.iterations;
            relres = std::abs(g[static_cast<std::size_t>(j) + 1]) / norm0;
            rep.relative_residuals.push_back(relres);
            rep.final_relres = relres;
            if (!std::isfinite(relres)) throw std::runtime_error("gmres: non-finite residual");
            if (relres <= tol || lucky) {
                cycle_converged = true;
                ++j;
                break;
            }
        }

        // Update x with the least-squares solution of the cycle.
        std::vector<double> y(static_cast<std::size_t>(j), 0.0);
        for (int i = j - 1; i >= 0; --i) {
            double s = g[i];
            for (int k = i + 1; k < j; ++k) s -= H(i, k) * y[k];
            y[i] = s / H(i, i);
        }
        for (int i = 0; i < j; ++i) axpy(y[i], basis[i], x);

        if (cycle_converged) {
            rep.converged = rep.final_relres <= tol;
            if (!rep.converged) { // lucky breakdown
                rep.breakdown = true;
                rep.converged = true;
            }
            break;
        }
    }

    a.apply(x, tmp);
    for (int i = 0; i < n; ++i) tmp[i] = b[i] - tmp[i];
    rep.true_relres = norm2(tmp) / bnorm;
    rep.wall_time = seconds_since(t0);
    return rep;
}

void smw_rank1_apply(std::span<const double> m_diag, std::span<const double> w,
                     double rho, std::span<const double> x, std::span<double> y)
{
    const std::size_t n = m_diag.size();
    if (rho < 0.0) throw std::invalid_argument("smw_rank1_apply: rho must be >= 0");
    double wmx = 0.0, wmw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(m_diag[i] > 0.0)) throw std::invalid_argument("smw_rank1_apply: nonpositive diagonal");
        y[i] = x[i] / m_diag[i];
        wmx += w[i] * y[i];
        wmw += w[i] * w[i] / m_diag[i];
    }
    const double factor = rho * wmx / (1.0 + rho * wmw);
    for (std::size_t i = 0; i < n; ++i) y[i] -= factor * w[i] / m_diag[i];
}

} // namespace porowg
