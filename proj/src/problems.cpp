#include "porowg/problems.hpp"

#include <cmath>

namespace porowg {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ProblemSetup make_elasticity_2d(const PhysicalParams& params)
{
    const double mu = params.mu;
    ProblemSetup p;
    p.dim = 2;
    p.poro = false;
    p.f_spatial = [mu](const std::array<double, 3>& x) -> std::array<double, 3> {
        return {2.0 * mu * std::sin(x[0]) * std::sin(x[1]),
                2.0 * mu * std::cos(x[0]) * std::cos(x[1]), 0.0};
    };
    // Divergence-free exact displacement; nonzero on the boundary.
    p.u_spatial = [](const std::array<double, 3>& x) -> std::array<double, 3> {
        return {std::sin(x[0]) * std::sin(x[1]), std::cos(x[0]) * std::cos(x[1]), 0.0};
    };
    p.grad_u_spatial = [](const std::array<double, 3>& x) -> std::array<double, 9> {
        return {std::cos(x[0]) * std::sin(x[1]), std::sin(x[0]) * std::cos(x[1]), 0.0,
                -std::sin(x[0]) * std::cos(x[1]), -std::cos(x[0]) * std::sin(x[1]), 0.0,
                0.0, 0.0, 0.0};
    };
    p.u_dirichlet = p.u_spatial;
    return p;
}

ProblemSetup make_elasticity_3d(const PhysicalParams& params)
{
    const double mu = params.mu;
    const double lambda = params.lambda;
    ProblemSetup p;
    p.dim = 3;
    p.poro = false;
    const double pi2 = kPi * kPi;
    p.f_spatial = [mu, lambda, pi2](const std::array<double, 3>& xx) -> std::array<double, 3> {
        const double x = xx[0], y = xx[1], z = xx[2];
        const double s1x = std::sin(kPi * x), s1y = std::sin(kPi * y), s1z = std::sin(kPi * z);
        const double c1x = std::cos(kPi * x), c1y = std::cos(kPi * y), c1z = std::cos(kPi * z);
        const double s2x = std::sin(2 * kPi * x), s2y = std::sin(2 * kPi * y), s2z = std::sin(2 * kPi * z);
        const double c2x = std::cos(2 * kPi * x), c2y = std::cos(2 * kPi * y), c2z = std::cos(2 * kPi * z);
        const double lead = pi2 * (4.0 * mu + lambda) / (lambda + mu) * s1x * s1y * s1z;
        return {lead + 8.0 * pi2 * mu * (-1.0 + c2x) * s2y * s2z + 4.0 * pi2 * mu * c2x * s2y * s2z -
                    pi2 * (c1x * c1y * s1z + c1x * s1y * c1z),
                lead + 16.0 * pi2 * mu * s2x * (1.0 - c2y) * s2z - 8.0 * pi2 * mu * s2x * c2y * s2z -
                    pi2 * (c1x * c1y * s1z + s1x * c1y * c1z),
                lead + 8.0 * pi2 * mu * s2x * s2y * (-1.0 + c2z) + 4.0 * pi2 * mu * s2x * s2y * c2z -
                    pi2 * (c1x * s1y * c1z + s1x * c1y * c1z)};
    };
    p.u_spatial = [mu, lambda](const std::array<double, 3>& xx) -> std::array<double, 3> {
        const double x = xx[0], y = xx[1], z = xx[2];
        const double s = std::sin(kPi * x) * std::sin(kPi * y) * std::sin(kPi * z) / (lambda + mu);
        const double s2x = std::sin(2 * kPi * x), s2y = std::sin(2 * kPi * y), s2z = std::sin(2 * kPi * z);
        const double c2x = std::cos(2 * kPi * x), c2y = std::cos(2 * kPi * y), c2z = std::cos(2 * kPi * z);
        return {(c2x - 1.0) * s2y * s2z + s, 2.0 * s2x * (1.0 - c2y) * s2z + s,
                s2x * s2y * (c2z - 1.0) + s};
    };
    p.grad_u_spatial = [mu, lambda](const std::array<double, 3>& xx) -> std::array<double, 9> {
        const double x = xx[0], y = xx[1], z = xx[2];
        const double il = 1.0 / (lambda + mu);
        const double s1x = std::sin(kPi * x), s1y = std::sin(kPi * y), s1z = std::sin(kPi * z);
        const double c1x = std::cos(kPi * x), c1y = std::cos(kPi * y), c1z = std::cos(kPi * z);
        const double s2x = std::sin(2 * kPi * x), s2y = std::sin(2 * kPi * y), s2z = std::sin(2 * kPi * z);
        const double c2x = std::cos(2 * kPi * x), c2y = std::cos(2 * kPi * y), c2z = std::cos(2 * kPi * z);
        const double gsx = kPi * c1x * s1y * s1z * il;
        const double gsy = kPi * s1x * c1y * s1z * il;
        const double gsz = kPi * s1x * s1y * c1z * il;
        const double tp = 2.0 * kPi;
        return {-tp * s2x * s2y * s2z + gsx,
                (c2x - 1.0) * tp * c2y * s2z + gsy,
                (c2x - 1.0) * s2y * tp * c2z + gsz,
                2.0 * tp * c2x * (1.0 - c2y) * s2z + gsx,
                2.0 * s2x * tp * s2y * s2z + gsy,
                2.0 * s2x * (1.0 - c2y) * tp * c2z + gsz,
                tp * c2x * s2y * (c2z - 1.0) + gsx,
                s2x * tp * c2y * (c2z - 1.0) + gsy,
                -s2x * s2y * tp * s2z + gsz};
    };
    p.u_dirichlet = nullptr; // exact solution vanishes on the boundary
    return p;
}

ProblemSetup make_poro_2d(const PhysicalParams& params, int time_power)
{
    const double mu = params.mu;
    const double lambda = params.lambda;
    const double alpha = params.alpha;
    const double c0 = params.c0;
    const double kappa = params.kappa;
    ProblemSetup p;
    p.dim = 2;
    p.poro = true;
    p.time_power = time_power;
    const double pi2 = kPi * kPi;
    p.f_spatial = [mu, lambda, alpha, pi2](const std::array<double, 3>& xx) -> std::array<double, 3> {
        const double x = xx[0], y = xx[1];
        const double s1x = std::sin(kPi * x), s1y = std::sin(kPi * y);
        const double c1x = std::cos(kPi * x), c1y = std::cos(kPi * y);
        const double s2x = std::sin(2 * kPi * x), s2y = std::sin(2 * kPi * y);
        const double c2x = std::cos(2 * kPi * x), c2y = std::cos(2 * kPi * y);
        const double cxy = std::cos(kPi * (x + y));
        return {8.0 * pi2 * mu * c2x * s2y + 2.0 * pi2 * mu / (lambda + mu) * s1x * s1y -
                    4.0 * pi2 * mu * s2y - pi2 * cxy - alpha * kPi * c1x * s1y,
                -8.0 * pi2 * mu * s2x * c2y + 2.0 * pi2 * mu / (lambda + mu) * s1x * s1y +
                    4.0 * pi2 * mu * s2x - pi2 * cxy - alpha * kPi * s1x * c1y,
                0.0};
    };
    p.q1 = [mu, lambda, alpha, c0](const std::array<double, 3>& xx) {
        const double x = xx[0], y = xx[1];
        return alpha * kPi / (lambda + mu) * std::sin(kPi * (x + y)) -
               c0 * std::sin(kPi * x) * std::sin(kPi * y);
    };
    p.q2 = [kappa, pi2](const std::array<double, 3>& xx) {
        return -2.0 * pi2 * kappa * std::sin(kPi * xx[0]) * std::sin(kPi * xx[1]);
    };
    p.u_spatial = [mu, lambda](const std::array<double, 3>& xx) -> std::array<double, 3> {
        const double x = xx[0], y = xx[1];
        const double s = std::sin(kPi * x) * std::sin(kPi * y) / (lambda + mu);
        return {(std::cos(2 * kPi * x) - 1.0) * std::sin(2 * kPi * y) + s,
                (1.0 - std::cos(2 * kPi * y)) * std::sin(2 * kPi * x) + s, 0.0};
    };
    p.grad_u_spatial = [mu, lambda](const std::array<double, 3>& xx) -> std::array<double, 9> {
        const double x = xx[0], y = xx[1];
        const double il = 1.0 / (lambda + mu);
        const double tp = 2.0 * kPi;
        const double gsx = kPi * std::cos(kPi * x) * std::sin(kPi * y) * il;
        const double gsy = kPi * std::sin(kPi * x) * std::cos(kPi * y) * il;
        return {-tp * std::sin(tp * x) * std::sin(tp * y) + gsx,
                (std::cos(tp * x) - 1.0) * tp * std::cos(tp * y) + gsy, 0.0,
                (1.0 - std::cos(tp * y)) * tp * std::cos(tp * x) + gsx,
                tp * std::sin(tp * y) * std::sin(tp * x) + gsy, 0.0,
                0.0, 0.0, 0.0};
    };
    p.p_spatial = [](const std::array<double, 3>& xx) {
        return -std::sin(kPi * xx[0]) * std::sin(kPi * xx[1]);
    };
    return p;
}

ProblemSetup make_poro_3d(const PhysicalParams& params, int time_power)
{
    const double mu = params.mu;
    const double lambda = params.lambda;
    const double alpha = params.alpha;
    const double c0 = params.c0;
    const double kappa = params.kappa;
    ProblemSetup p;
    p.dim = 3;
    p.poro = true;
    p.time_power = time_power;
    const double pi2 = kPi * kPi;
    p.f_spatial = [mu, lambda, alpha, pi2](const std::array<double, 3>& xx) -> std::array<double, 3> {
        const double x = xx[0], y = xx[1], z = xx[2];
        const double s1x = std::sin(kPi * x), s1y = std::sin(kPi * y), s1z = std::sin(kPi * z);
        const double c1x = std::cos(kPi * x), c1y = std::cos(kPi * y), c1z = std::cos(kPi * z);
        const double s2x = std::sin(2 * kPi * x), s2y = std::sin(2 * kPi * y), s2z = std::sin(2 * kPi * z);
        const double c2x = std::cos(2 * kPi * x), c2y = std::cos(2 * kPi * y), c2z = std::cos(2 * kPi * z);
        const double lead = (4.0 * mu + lambda) / (mu + lambda) * s1x * s1y * s1z * pi2;
        return {4.0 * mu * c2x * s2y * s2z * pi2 + lead - c1x * c1y * s1z * pi2 -
                    c1x * s1y * c1z * pi2 + 8.0 * pi2 * mu * (-1.0 + c2x) * s2y * s2z +
                    alpha * kPi * c1x * s1y * s1z,
                -pi2 * c1x * c1y * s1z + lead - s1x * c1y * c1z * pi2 +
                    16.0 * pi2 * mu * s2x * (1.0 - c2y) * s2z - 8.0 * pi2 * mu * s2x * c2y * s2z +
                    alpha * kPi * s1x * c1y * s1z,
                lead + 4.0 * pi2 * mu * s2x * s2y * c2z - c1x * s1y * c1z * pi2 -
                    s1x * c1y * c1z * pi2 + 8.0 * pi2 * mu * (-1.0 + c2z) * s2x * s2y +
                    alpha * kPi * s1x * s1y * c1z};
    };
    p.q1 = [mu, lambda, alpha, c0](const std::array<double, 3>& xx) {
        const double x = xx[0], y = xx[1], z = xx[2];
        const double s1x = std::sin(kPi * x), s1y = std::sin(kPi * y), s1z = std::sin(kPi * z);
        const double c1x = std::cos(kPi * x), c1y = std::cos(kPi * y), c1z = std::cos(kPi * z);
        return alpha * kPi / (mu + lambda) * (c1x * s1y * s1z + s1x * c1y * s1z + s1x * s1y * c1z) +
               c0 * s1x * s1y * s1z;
    };
    p.q2 = [kappa, pi2](const std::array<double, 3>& xx) {
        return 3.0 * pi2 * kappa * std::sin(kPi * xx[0]) * std::sin(kPi * xx[1]) *
               std::sin(kPi * xx[2]);
    };
    p.u_spatial = [mu, lambda](const std::array<double, 3>& xx) -> std::array<double, 3> {
        const double x = xx[0], y = xx[1], z = xx[2];
        const double s = std::sin(kPi * x) * std::sin(kPi * y) * std::sin(kPi * z) / (lambda + mu);
        const double s2x = std::sin(2 * kPi * x), s2y = std::sin(2 * kPi * y), s2z = std::sin(2 * kPi * z);
        const double c2x = std::cos(2 * kPi * x), c2y = std::cos(2 * kPi * y), c2z = std::cos(2 * kPi * z);
        return {(c2x - 1.0) * s2y * s2z + s, 2.0 * s2x * (1.0 - c2y) * s2z + s,
                s2x * s2y * (c2z - 1.0) + s};
    };
    p.grad_u_spatial = make_elasticity_3d(params).grad_u_spatial;
    p.p_spatial = [](const std::array<double, 3>& xx) {
        return std::sin(kPi * xx[0]) * std::sin(kPi * xx[1]) * std::sin(kPi * xx[2]);
    };
    return p;
}

} // namespace porowg
