#ifndef POROWG_PROBLEMS_HPP
#define POROWG_PROBLEMS_HPP

#include <array>
#include <functional>

#include "porowg/wgfem.hpp"

namespace porowg {

using GradField = std::function<std::array<double, 9>(const std::array<double, 3>&)>; // row-major d x d

/// One of the built-in experiment setups: body force, fluid source, exact
/// fields, and Dirichlet data. Poroelastic problems factor as
/// u = g(t) U(x), p = g(t) P(x), so f = g(t) F(x) and
/// s = g'(t) Q1(x) + g(t) Q2(x); time_power selects g(t) = t or t^2 (the
/// quadratic variant exposes the time-discretization error).
struct ProblemSetup {
    int dim = 2;
    bool poro = false;
    int time_power = 1;

    std::function<std::array<double, 3>(const std::array<double, 3>&)> f_spatial;
    std::function<double(const std::array<double, 3>&)> q1; // multiplies g'(t)
    std::function<double(const std::array<double, 3>&)> q2; // multiplies g(t)

    std::function<std::array<double, 3>(const std::array<double, 3>&)> u_spatial;
    GradField grad_u_spatial;
    std::function<double(const std::array<double, 3>&)> p_spatial;
    VectorField u_dirichlet; // static trace; null for homogeneous data

    double g(double t) const { return time_power == 2 ? t * t : t; }
    double g_prime(double t) const { return time_power == 2 ? 2.0 * t : 1.0; }

    VectorField body_force(double t = 0.0) const
    {
        const double gt = poro ? g(t) : 1.0;
        auto fs = f_spatial;
        return [fs, gt](const std::array<double, 3>& x) {
            auto v = fs(x);
            for (double& c : v) c *= gt;
            return v;
        };
    }

    ScalarField source(double t) const
    {
        if (!poro) return nullptr;
        const double a = g_prime(t);
        const double b = g(t);
        auto f1 = q1;
        auto f2 = q2;
        return [f1, f2, a, b](const std::array<double, 3>& x) { return a * f1(x) + b * f2(x); };
    }

    VectorField exact_u(double t = 0.0) const
    {
        if (!u_spatial) return nullptr;
        const double gt = poro ? g(t) : 1.0;
        auto us = u_spatial;
        return [us, gt](const std::array<double, 3>& x) {
            auto v = us(x);
            for (double& c : v) c *= gt;
            return v;
        };
    }

    GradField exact_grad_u(double t = 0.0) const
    {
        if (!grad_u_spatial) return nullptr;
        const double gt = poro ? g(t) : 1.0;
        auto gs = grad_u_spatial;
        return [gs, gt](const std::array<double, 3>& x) {
            auto v = gs(x);
            for (double& c : v) c *= gt;
            return v;
        };
    }

    ScalarField exact_p(double t = 0.0) const
    {
        if (!p_spatial) return nullptr;
        const double gt = poro ? g(t) : 1.0;
        auto ps = p_spatial;
        return [ps, gt](const std::array<double, 3>& x) { return gt * ps(x); };
    }
};

ProblemSetup make_elasticity_2d(const PhysicalParams& params);
ProblemSetup make_elasticity_3d(const PhysicalParams& params);
ProblemSetup make_poro_2d(const PhysicalParams& params, int time_power = 1);
ProblemSetup make_poro_3d(const PhysicalParams& params, int time_power = 1);

} // namespace porowg

#endif
