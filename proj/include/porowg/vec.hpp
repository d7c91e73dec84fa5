#ifndef POROWG_VEC_HPP
#define POROWG_VEC_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace porowg {

inline double dot(std::span<const double> x, std::span<const double> y)
{
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

// y += a*x
inline void axpy(double a, std::span<const double> x, std::span<double> y)
{
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline void scale(double a, std::span<double> x)
{
    for (double& v : x) v *= a;
}

inline void set_zero(std::span<double> x)
{
    for (double& v : x) v = 0.0;
}

inline std::vector<double> zeros(std::size_t n) { return std::vector<double>(n, 0.0); }

inline bool all_finite(std::span<const double> x)
{
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

} // namespace porowg

#endif
