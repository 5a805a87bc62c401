#pragma once

#include <vector>

#include "geb/algebra.hpp"
#include "geb/beam.hpp"

namespace geb {

/// Uniform nodes x_j = length * j / N, j = 0..N.
struct Grid
{
    double length = 1.0;
    int N = 0;

    int nodes() const { return N + 1; }
    double dx() const { return length / N; }
    double x(int j) const { return length * (static_cast<double>(j) / N); }
};

enum class Repr { physical, diagonal };

using Field12 = Eigen::Matrix<double, 12, Eigen::Dynamic>;

/// One 12-vector per node (column j is node j). Physical: y = (v, s) with
/// v = (V, W), s = (Gamma, Upsilon). Diagonal: r = L y = (r-, r+).
struct StateField
{
    Grid grid;
    Repr repr = Repr::physical;
    Field12 values;
    double time = 0.0;

    static StateField zero(const Grid& g, Repr repr, double time = 0.0)
    {
        return StateField{g, repr, Field12::Zero(12, g.nodes()), time};
    }
};

StateField to_diagonal(const StateField& state, const BeamMatricesd& m);
StateField to_physical(const StateField& state, const BeamMatricesd& m);

/// Weights of the derivative at `at` of the quadratic through (t[0], t[1], t[2]).
Eigen::Vector3d derivative_weights(double t0, double t1, double t2, double at);

/// Second-order derivative of equally spaced or irregular samples: centred
/// in the interior and one-sided (three points) at both ends.
template <typename T>
std::vector<T> differentiate(const std::vector<T>& f, const std::vector<double>& t)
{
    const int n = static_cast<int>(f.size());
    std::vector<T> out(f.size());
    for (int i = 0; i < n; ++i) {
        const int c = i == 0 ? 1 : (i == n - 1 ? n - 2 : i);
        const Eigen::Vector3d w = derivative_weights(t[c - 1], t[c], t[c + 1], t[i]);
        out[i] = w(0) * f[c - 1] + w(1) * f[c] + w(2) * f[c + 1];
    }
    return out;
}

/// Cumulative trapezoid integral from t[0].
template <typename T>
std::vector<T> cumulative_trapezoid(const std::vector<T>& f, const std::vector<double>& t)
{
    std::vector<T> out(f.size());
    out[0] = f[0] * 0.0;
    for (std::size_t i = 1; i < f.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
    return out;
}

/// Trapezoid rule for the integral over [0, length] of per-node values.
double trapezoid(const Eigen::VectorXd& nodal, const Grid& g);

} // namespace geb
