#include "geb/state.hpp"

namespace geb {

StateField to_diagonal(const StateField& state, const BeamMatricesd& m)
{
    if (state.repr == Repr::diagonal)
        return state;
    StateField out = state;
    out.repr = Repr::diagonal;
    out.values = m.L * state.values;
    return out;
}

StateField to_physical(const StateField& state, const BeamMatricesd& m)
{
    if (state.repr == Repr::physical)
        return state;
    StateField out = state;
    out.repr = Repr::physical;
    out.values = m.Linv * state.values;
    return out;
}

Eigen::Vector3d derivative_weights(double t0, double t1, double t2, double at)
{
    // derivative of the Lagrange basis polynomials
    Eigen::Vector3d w;
    w(0) = ((at - t1) + (at - t2)) / ((t0 - t1) * (t0 - t2));
    w(1) = ((at - t0) + (at - t2)) / ((t1 - t0) * (t1 - t2));
    w(2) = ((at - t0) + (at - t1)) / ((t2 - t0) * (t2 - t1));
    return w;
}

double trapezoid(const Eigen::VectorXd& nodal, const Grid& g)
{
    const int n = static_cast<int>(nodal.size());
    if (n < 2)
        return 0.0;
    return g.dx() * (nodal.sum() - 0.5 * (nodal(0) + nodal(n - 1)));
}

} // namespace geb
