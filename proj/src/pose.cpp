#include "geb/pose.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "geb/quaternion.hpp"

namespace geb {

namespace {

// Lagrange interpolation weights on the nodes t[lo..lo+n-1] at `at`.
template <int n>
Eigen::Matrix<double, n, 1> lagrange_weights(const std::vector<double>& t, int lo, double at)
{
    Eigen::Matrix<double, n, 1> w;
    for (int a = 0; a < n; ++a) {
        double v = 1.0;
        for (int b = 0; b < n; ++b)
            if (b != a)
                v *= (at - t[lo + b]) / (t[lo + a] - t[lo + b]);
        w(a) = v;
    }
    return w;
}

// Cubic interpolation of samples f[0..size) at a point inside [t[k], t[k+1]].
template <typename Sample>
Sample cubic_between(const std::vector<Sample>& f, const std::vector<double>& t, int k, double at)
{
    const int size = static_cast<int>(f.size());
    if (size < 4) {
        const double s = (at - t[k]) / (t[k + 1] - t[k]);
        return (1.0 - s) * f[k] + s * f[k + 1];
    }
    const int lo = std::clamp(k - 1, 0, size - 4);
    const Eigen::Vector4d w = lagrange_weights<4>(t, lo, at);
    return w(0) * f[lo] + w(1) * f[lo + 1] + w(2) * f[lo + 2] + w(3) * f[lo + 3];
}

Eigen::Vector4d rk4_step(const Eigen::Vector4d& q, double h, const Eigen::Vector3d& fa, const Eigen::Vector3d& fm,
                         const Eigen::Vector3d& fb)
{
    const Eigen::Matrix4d Ua = umap_body(fa);
    const Eigen::Matrix4d Um = umap_body(fm);
    const Eigen::Matrix4d Ub = umap_body(fb);
    const Eigen::Vector4d k1 = Ua * q;
    const Eigen::Vector4d k2 = Um * (q + 0.5 * h * k1);
    const Eigen::Vector4d k3 = Um * (q + 0.5 * h * k2);
    const Eigen::Vector4d k4 = Ub * (q + h * k3);
    return q + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::vector<double> node_positions(const Grid& g)
{
    std::vector<double> x(g.nodes());
    for (int j = 0; j < g.nodes(); ++j)
        x[j] = g.x(j);
    return x;
}

void require_lattice(const std::vector<StateField>& states, const Grid& g)
{
    if (states.size() < 3)
        throw ValidationError({"pose reconstruction needs at least 3 time samples"});
    for (const auto& s : states) {
        if (s.repr != Repr::physical)
            throw ValidationError({"pose reconstruction expects physical states"});
        if (s.grid.N != g.N)
            throw ValidationError({"states and reference must share the grid"});
    }
    for (std::size_t n = 1; n < states.size(); ++n)
        if (!(states[n].time > states[n - 1].time))
            throw ValidationError({"state times must be strictly increasing"});
}

} // namespace

PoseField reconstruct_rotation(const std::vector<StateField>& states, const PrecurvedReference& ref,
                               const Eigen::Vector4d& qIn, const ReconstructOptions& opt)
{
    if (std::abs(qIn.norm() - 1.0) > 1e-10)
        throw NonUnitInput("initial quaternion must have unit norm");
    const Grid& g = ref.grid;
    require_lattice(states, g);

    PoseField pose;
    pose.grid = g;
    const int nodes = g.nodes();
    const int nt = static_cast<int>(states.size());
    pose.times.resize(nt);
    for (int n = 0; n < nt; ++n)
        pose.times[n] = states[n].time;
    pose.q.resize(static_cast<std::size_t>(nt) * nodes);

    // x-sweep at t = 0, from x = l towards x = 0
    const std::vector<double> xs = node_positions(g);
    std::vector<Eigen::Vector3d> fx(nodes);
    for (int j = 0; j < nodes; ++j)
        fx[j] = states[0].values.col(j).segment<3>(9) + ref.UpsilonC[j];
    Eigen::Vector4d q = qIn;
    pose.q[pose.at(0, nodes - 1)] = q;
    for (int j = nodes - 1; j > 0; --j) {
        const double h = xs[j - 1] - xs[j];
        const Eigen::Vector3d fm = cubic_between(fx, xs, j - 1, 0.5 * (xs[j - 1] + xs[j]));
        q = rk4_step(q, h, fx[j], fm, fx[j - 1]);
        if (opt.renormalize)
            q.normalize();
        pose.q[pose.at(0, j - 1)] = q;
    }

    // t-integration at every node
    std::vector<Eigen::Vector3d> ft(nt);
    for (int j = 0; j < nodes; ++j) {
        for (int n = 0; n < nt; ++n)
            ft[n] = states[n].values.col(j).segment<3>(3);
        q = pose.q[pose.at(0, j)];
        for (int n = 0; n + 1 < nt; ++n) {
            const double h = pose.times[n + 1] - pose.times[n];
            const Eigen::Vector3d fm = cubic_between(ft, pose.times, n, pose.times[n] + 0.5 * h);
            q = rk4_step(q, h, ft[n], fm, ft[n + 1]);
            if (opt.renormalize)
                q.normalize();
            pose.q[pose.at(n + 1, j)] = q;
        }
    }

    pose.R.resize(pose.q.size());
    pose.normDefect = 0.0;
    for (std::size_t k = 0; k < pose.q.size(); ++k) {
        pose.normDefect = std::max(pose.normDefect, std::abs(pose.q[k].norm() - 1.0));
        pose.R[k] = rotation_from_quaternion(pose.q[k]);
    }

    // audit the x-equation, which the t-integration does not enforce
    pose.residualRByTime.assign(nt, 0.0);
    std::vector<Eigen::Vector4d> qx(nodes);
    for (int n = 0; n < nt; ++n) {
        for (int j = 0; j < nodes; ++j)
            qx[j] = pose.q[pose.at(n, j)];
        const std::vector<Eigen::Vector4d> dq = differentiate(qx, xs);
        double worst = 0.0;
        for (int j = 0; j < nodes; ++j) {
            const Eigen::Vector3d f = states[n].values.col(j).segment<3>(9) + ref.UpsilonC[j];
            worst = std::max(worst, (dq[j] - umap_body(f) * qx[j]).norm());
        }
        pose.residualRByTime[n] = worst;
    }
    pose.residualR = *std::max_element(pose.residualRByTime.begin(), pose.residualRByTime.end());
    return pose;
}

PoseField reconstruct_rotation(const std::vector<StateField>& states, const PrecurvedReference& ref,
                               const Eigen::Matrix3d& RIn, const ReconstructOptions& opt)
{
    return reconstruct_rotation(states, ref, quaternion_from_rotation(RIn), opt);
}

std::vector<Eigen::Vector3d> initial_centerline(const PoseField& pose, const StateField& y0, const Eigen::Vector3d& hp)
{
    const int nodes = pose.nodes();
    const double dx = pose.grid.dx();
    std::vector<Eigen::Vector3d> tangent(nodes), p0(nodes);
    for (int j = 0; j < nodes; ++j)
        tangent[j] = pose.R[pose.at(0, j)] * (y0.values.col(j).segment<3>(6) + Eigen::Vector3d::UnitX());
    p0[nodes - 1] = hp;
    for (int j = nodes - 1; j > 0; --j)
        p0[j - 1] = p0[j] - 0.5 * dx * (tangent[j] + tangent[j - 1]);
    return p0;
}

void reconstruct_centerline(PoseField& pose, const std::vector<StateField>& states,
                            const std::vector<Eigen::Vector3d>& p0, const Eigen::Vector3d& hp)
{
    const int nodes = pose.nodes();
    const int nt = static_cast<int>(pose.times.size());
    if (static_cast<int>(p0.size()) != nodes || static_cast<int>(states.size()) != nt)
        throw ValidationError({"centerline inputs do not match the pose lattice"});
    if ((p0.back() - hp).norm() > 1e-10)
        throw EndpointMismatch("p0(l) differs from the clamped position h_p");

    const std::vector<double> xs = node_positions(pose.grid);
    const double dx = pose.grid.dx();

    // dp/dt = R y1 and dp/dx = R (y3 + e1) on the lattice
    std::vector<Eigen::Vector3d> vel(pose.q.size()), tan(pose.q.size());
    for (int n = 0; n < nt; ++n)
        for (int j = 0; j < nodes; ++j) {
            const auto k = pose.at(n, j);
            vel[k] = pose.R[k] * states[n].values.col(j).segment<3>(0);
            tan[k] = pose.R[k] * (states[n].values.col(j).segment<3>(6) + Eigen::Vector3d::UnitX());
        }

    pose.p.resize(pose.q.size());
    std::vector<Eigen::Vector3d> column(nt);
    std::vector<std::vector<Eigen::Vector3d>> dtTan(nodes);
    for (int j = 0; j < nodes; ++j) {
        for (int n = 0; n < nt; ++n)
            column[n] = vel[pose.at(n, j)];
        const auto integral = cumulative_trapezoid(column, pose.times);
        for (int n = 0; n < nt; ++n)
            pose.p[pose.at(n, j)] = p0[j] + integral[n];
        for (int n = 0; n < nt; ++n)
            column[n] = tan[pose.at(n, j)];
        dtTan[j] = differentiate(column, pose.times);
    }

    pose.residualPByTime.assign(nt, 0.0);
    pose.routeGapByTime.assign(nt, 0.0);
    std::vector<Eigen::Vector3d> row(nodes);
    for (int n = 0; n < nt; ++n) {
        for (int j = 0; j < nodes; ++j)
            row[j] = vel[pose.at(n, j)];
        const auto dxVel = differentiate(row, xs);
        double res = 0.0;
        for (int j = 0; j < nodes; ++j)
            res = std::max(res, (dxVel[j] - dtTan[j][n]).norm());
        pose.residualPByTime[n] = res;

        Eigen::Vector3d p2 = hp;
        double gap = (pose.p[pose.at(n, nodes - 1)] - p2).norm();
        for (int j = nodes - 1; j > 0; --j) {
            p2 -= 0.5 * dx * (tan[pose.at(n, j)] + tan[pose.at(n, j - 1)]);
            gap = std::max(gap, (pose.p[pose.at(n, j - 1)] - p2).norm());
        }
        pose.routeGapByTime[n] = gap;
    }
    pose.residualP = *std::max_element(pose.residualPByTime.begin(), pose.residualPByTime.end());
    pose.routeGap = *std::max_element(pose.routeGapByTime.begin(), pose.routeGapByTime.end());
}

std::vector<StateField> strains_velocities_from_pose(const PoseField& pose, const PrecurvedReference& ref)
{
    const int nodes = pose.nodes();
    const int nt = static_cast<int>(pose.times.size());
    if (nt < 3)
        throw ValidationError({"need at least 3 time samples"});
    if (pose.p.size() != pose.R.size())
        throw ValidationError({"pose has no centerline"});
    for (const auto& R : pose.R)
        if ((R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-8 ||
            std::abs(R.determinant() - 1.0) > 1e-8)
            throw NotARotation("pose contains a non-orthogonal rotation sample");

    const std::vector<double> xs = node_positions(pose.grid);
    const std::vector<Eigen::Matrix3d> dRref = differentiate(ref.Rref, xs);
    std::vector<Eigen::Vector3d> refTwist(nodes);
    for (int j = 0; j < nodes; ++j)
        refTwist[j] = vee(ref.Rref[j].transpose() * dRref[j]);

    std::vector<StateField> out(nt);
    for (int n = 0; n < nt; ++n)
        out[n] = StateField::zero(pose.grid, Repr::physical, pose.times[n]);

    std::vector<Eigen::Matrix3d> Rrow(nodes);
    std::vector<Eigen::Vector3d> prow(nodes);
    for (int n = 0; n < nt; ++n) {
        for (int j = 0; j < nodes; ++j) {
            Rrow[j] = pose.R[pose.at(n, j)];
            prow[j] = pose.p[pose.at(n, j)];
        }
        const auto dR = differentiate(Rrow, xs);
        const auto dp = differentiate(prow, xs);
        for (int j = 0; j < nodes; ++j) {
            out[n].values.col(j).segment<3>(6) = Rrow[j].transpose() * dp[j] - Eigen::Vector3d::UnitX();
            out[n].values.col(j).segment<3>(9) = vee(Rrow[j].transpose() * dR[j]) - refTwist[j];
        }
    }

    std::vector<Eigen::Matrix3d> Rcol(nt);
    std::vector<Eigen::Vector3d> pcol(nt);
    for (int j = 0; j < nodes; ++j) {
        for (int n = 0; n < nt; ++n) {
            Rcol[n] = pose.R[pose.at(n, j)];
            pcol[n] = pose.p[pose.at(n, j)];
        }
        const auto dR = differentiate(Rcol, pose.times);
        const auto dp = differentiate(pcol, pose.times);
        for (int n = 0; n < nt; ++n) {
            out[n].values.col(j).segment<3>(0) = Rcol[n].transpose() * dp[n];
            out[n].values.col(j).segment<3>(3) = vee(Rcol[n].transpose() * dR[n]);
        }
    }
    return out;
}

std::vector<double> decay_observable(const PoseField& pose, const std::vector<StateField>& states)
{
    const int nt = static_cast<int>(pose.times.size());
    if (static_cast<int>(states.size()) != nt)
        throw ValidationError({"pose and states must share the time lattice"});
    std::vector<double> out(nt, 0.0);
    for (int n = 0; n < nt; ++n) {
        double best = 0.0;
        for (int j = 0; j < pose.nodes(); ++j) {
            const auto y = states[n].values.col(j);
            const Eigen::Matrix3d& R = pose.R[pose.at(n, j)];
            // |R hat(y2)|_2 = |hat(y2)|_2 = |y2| for orthogonal R
            const double v = (R * y.segment<3>(0)).norm() + y.segment<3>(3).norm() + y.segment<3>(6).norm() +
                             y.segment<3>(9).norm();
            best = std::max(best, v);
        }
        out[n] = best;
    }
    return out;
}

void write_pose_csv(std::ostream& os, const PoseField& pose, int n)
{
    char buf[40];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    os << "# t = ";
    put(pose.times[n]);
    os << "\nx,p1,p2,p3,q0,q1,q2,q3\n";
    for (int j = 0; j < pose.nodes(); ++j) {
        const auto k = pose.at(n, j);
        put(pose.grid.x(j));
        for (int i = 0; i < 3; ++i) {
            os << ',';
            put(pose.p.empty() ? 0.0 : pose.p[k](i));
        }
        for (int i = 0; i < 4; ++i) {
            os << ',';
            put(pose.q[k](i));
        }
        os << '\n';
    }
}

} // namespace geb
