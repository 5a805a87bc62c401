#include "geb/reference.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "geb/model.hpp"

namespace geb {

namespace {

Eigen::Matrix3d polar_project(const Eigen::Matrix3d& A)
{
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d R = svd.matrixU() * svd.matrixV().transpose();
    if (R.determinant() < 0) {
        Eigen::Matrix3d U = svd.matrixU();
        U.col(2) *= -1.0;
        R = U * svd.matrixV().transpose();
    }
    return R;
}

Eigen::Vector3d checked(const CurvatureFn& f, double x)
{
    const Eigen::Vector3d u = f(x);
    if (!u.allFinite()) {
        std::ostringstream os;
        os << "curvature is not finite at x = " << x;
        throw NonFiniteCurvature(os.str());
    }
    return u;
}

} // namespace

PrecurvedReference reference_from_samples(const BeamMatricesd& m, const Grid& grid, std::vector<Eigen::Matrix3d> R,
                                          std::vector<Eigen::Vector3d> curvature)
{
    PrecurvedReference ref;
    ref.grid = grid;
    ref.Rref = std::move(R);
    ref.UpsilonC = std::move(curvature);
    const int n = grid.nodes();
    ref.Ebold.resize(n);
    ref.Bbar.resize(n);
    ref.Bdiag.resize(n);
    for (int j = 0; j < n; ++j) {
        ref.Ebold[j] = initial_strain_matrix(ref.UpsilonC[j]);
        ref.Bbar[j] = assemble_Bbar(m, ref.Ebold[j]);
        ref.Bdiag[j] = m.L * ref.Bbar[j] * m.Linv;
    }
    return ref;
}

PrecurvedReference straight_reference(const BeamMatricesd& m, int N)
{
    if (N < 2)
        throw ValidationError({"N must be >= 2"});
    const Grid g{m.params.length, N};
    return reference_from_samples(m, g, std::vector<Eigen::Matrix3d>(g.nodes(), Eigen::Matrix3d::Identity()),
                                  std::vector<Eigen::Vector3d>(g.nodes(), Eigen::Vector3d::Zero()));
}

PrecurvedReference curved_reference(const BeamMatricesd& m, int N, const CurvatureFn& curvature)
{
    if (N < 2)
        throw ValidationError({"N must be >= 2"});
    const Grid g{m.params.length, N};
    const double h = g.dx();
    std::vector<Eigen::Matrix3d> R(g.nodes());
    std::vector<Eigen::Vector3d> U(g.nodes());
    R[0].setIdentity();
    U[0] = checked(curvature, 0.0);
    for (int j = 0; j < N; ++j) {
        const double x = g.x(j);
        const Eigen::Matrix3d c1 = hat(U[j]);
        const Eigen::Matrix3d c2 = hat(checked(curvature, x + 0.5 * h));
        U[j + 1] = checked(curvature, g.x(j + 1));
        const Eigen::Matrix3d c4 = hat(U[j + 1]);
        const Eigen::Matrix3d k1 = R[j] * c1;
        const Eigen::Matrix3d k2 = (R[j] + 0.5 * h * k1) * c2;
        const Eigen::Matrix3d k3 = (R[j] + 0.5 * h * k2) * c2;
        const Eigen::Matrix3d k4 = (R[j] + h * k3) * c4;
        R[j + 1] = polar_project(R[j] + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
    return reference_from_samples(m, g, std::move(R), std::move(U));
}

void write_reference_csv(std::ostream& os, const PrecurvedReference& ref)
{
    os << "x,R00,R01,R02,R10,R11,R12,R20,R21,R22,Uc1,Uc2,Uc3\n";
    char buf[40];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    for (int j = 0; j < ref.grid.nodes(); ++j) {
        put(ref.grid.x(j));
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                os << ',';
                put(ref.Rref[j](r, c));
            }
        for (int i = 0; i < 3; ++i) {
            os << ',';
            put(ref.UpsilonC[j](i));
        }
        os << '\n';
    }
}

PrecurvedReference read_reference_csv(std::istream& is, const BeamMatricesd& m)
{
    std::string line;
    std::vector<double> xs;
    std::vector<Eigen::Matrix3d> R;
    std::vector<Eigen::Vector3d> U;
    bool header = true;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (header) {
            header = false;
            if (line[0] == 'x')
                continue;
        }
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            v.push_back(std::stod(cell));
        if (v.size() != 13)
            throw ValidationError({"reference CSV rows need 13 columns, got " + std::to_string(v.size())});
        xs.push_back(v[0]);
        Eigen::Matrix3d r;
        r << v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9];
        if ((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-10)
            throw NotARotation("reference CSV row at x = " + std::to_string(v[0]) + " is not a rotation");
        R.push_back(r);
        U.emplace_back(v[10], v[11], v[12]);
    }
    if (xs.size() < 3)
        throw ValidationError({"reference CSV needs at least 3 rows"});
    const Grid g{xs.back(), static_cast<int>(xs.size()) - 1};
    for (std::size_t j = 0; j < xs.size(); ++j)
        if (std::abs(xs[j] - g.x(static_cast<int>(j))) > 1e-9 * g.length)
            throw ValidationError({"reference CSV nodes must be uniform on [0, l]"});
    if (std::abs(g.length - m.params.length) > 1e-12 * m.params.length)
        throw ValidationError({"reference CSV length does not match the beam length"});
    return reference_from_samples(m, g, std::move(R), std::move(U));
}

} // namespace geb
