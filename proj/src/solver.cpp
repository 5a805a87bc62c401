#include "geb/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "geb/model.hpp"
#include "geb/rng.hpp"

namespace geb {

const char* to_string(Scheme s)
{
    return s == Scheme::upwind2 ? "upwind2" : "upwind1";
}

Scheme scheme_from_string(const std::string& s)
{
    if (s == "upwind1")
        return Scheme::upwind1;
    if (s == "upwind2")
        return Scheme::upwind2;
    throw ValidationError({"scheme must be upwind1 or upwind2, got '" + s + "'"});
}

void validate(const SimConfig& c)
{
    if (!(c.cfl > 0.0 && c.cfl <= 0.95)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "cfl = %g is outside (0, 0.95]", c.cfl);
        throw CFLViolation(buf);
    }
    std::vector<std::string> problems;
    if (c.N < 16)
        problems.push_back("N must be >= 16");
    if (!(c.tEnd >= 0.0) || !std::isfinite(c.tEnd))
        problems.push_back("tEnd must be finite and >= 0");
    if (c.outputStride < 1)
        problems.push_back("outputStride must be >= 1");
    if (c.lyapunovOrder != 1 && c.lyapunovOrder != 2)
        problems.push_back("lyapunovOrder must be 1 or 2");
    if (!(c.blowupThreshold > 0.0))
        problems.push_back("blowupThreshold must be > 0");
    if (c.maxSteps < 1)
        problems.push_back("maxSteps must be >= 1");
    if (!problems.empty())
        throw ValidationError(std::move(problems));
}

namespace {

inline double minmod(double a, double b)
{
    if (a * b <= 0.0)
        return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
}

} // namespace

Field12 upwind_derivative(const Field12& r, const Grid& g, Scheme scheme)
{
    const int N = g.N;
    const double h = g.dx();
    Field12 d(12, N + 1);
    if (scheme == Scheme::upwind1) {
        for (int j = 0; j <= N; ++j) {
            const int fwd = j < N ? j : N - 1;  // leftward speed: difference towards +x
            const int bwd = j > 0 ? j : 1;      // rightward speed: difference towards -x
            d.col(j).head<6>() = (r.col(fwd + 1).head<6>() - r.col(fwd).head<6>()) / h;
            d.col(j).tail<6>() = (r.col(bwd).tail<6>() - r.col(bwd - 1).tail<6>()) / h;
        }
        return d;
    }

    // MUSCL reconstruction with minmod slopes; ghosts by linear extrapolation.
    std::vector<double> pad(N + 5);
    auto at = [&](int j) { return pad[j + 2]; };
    std::vector<double> face(N + 2);
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j <= N; ++j)
            pad[j + 2] = r(i, j);
        pad[1] = 2.0 * r(i, 0) - r(i, 1);
        pad[0] = 3.0 * r(i, 0) - 2.0 * r(i, 1);
        pad[N + 3] = 2.0 * r(i, N) - r(i, N - 1);
        pad[N + 4] = 3.0 * r(i, N) - 2.0 * r(i, N - 1);
        if (i >= 6) {
            // face[k] is the value at x_{k-1/2} seen from the left, k = 0..N+1
            for (int k = 0; k <= N + 1; ++k) {
                const int c = k - 1;
                face[k] = at(c) + 0.5 * minmod(at(c) - at(c - 1), at(c + 1) - at(c));
            }
        } else {
            // face[k] is the value at x_{k-1/2} seen from the right
            for (int k = 0; k <= N + 1; ++k) {
                const int c = k;
                face[k] = at(c) - 0.5 * minmod(at(c) - at(c - 1), at(c + 1) - at(c));
            }
        }
        for (int j = 0; j <= N; ++j)
            d(i, j) = (face[j + 1] - face[j]) / h;
    }
    return d;
}

Field12 rhs(const Field12& r, const BeamMatricesd& m, const PrecurvedReference& ref, Scheme scheme, bool coupling,
            bool nonlinear)
{
    Field12 out = -(m.lambda.asDiagonal() * upwind_derivative(r, ref.grid, scheme));
    const int n = static_cast<int>(r.cols());
    for (int j = 0; j < n; ++j) {
        if (coupling)
            out.col(j).noalias() -= ref.Bdiag[j] * r.col(j);
        if (nonlinear)
            out.col(j) += g_diag(m, r.col(j));
    }
    return out;
}

void apply_boundary(Field12& r, const BeamMatricesd& m)
{
    const int N = static_cast<int>(r.cols()) - 1;
    r.col(0).tail<6>() = m.kappa.diagonal().cwiseProduct(r.col(0).head<6>());
    r.col(N).head<6>() = -r.col(N).tail<6>();
}

std::pair<double, double> energies(const StateField& state, const BeamMatricesd& m)
{
    const StateField y = to_physical(state, m);
    const StateField r = to_diagonal(state, m);
    const Eigen::VectorXd ep = (m.QP.diagonal().asDiagonal() * y.values).cwiseProduct(y.values).colwise().sum();
    const Eigen::VectorXd ed = (m.QD.diagonal().asDiagonal() * r.values).cwiseProduct(r.values).colwise().sum();
    return {trapezoid(ep, state.grid), trapezoid(ed, state.grid)};
}

namespace {

double integral_sq(const Field12& f, const Grid& g)
{
    return trapezoid(f.colwise().squaredNorm().transpose(), g);
}

double integral_weighted(const Field12& f, const LyapunovCertificate& cert, const Grid& g)
{
    Eigen::VectorXd v(f.cols());
    for (int j = 0; j < f.cols(); ++j)
        v(j) = f.col(j).dot(cert.Qdiag[j].cwiseProduct(f.col(j)));
    return trapezoid(v, g);
}

} // namespace

double sobolev_norm_sq(const StateField& state, const BeamMatricesd& m, Scheme scheme, int order)
{
    const StateField r = to_diagonal(state, m);
    const StateField y = to_physical(state, m);
    double total = integral_sq(y.values, state.grid);
    Field12 dr = r.values;
    for (int k = 1; k <= order; ++k) {
        dr = upwind_derivative(dr, state.grid, scheme);
        total += integral_sq(m.Linv * dr, state.grid);
    }
    return total;
}

double lyapunov_value(const StateField& state, const LyapunovCertificate& cert, const BeamMatricesd& m,
                      const PrecurvedReference& ref, int k, Scheme scheme, bool coupling, bool nonlinear)
{
    const StateField rs = to_diagonal(state, m);
    const Field12& r = rs.values;
    double total = integral_weighted(r, cert, state.grid);
    if (k < 1)
        return total;
    Field12 rt = rhs(r, m, ref, scheme, coupling, nonlinear);
    apply_boundary(rt, m);
    total += integral_weighted(rt, cert, state.grid);
    if (k < 2)
        return total;
    // differentiated equation: r_tt = -bigD (r_t)_x - B r_t + Dg(r) r_t
    Field12 rtt = rhs(rt, m, ref, scheme, coupling, false);
    if (nonlinear) {
        for (int j = 0; j < r.cols(); ++j) {
            const Vector12d a = r.col(j) + rt.col(j);
            const Vector12d b = r.col(j) - rt.col(j);
            rtt.col(j) += 0.5 * (g_diag(m, a) - g_diag(m, b));
        }
    }
    apply_boundary(rtt, m);
    total += integral_weighted(rtt, cert, state.grid);
    return total;
}

namespace {

std::array<Vector6d, 4> traces_of(const Field12& r)
{
    const int N = static_cast<int>(r.cols()) - 1;
    return {r.col(0).head<6>(), r.col(0).tail<6>(), r.col(N).head<6>(), r.col(N).tail<6>()};
}

} // namespace

Trajectory simulate(const SimConfig& config, const BeamMatricesd& m, const PrecurvedReference& ref,
                    const StateField& y0, const LyapunovCertificate* cert)
{
    validate(config);
    if (ref.grid.N != config.N || y0.grid.N != config.N)
        throw ValidationError({"reference, initial datum and config must share N"});
    if (cert && cert->grid.N != config.N)
        throw ValidationError({"certificate grid must match N"});

    const StateField phys = to_physical(y0, m);
    const CompatibilityReport comp = check_compatibility(phys, m, ref, 0);
    const double scale = std::max(1.0, phys.values.cwiseAbs().maxCoeff());
    if (comp.worst() > 1e-8 * scale)
        throw ValidationError({"initial datum violates the zero-order compatibility conditions (residual " +
                               std::to_string(comp.worst()) + ")"});

    const Grid& g = ref.grid;
    Trajectory traj;
    traj.dt = config.cfl * g.dx() / m.max_speed();

    Field12 r = m.L * phys.values;
    apply_boundary(r, m);
    double t = y0.time;
    const double tEnd = y0.time + config.tEnd;

    auto record = [&](double time) {
        StateField s{g, Repr::diagonal, r, time};
        traj.times.push_back(time);
        const auto [ep, ed] = energies(s, m);
        traj.energyP.push_back(ep);
        traj.energyD.push_back(ed);
        if (cert)
            traj.lyap.push_back(lyapunov_value(s, *cert, m, ref, config.lyapunovOrder, config.scheme,
                                               config.coupling, config.nonlinear));
        traj.h1.push_back(sobolev_norm_sq(s, m, config.scheme, 1));
        if (config.lyapunovOrder == 2)
            traj.h2.push_back(sobolev_norm_sq(s, m, config.scheme, 2));
        traj.traces.push_back(traces_of(r));
        if (config.storeSnapshots)
            traj.snapshots.push_back(std::move(s));
    };

    record(t);
    long step = 0;
    bool recordedLast = true;
    while (tEnd - t > 0.0) {
        if (step >= config.maxSteps)
            throw ValidationError({"maxSteps reached before tEnd"});
        double h = traj.dt;
        const bool last = tEnd - t <= traj.dt * (1.0 + 1e-9);
        if (last)
            h = tEnd - t;

        Field12 r1 = r + h * rhs(r, m, ref, config.scheme, config.coupling, config.nonlinear);
        apply_boundary(r1, m);
        Field12 r2 = r1 + h * rhs(r1, m, ref, config.scheme, config.coupling, config.nonlinear);
        r = 0.5 * (r + r2);
        apply_boundary(r, m);

        ++step;
        t = last ? tEnd : t + h;

        const double mag = r.cwiseAbs().maxCoeff();
        if (!(mag <= config.blowupThreshold))
            throw BlowupDetected(t, mag);

        recordedLast = false;
        if (step % config.outputStride == 0 || last) {
            record(t);
            recordedLast = true;
        }
        if (last)
            break;
    }
    if (!recordedLast)
        record(t);
    traj.steps = step;
    traj.final = StateField{g, Repr::diagonal, r, t};
    return traj;
}

double CompatibilityReport::worst() const
{
    return std::max({vAtL, feedbackAt0, v1AtL, feedback1At0});
}

namespace {

// y1 = -A y' - Bbar y + gbar(y) at a single node
Vector12d first_time_derivative(const BeamMatricesd& m, const Matrix12d& Bbar, const Vector12d& y,
                                const Vector12d& dy)
{
    return -m.A * dy - Bbar * y + gbar(m, y);
}

} // namespace

CompatibilityReport check_compatibility(const StateField& state, const BeamMatricesd& m,
                                        const PrecurvedReference& ref, int order)
{
    const StateField ys = to_physical(state, m);
    const Field12& y = ys.values;
    const int N = state.grid.N;
    const Vector6d Cinv = m.C.diagonal().cwiseInverse();

    CompatibilityReport rep;
    rep.order = order;
    rep.vAtL = y.col(N).head<6>().norm();
    rep.feedbackAt0 = (Cinv.cwiseProduct(y.col(0).tail<6>()) - m.mu.cwiseProduct(y.col(0).head<6>())).norm();
    if (order < 1)
        return rep;

    // sixth-order one-sided differences at both ends
    static constexpr double w[7] = {-49.0 / 20.0, 6.0, -15.0 / 2.0, 20.0 / 3.0, -15.0 / 4.0, 6.0 / 5.0, -1.0 / 6.0};
    if (N < 6)
        throw ValidationError({"first-order compatibility check needs N >= 6"});
    const double h = state.grid.dx();
    Vector12d d0 = Vector12d::Zero(), dL = Vector12d::Zero();
    for (int k = 0; k < 7; ++k) {
        d0 += w[k] * y.col(k);
        dL -= w[k] * y.col(N - k);
    }
    d0 /= h;
    dL /= h;
    const Vector12d y10 = first_time_derivative(m, ref.Bbar[0], y.col(0), d0);
    const Vector12d y1L = first_time_derivative(m, ref.Bbar[N], y.col(N), dL);
    rep.v1AtL = y1L.head<6>().norm();
    rep.feedback1At0 = (Cinv.cwiseProduct(y10.tail<6>()) - m.mu.cwiseProduct(y10.head<6>())).norm();
    return rep;
}

namespace {

double h1_centered(const Field12& y, const Grid& g)
{
    const int N = g.N;
    const double h = g.dx();
    Field12 d(12, N + 1);
    for (int j = 1; j < N; ++j)
        d.col(j) = (y.col(j + 1) - y.col(j - 1)) / (2.0 * h);
    d.col(0) = (-3.0 * y.col(0) + 4.0 * y.col(1) - y.col(2)) / (2.0 * h);
    d.col(N) = (3.0 * y.col(N) - 4.0 * y.col(N - 1) + y.col(N - 2)) / (2.0 * h);
    return std::sqrt(integral_sq(y, g) + integral_sq(d, g));
}

struct DatumCoefficients
{
    Eigen::Matrix<double, 12, 4> poly;
    Vector6d av, as;
};

Field12 assemble_datum(const BeamMatricesd& m, const PrecurvedReference& ref, const DatumCoefficients& k,
                       double sigma, int order)
{
    const Grid& g = ref.grid;
    const double l = g.length;
    const int N = g.N;
    const Vector6d Mv = m.M.diagonal();
    const Vector6d Cv = m.C.diagonal();
    const Vector6d MC = Mv.cwiseProduct(Cv);
    const Vector6d av = sigma * k.av;
    const Vector6d as = sigma * k.as;

    Vector6d d0 = Vector6d::Zero(), dL = Vector6d::Zero();
    if (order >= 1) {
        // slope of s at x = l making v1(l) = 0
        Vector12d yl;
        yl << Vector6d::Zero(), as;
        const Vector12d gl = gbar(m, yl);
        const Vector6d vsrc = Mv.cwiseInverse().cwiseProduct(ref.Ebold[N] * Cv.cwiseInverse().cwiseProduct(as));
        dL = -MC.cwiseProduct(vsrc + gl.head<6>());

        // slope of s at x = 0 making C^-1 s1(0) = mu v1(0)
        Vector12d y0;
        y0 << av, Cv.cwiseProduct(m.mu.cwiseProduct(av));
        const Vector12d g0 = gbar(m, y0);
        const Matrix6d& E0 = ref.Ebold[0];
        const Vector6d s1 = -E0.transpose() * av + g0.tail<6>();
        const Vector6d lhs = m.mu.cwiseInverse().cwiseProduct(Cv.cwiseInverse().cwiseProduct(s1));
        const Vector6d vs = Mv.cwiseInverse().cwiseProduct(E0 * m.mu.cwiseProduct(av));
        d0 = MC.cwiseProduct(lhs - vs - g0.head<6>());
    }

    Field12 y(12, N + 1);
    for (int j = 0; j <= N; ++j) {
        const double x = g.x(j);
        const double xi = x / l;
        const double bump = std::pow(4.0 * xi * (1.0 - xi), 4);
        const double psi0 = std::pow(1.0 - xi * xi, 4);
        const double eta = 1.0 - xi;
        const double psiL = std::pow(1.0 - eta * eta, 4);
        const Eigen::Vector4d powers(1.0, xi, xi * xi, xi * xi * xi);
        Vector12d col = sigma * bump * (k.poly * powers);
        col.head<6>() += psi0 * av;
        col.tail<6>() += psi0 * (Cv.cwiseProduct(m.mu.cwiseProduct(av)) + x * d0) + psiL * (as + (x - l) * dL);
        y.col(j) = col;
    }
    return y;
}

} // namespace

StateField generate_initial_datum(const BeamMatricesd& m, const PrecurvedReference& ref, double amplitude,
                                  std::uint64_t seed, int order)
{
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
        throw ValidationError({"amplitude must be finite and >= 0"});
    if (order != 0 && order != 1)
        throw ValidationError({"datum order must be 0 or 1"});
    if (ref.grid.N < 4)
        throw ValidationError({"datum needs N >= 4"});

    StateField out = StateField::zero(ref.grid, Repr::physical);
    if (amplitude == 0.0)
        return out;

    std::mt19937_64 gen(seed);
    DatumCoefficients k;
    for (int i = 0; i < 12; ++i)
        for (int p = 0; p < 4; ++p)
            k.poly(i, p) = uniform(gen, -1.0, 1.0);
    for (int i = 0; i < 6; ++i)
        k.av(i) = uniform(gen, -1.0, 1.0);
    for (int i = 0; i < 6; ++i)
        k.as(i) = uniform(gen, -1.0, 1.0);

    const double unit = h1_centered(assemble_datum(m, ref, k, 1.0, 0), ref.grid);
    double sigma = amplitude / unit;
    if (order == 1) {
        // the boundary slopes depend quadratically on sigma through gbar
        for (int it = 0; it < 8; ++it) {
            const double n = h1_centered(assemble_datum(m, ref, k, sigma, order), ref.grid);
            sigma *= amplitude / n;
        }
    }
    out.values = assemble_datum(m, ref, k, sigma, order);
    return out;
}

DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values, double windowStart)
{
    if (times.size() != values.size())
        throw ValidationError({"times and values must have equal length"});
    if (times.size() < 10)
        throw ValidationError({"fit_decay needs at least 10 samples"});
    std::vector<double> ts, ls;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < windowStart)
            continue;
        if (!(values[i] > 0.0) || !std::isfinite(values[i]))
            throw NonPositiveValues("fit_decay needs positive values, got " + std::to_string(values[i]) +
                                    " at t = " + std::to_string(times[i]));
        ts.push_back(times[i]);
        ls.push_back(std::log(values[i]));
    }
    if (ts.size() < 3)
        throw ValidationError({"fewer than 3 samples after the fit window start"});

    const double n = static_cast<double>(ts.size());
    double tm = 0.0, lm = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        tm += ts[i];
        lm += ls[i];
    }
    tm /= n;
    lm /= n;
    double stt = 0.0, stl = 0.0, sll = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        stt += (ts[i] - tm) * (ts[i] - tm);
        stl += (ts[i] - tm) * (ls[i] - lm);
        sll += (ls[i] - lm) * (ls[i] - lm);
    }
    const double slope = stt > 0.0 ? stl / stt : 0.0;
    const double intercept = lm - slope * tm;
    double sres = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double e = ls[i] - (intercept + slope * ts[i]);
        sres += e * e;
    }
    DecayFit fit;
    fit.alpha = -slope;
    fit.eta = std::exp(intercept);
    fit.rSquared = sll > 0.0 ? 1.0 - sres / sll : 1.0;
    fit.points = static_cast<int>(ts.size());
    return fit;
}

namespace {

void put(std::ostream& os, double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

} // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::vector<std::string>& header)
{
    for (const auto& h : header)
        os << "# " << h << '\n';
    os << "# dt = ";
    put(os, traj.dt);
    os << "\n# steps = " << traj.steps << '\n';
    const bool hasH2 = !traj.h2.empty();
    os << "t,E_P,E_D,L,H1";
    if (hasH2)
        os << ",H2";
    const char* names[4] = {"rm0_", "rp0_", "rmL_", "rpL_"};
    for (const char* n : names)
        for (int i = 1; i <= 6; ++i)
            os << ',' << n << i;
    os << '\n';
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        put(os, traj.times[k]);
        os << ',';
        put(os, traj.energyP[k]);
        os << ',';
        put(os, traj.energyD[k]);
        os << ',';
        if (traj.lyap.empty())
            os << "nan";
        else
            put(os, traj.lyap[k]);
        os << ',';
        put(os, traj.h1[k]);
        if (hasH2) {
            os << ',';
            put(os, traj.h2[k]);
        }
        for (const auto& v : traj.traces[k])
            for (int i = 0; i < 6; ++i) {
                os << ',';
                put(os, v(i));
            }
        os << '\n';
    }
}

void write_snapshot_csv(std::ostream& os, const StateField& state, const BeamMatricesd& m)
{
    const StateField r = to_diagonal(state, m);
    const StateField y = to_physical(state, m);
    os << "# t = ";
    put(os, state.time);
    os << "\nx";
    for (int i = 1; i <= 12; ++i)
        os << ",r" << i;
    for (int i = 1; i <= 12; ++i)
        os << ",y" << i;
    os << '\n';
    for (int j = 0; j < state.grid.nodes(); ++j) {
        put(os, state.grid.x(j));
        for (int i = 0; i < 12; ++i) {
            os << ',';
            put(os, r.values(i, j));
        }
        for (int i = 0; i < 12; ++i) {
            os << ',';
            put(os, y.values(i, j));
        }
        os << '\n';
    }
}

} // namespace geb
