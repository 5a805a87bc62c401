#include "geb/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>

#include "geb/lyapunov.hpp"
#include "geb/pose.hpp"
#include "geb/solver.hpp"

namespace geb {

namespace {

constexpr const char* tool_version = "gebctl 1.0";

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& dir, const std::string& name)
{
    std::filesystem::create_directories(dir);
    std::ofstream os(dir / name, std::ios::binary);
    if (!os)
        throw IoError("cannot write '" + (dir / name).string() + "'");
    return os;
}

std::vector<std::string> header_for(const ScenarioText& text, const std::string& command)
{
    std::vector<std::string> h = {"tool = " + std::string(tool_version), "command = " + command};
    for (auto& e : text.echo())
        h.push_back(e);
    return h;
}

void write_header(std::ostream& os, const std::vector<std::string>& header)
{
    for (const auto& h : header)
        os << "# " << h << '\n';
}

struct FitOrNan
{
    DecayFit fit;
    bool ok = false;
};

FitOrNan try_fit(const std::vector<double>& t, const std::vector<double>& v, double start)
{
    FitOrNan r;
    try {
        r.fit = fit_decay(t, v, start);
        r.ok = true;
    } catch (const Error&) {
        r.fit.alpha = r.fit.eta = r.fit.rSquared = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
}

void write_fit(std::ostream& os, const std::string& name, const FitOrNan& f)
{
    os << name << ',' << fmt(f.fit.alpha) << ',' << fmt(f.fit.eta) << ',' << fmt(f.fit.rSquared) << '\n';
}

struct Prepared
{
    Scenario s;
    BeamMatricesd m;
    PrecurvedReference ref;
};

Prepared prepare(const ScenarioText& text)
{
    Prepared p{resolve(text), {}, {}};
    p.m = scenario_matrices(p.s);
    p.ref = scenario_reference(p.s, p.m);
    return p;
}

Eigen::Vector3d reference_tip(const PrecurvedReference& ref)
{
    // p(l) when the reference centreline starts at the origin
    Eigen::Vector3d p = Eigen::Vector3d::Zero();
    for (int j = 0; j < ref.grid.N; ++j)
        p += 0.5 * ref.grid.dx() * (ref.Rref[j].col(0) + ref.Rref[j + 1].col(0));
    return p;
}

} // namespace

int exit_code_for_current_exception(std::ostream& log)
{
    try {
        throw;
    } catch (const ValidationError& e) {
        log << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const CFLViolation& e) {
        log << "error: CFLViolation: " << e.what() << '\n';
        return exit_validation;
    } catch (const WindowViolation& e) {
        log << "error: WindowViolation: " << e.what() << '\n';
        return exit_certificate;
    } catch (const CkappaDegenerate& e) {
        log << "error: CkappaDegenerate: " << e.what() << '\n';
        return exit_certificate;
    } catch (const BlowupDetected& e) {
        log << "error: BlowupDetected: " << e.what() << '\n';
        return exit_blowup;
    } catch (const IoError& e) {
        log << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const std::filesystem::filesystem_error& e) {
        log << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return exit_usage;
    }
}

int run_certify(const ScenarioText& text, const std::filesystem::path& out, std::ostream& log)
{
    const Prepared p = prepare(text);
    const LyapunovCertificate cert = build_certificate(p.m, p.ref, p.s.certOrder, p.s.phi0, p.s.phiL);
    const DecayEstimate est = decay_rate_estimate(cert, p.m, p.ref, p.s.delta);
    auto os = open_out(out, "certificate.csv");
    write_header(os, header_for(text, "certify"));
    write_certificate_csv(os, cert, est);
    log << "certificate " << (cert.valid ? "valid" : "INVALID") << ": Ckappa = " << fmt(cert.Ckappa)
        << ", c = " << fmt(cert.c) << ", max interior eigenvalue = " << fmt(cert.report.maxInterior)
        << ", max boundary eigenvalue = " << fmt(cert.report.maxBoundary) << '\n';
    return cert.valid ? exit_ok : exit_certificate;
}

int run_simulate(const ScenarioText& text, const std::filesystem::path& out, std::ostream& log)
{
    const Prepared p = prepare(text);
    const LyapunovCertificate cert = build_certificate(p.m, p.ref, p.s.certOrder, p.s.phi0, p.s.phiL);
    const StateField y0 = generate_initial_datum(p.m, p.ref, p.s.amplitude, p.s.seed, p.s.datumOrder);
    const Trajectory traj = simulate(p.s.sim, p.m, p.ref, y0, &cert);

    const auto header = header_for(text, "simulate");
    {
        auto os = open_out(out, "trajectory.csv");
        write_trajectory_csv(os, traj, header);
    }
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        char name[40];
        std::snprintf(name, sizeof name, "snapshot_%05zu.csv", k);
        auto os = open_out(out, name);
        write_snapshot_csv(os, traj.snapshots[k], p.m);
    }
    const double start = fit_window_start(p.s, p.m);
    const FitOrNan fl = try_fit(traj.times, traj.lyap, start);
    const FitOrNan fh = try_fit(traj.times, traj.h1, start);
    {
        auto os = open_out(out, "summary.csv");
        write_header(os, header);
        os << "# certificate_valid = " << (cert.valid ? "true" : "false") << '\n';
        os << "# fit_window_start = " << fmt(start) << '\n';
        os << "series,alpha,eta,r_squared\n";
        write_fit(os, "lyapunov", fl);
        write_fit(os, "h1_squared", fh);
    }
    log << "simulated " << traj.steps << " steps to t = " << fmt(traj.final.time) << "; alpha(L) = "
        << fmt(fl.fit.alpha) << '\n';
    return exit_ok;
}

int run_reconstruct(const ScenarioText& text, const std::filesystem::path& out, std::ostream& log)
{
    const Prepared p = prepare(text);
    const LyapunovCertificate cert = build_certificate(p.m, p.ref, p.s.certOrder, p.s.phi0, p.s.phiL);
    const StateField y0 = generate_initial_datum(p.m, p.ref, p.s.amplitude, p.s.seed, p.s.datumOrder);
    SimConfig sim = p.s.sim;
    sim.storeSnapshots = true;
    const Trajectory traj = simulate(sim, p.m, p.ref, y0, &cert);

    std::vector<StateField> states;
    states.reserve(traj.snapshots.size());
    for (const auto& s : traj.snapshots)
        states.push_back(to_physical(s, p.m));

    ReconstructOptions opt;
    opt.renormalize = p.s.renormalize;
    PoseField pose = reconstruct_rotation(states, p.ref, Eigen::Matrix3d(p.ref.Rref.back()), opt);
    const Eigen::Vector3d hp = p.s.hp.value_or(reference_tip(p.ref));
    const auto p0 = initial_centerline(pose, states.front(), hp);
    reconstruct_centerline(pose, states, p0, hp);
    const auto back = strains_velocities_from_pose(pose, p.ref);
    const auto observable = decay_observable(pose, states);

    std::vector<double> roundTrip(states.size());
    for (std::size_t n = 0; n < states.size(); ++n)
        roundTrip[n] = (back[n].values - states[n].values).cwiseAbs().maxCoeff();

    const auto header = header_for(text, "reconstruct");
    {
        auto os = open_out(out, "trajectory.csv");
        write_trajectory_csv(os, traj, header);
    }
    {
        auto os = open_out(out, "residuals.csv");
        write_header(os, header);
        os << "# quaternion_norm_defect = " << fmt(pose.normDefect) << '\n';
        os << "t,residual_R,residual_P,route_gap,roundtrip_error,observable\n";
        for (std::size_t n = 0; n < states.size(); ++n)
            os << fmt(pose.times[n]) << ',' << fmt(pose.residualRByTime[n]) << ',' << fmt(pose.residualPByTime[n])
               << ',' << fmt(pose.routeGapByTime[n]) << ',' << fmt(roundTrip[n]) << ',' << fmt(observable[n])
               << '\n';
    }
    const int nt = static_cast<int>(states.size());
    const int count = std::min(p.s.poseSnapshots, nt);
    for (int k = 0; k < count; ++k) {
        const int n = count == 1 ? 0 : static_cast<int>((static_cast<long>(k) * (nt - 1)) / (count - 1));
        char name[40];
        std::snprintf(name, sizeof name, "pose_%05d.csv", n);
        auto os = open_out(out, name);
        write_header(os, header);
        write_pose_csv(os, pose, n);
    }

    const double start = fit_window_start(p.s, p.m);
    const FitOrNan fl = try_fit(traj.times, traj.lyap, start);
    const FitOrNan fo = try_fit(pose.times, observable, start);
    {
        auto os = open_out(out, "summary.csv");
        write_header(os, header);
        os << "# certificate_valid = " << (cert.valid ? "true" : "false") << '\n';
        os << "# quaternion_norm_defect = " << fmt(pose.normDefect) << '\n';
        os << "# residual_R = " << fmt(pose.residualR) << '\n';
        os << "# residual_P = " << fmt(pose.residualP) << '\n';
        os << "# route_gap = " << fmt(pose.routeGap) << '\n';
        os << "# roundtrip_error = " << fmt(*std::max_element(roundTrip.begin(), roundTrip.end())) << '\n';
        os << "series,alpha,eta,r_squared\n";
        write_fit(os, "lyapunov", fl);
        write_fit(os, "pose_observable", fo);
    }
    log << "reconstructed " << nt << " time levels; residual_R = " << fmt(pose.residualR)
        << ", residual_P = " << fmt(pose.residualP) << ", C2 = " << fmt(fo.fit.alpha) << '\n';
    return exit_ok;
}

int run_dump_matrices(const ScenarioText& text, const std::filesystem::path& out, std::ostream& log)
{
    const Scenario s = resolve(text);
    const BeamMatricesd m = scenario_matrices(s);
    auto os = open_out(out, "matrices.csv");
    write_header(os, header_for(text, "dump-matrices"));
    write_matrices_csv(os, m);
    log << "wrote " << (out / "matrices.csv").string() << '\n';
    return exit_ok;
}

SweepAxis sweep_axis_from_string(const std::string& s)
{
    if (s == "mu1")
        return SweepAxis::mu1;
    if (s == "mu2")
        return SweepAxis::mu2;
    if (s == "amplitude")
        return SweepAxis::amplitude;
    if (s == "N")
        return SweepAxis::N;
    throw ValidationError({"sweep axis must be mu1, mu2, amplitude or N"});
}

namespace {

const char* axis_name(SweepAxis a)
{
    switch (a) {
    case SweepAxis::mu1:
        return "mu1";
    case SweepAxis::mu2:
        return "mu2";
    case SweepAxis::amplitude:
        return "amplitude";
    case SweepAxis::N:
        return "N";
    }
    return "?";
}

ScenarioText with_axis_value(const ScenarioText& base, SweepAxis axis, double value)
{
    ScenarioText t = base;
    switch (axis) {
    case SweepAxis::mu1:
    case SweepAxis::mu2: {
        // freeze the other gain at its current effective value
        const BeamMatricesd m = scenario_matrices(resolve(base));
        t.set("params.feedback", "gains");
        t.set("params.mu1", fmt(axis == SweepAxis::mu1 ? value : m.mu(0)));
        t.set("params.mu2", fmt(axis == SweepAxis::mu2 ? value : m.mu(3)));
        break;
    }
    case SweepAxis::amplitude:
        t.set("datum.amplitude", fmt(value));
        break;
    case SweepAxis::N:
        if (value != std::floor(value))
            throw ValidationError({"sweep values for N must be integers"});
        t.set("sim.N", std::to_string(static_cast<long>(value)));
        break;
    }
    return t;
}

SweepRow sweep_row(const ScenarioText& base, SweepAxis axis, double value)
{
    SweepRow row;
    row.value = value;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const Prepared p = prepare(with_axis_value(base, axis, value));
        row.Ckappa = p.m.Ckappa;
        const LyapunovCertificate cert = build_certificate(p.m, p.ref, p.s.certOrder, p.s.phi0, p.s.phiL);
        row.certValid = cert.valid;
        const StateField y0 = generate_initial_datum(p.m, p.ref, p.s.amplitude, p.s.seed, p.s.datumOrder);
        const Trajectory traj = simulate(p.s.sim, p.m, p.ref, y0, &cert);
        const DecayFit fit = fit_decay(traj.times, traj.lyap, fit_window_start(p.s, p.m));
        row.alpha = fit.alpha;
        if (!(fit.alpha > 0.0))
            row.status = "no decay";
    } catch (const BlowupDetected& e) {
        row.alpha = std::numeric_limits<double>::quiet_NaN();
        row.status = std::string("blow-up at t = ") + fmt(e.time());
    } catch (const std::exception& e) {
        row.alpha = std::numeric_limits<double>::quiet_NaN();
        std::string msg = e.what();
        for (auto& ch : msg)
            if (ch == '\n' || ch == ',')
                ch = ' ';
        row.status = "error: " + msg;
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

} // namespace

std::vector<SweepRow> sweep(const ScenarioText& text, SweepAxis axis, const std::vector<double>& values,
                            int workers)
{
    std::vector<SweepRow> rows(values.size());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (std::size_t i = next++; i < values.size(); i = next++)
            rows[i] = sweep_row(text, axis, values[i]);
    };
    const int n = std::max(1, std::min<int>(workers, static_cast<int>(values.size())));
    std::vector<std::thread> pool;
    for (int w = 1; w < n; ++w)
        pool.emplace_back(work);
    work();
    for (auto& th : pool)
        th.join();
    return rows;
}

int run_sweep(const ScenarioText& text, SweepAxis axis, const std::vector<double>& values, int workers,
              const std::filesystem::path& out, std::ostream& log)
{
    std::vector<std::string> problems;
    for (double v : values) {
        if (!std::isfinite(v))
            problems.push_back("sweep values must be finite");
        else if (axis != SweepAxis::amplitude && !(v > 0.0))
            problems.push_back(std::string("sweep values for ") + axis_name(axis) + " must be > 0");
        else if (axis == SweepAxis::amplitude && v < 0.0)
            problems.push_back("sweep amplitudes must be >= 0");
    }
    if (values.empty())
        problems.push_back("sweep needs at least one value");
    if (!problems.empty())
        throw ValidationError(std::move(problems));
    resolve(text); // fail early on a bad base scenario

    const std::vector<SweepRow> rows = sweep(text, axis, values, workers);

    auto os = open_out(out, "sweep.csv");
    write_header(os, header_for(text, std::string("sweep ") + axis_name(axis)));
    os << "value,Ckappa,certificate_valid,alpha,status\n";
    for (const auto& r : rows)
        os << fmt(r.value) << ',' << fmt(r.Ckappa) << ',' << (r.certValid ? "true" : "false") << ','
           << fmt(r.alpha) << ',' << r.status << '\n';
    if (axis == SweepAxis::amplitude) {
        std::string first = "none";
        for (const auto& r : rows)
            if (r.status != "ok") {
                first = fmt(r.value);
                break;
            }
        os << "# first_failing_amplitude = " << first << '\n';
        log << "first failing amplitude: " << first << '\n';
    }
    // wall-clock times vary between runs, so they live in their own file
    auto rt = open_out(out, "runtime.csv");
    rt << "value,seconds\n";
    for (const auto& r : rows)
        rt << fmt(r.value) << ',' << fmt(r.seconds) << '\n';
    log << "sweep over " << axis_name(axis) << ": " << rows.size() << " rows\n";
    return exit_ok;
}

} // namespace geb
