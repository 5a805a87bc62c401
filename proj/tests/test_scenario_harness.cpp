#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "geb/harness.hpp"
#include "geb/scenario.hpp"

using namespace geb;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("geb_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

ScenarioText quick(const std::string& name = "straight-toy")
{
    ScenarioText t = preset(name);
    t.set("sim.N", "32");
    t.set("sim.tEnd", "2");
    return t;
}

} // namespace

TEST(Scenario, ParsesSectionsCommentsAndPreset)
{
    std::stringstream ss(R"(preset = helical
# a comment
name = mine
[params]
rho = 2.5   # trailing comment
[sim]
N = 64
scheme = upwind2
)");
    const ScenarioText t = parse_scenario(ss);
    EXPECT_EQ(t.get("name"), "mine");
    EXPECT_EQ(t.get("params.rho"), "2.5");
    EXPECT_EQ(t.get("reference.kind"), "constant");
    const Scenario s = resolve(t);
    EXPECT_EQ(s.sim.N, 64);
    EXPECT_EQ(s.sim.scheme, Scheme::upwind2);
    EXPECT_DOUBLE_EQ(s.params.rho, 2.5);
}

TEST(Scenario, UnknownKeysAreErrors)
{
    std::stringstream ss("[params]\nrhoo = 1\n[sim]\nNN = 3\n");
    try {
        parse_scenario(ss);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.problems().size(), 2u);
    }
    ScenarioText t;
    EXPECT_THROW(apply_override(t, "sim.bogus=1"), ValidationError);
    EXPECT_THROW(apply_override(t, "no-equals-sign"), ValidationError);
    EXPECT_THROW(preset("no-such-preset"), ValidationError);
}

TEST(Scenario, ResolveCollectsEveryProblem)
{
    ScenarioText t;
    apply_override(t, "params.mu1=0");
    apply_override(t, "params.mu2=0");
    apply_override(t, "sim.cfl=2");
    apply_override(t, "datum.order=3");
    try {
        resolve(t);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_GE(e.problems().size(), 4u);
        std::string all;
        for (const auto& p : e.problems())
            all += p + "\n";
        EXPECT_NE(all.find("params.mu1"), std::string::npos);
        EXPECT_NE(all.find("sim.cfl"), std::string::npos);
    }
    ScenarioText u;
    apply_override(u, "params.rho=abc");
    EXPECT_THROW(resolve(u), ValidationError);
}

TEST(Scenario, AutoGainsAreOptimal)
{
    const Scenario s = resolve(preset("straight-toy"));
    const auto m = scenario_matrices(s);
    BeamParamsd p = s.params;
    const auto [mu1, mu2] = optimal_feedback(p);
    EXPECT_DOUBLE_EQ(m.mu(0), mu1);
    EXPECT_DOUBLE_EQ(m.mu(3), mu2);

    ScenarioText t = preset("straight-toy");
    t.set("params.feedback", "transparent");
    EXPECT_EQ(scenario_matrices(resolve(t)).Ckappa, 0.0);
}

TEST(Scenario, PresetsResolve)
{
    for (const auto& name : preset_names()) {
        const Scenario s = resolve(preset(name));
        const auto m = scenario_matrices(s);
        EXPECT_NO_THROW(scenario_reference(s, m));
        EXPECT_GT(fit_window_start(s, m), 0.0);
    }
    EXPECT_EQ(preset_names().size(), 3u);
}

TEST(Harness, CertifyWritesReportWithEcho)
{
    const auto out = scratch("certify");
    std::stringstream log;
    EXPECT_EQ(run_certify(quick("helical"), out, log), exit_ok);
    const std::string text = slurp(out / "certificate.csv");
    EXPECT_NE(text.find("# params.rho = "), std::string::npos);
    EXPECT_NE(text.find("# tool = gebctl 1.0"), std::string::npos);
    EXPECT_NE(text.find("# valid = true"), std::string::npos);
}

TEST(Harness, WindowViolationMapsToCertificateCode)
{
    ScenarioText t = quick();
    t.set("certificate.phiL", "1000");
    std::stringstream log;
    int rc = 0;
    try {
        run_certify(t, scratch("window"), log);
    } catch (...) {
        rc = exit_code_for_current_exception(log);
    }
    EXPECT_EQ(rc, exit_certificate);
    EXPECT_NE(log.str().find("WindowViolation"), std::string::npos);
}

TEST(Harness, SimulateIsDeterministic)
{
    const auto a = scratch("det_a"), b = scratch("det_b");
    std::stringstream log;
    ASSERT_EQ(run_simulate(quick(), a, log), exit_ok);
    ASSERT_EQ(run_simulate(quick(), b, log), exit_ok);
    int files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path();
        ++files;
    }
    EXPECT_GE(files, 2);
}

TEST(Harness, ZeroAmplitudeGivesZeroOutput)
{
    ScenarioText t = quick();
    t.set("datum.amplitude", "0");
    const auto out = scratch("zero");
    std::stringstream log;
    ASSERT_EQ(run_simulate(t, out, log), exit_ok);
    std::ifstream is(out / "trajectory.csv");
    std::string line;
    int rows = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 't')
            continue;
        ++rows;
        std::stringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ','); // time
        while (std::getline(ls, cell, ','))
            if (cell != "nan")
                EXPECT_EQ(std::stod(cell), 0.0) << line;
    }
    EXPECT_GT(rows, 0);
}

TEST(Harness, ReconstructWritesPoseFiles)
{
    ScenarioText t = quick();
    t.set("sim.outputStride", "1");
    const auto out = scratch("reconstruct");
    std::stringstream log;
    ASSERT_EQ(run_reconstruct(t, out, log), exit_ok);
    EXPECT_TRUE(fs::exists(out / "residuals.csv"));
    EXPECT_TRUE(fs::exists(out / "summary.csv"));
    int poses = 0;
    for (const auto& e : fs::directory_iterator(out))
        poses += e.path().filename().string().rfind("pose_", 0) == 0;
    EXPECT_EQ(poses, 5);
}

TEST(Harness, SweepKeepsInputOrderAndMinimisesCkappaAtOptimum)
{
    const Scenario s = resolve(preset("straight-toy"));
    const double opt = scenario_matrices(s).mu(0);
    std::vector<double> values;
    for (int k = -6; k <= 6; ++k)
        values.push_back(opt * std::pow(2.0, k / 4.0));
    ScenarioText t = quick();
    t.set("sim.tEnd", "0.5");
    const auto rows = sweep(t, SweepAxis::mu1, values, 3);
    ASSERT_EQ(rows.size(), values.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].value, values[i]);
        if (rows[i].Ckappa < rows[best].Ckappa)
            best = i;
    }
    EXPECT_EQ(best, 6u);
}

TEST(Harness, SweepRecordsFailuresAndContinues)
{
    ScenarioText t = quick();
    t.set("sim.blowup", "0.5");
    const auto out = scratch("sweep_amp");
    std::stringstream log;
    ASSERT_EQ(run_sweep(t, SweepAxis::amplitude, {1e-3, 1e-2, 1.0, 2.0}, 2, out, log), exit_ok);
    const std::string text = slurp(out / "sweep.csv");
    EXPECT_NE(text.find("# first_failing_amplitude = 1\n"), std::string::npos) << text;
    EXPECT_TRUE(fs::exists(out / "runtime.csv"));

    EXPECT_THROW(run_sweep(t, SweepAxis::N, {64, -1}, 1, out, log), ValidationError);
}

#ifdef GEBCTL_PATH
TEST(Cli, ExitCodes)
{
    const auto out = scratch("cli");
    const std::string exe = GEBCTL_PATH;
    auto run = [&](const std::string& args) {
        const int status = std::system((exe + " " + args + " --out " + out.string() + " >/dev/null 2>&1").c_str());
        return WEXITSTATUS(status);
    };
    EXPECT_EQ(run("certify --override sim.N=32"), 0);
    EXPECT_EQ(run("certify --override params.mu1=0 --override params.mu2=0"), 2);
    EXPECT_EQ(run("certify --override certificate.phiL=1000"), 3);
    EXPECT_EQ(run("simulate --override sim.N=32 --override sim.blowup=1e-9"), 4);
    EXPECT_EQ(run("certify --override nope=1"), 2);
    EXPECT_EQ(run("certify --scenario /no/such/file"), 1);
    EXPECT_EQ(run("frobnicate"), 1);
    EXPECT_EQ(run("dump-matrices --preset straight-steel"), 0);
    EXPECT_TRUE(fs::exists(out / "matrices.csv"));
}
#endif
