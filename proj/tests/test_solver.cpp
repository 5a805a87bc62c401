#include <gtest/gtest.h>

#include <sstream>

#include "geb/lyapunov.hpp"
#include "geb/solver.hpp"
#include "support.hpp"

using namespace geb;

namespace {

struct Setup
{
    Scenario s;
    BeamMatricesd m;
    PrecurvedReference ref;
};

Setup setup(const std::string& name, int N)
{
    Setup u{test::preset_scenario(name, N), {}, {}};
    u.m = scenario_matrices(u.s);
    u.ref = scenario_reference(u.s, u.m);
    return u;
}

double bump(double x, double c, double w)
{
    const double s = (x - c) / w;
    return std::abs(s) < 1 ? std::pow(1 - s * s, 4) : 0.0;
}

} // namespace

TEST(FitDecay, RecoversExactExponential)
{
    std::vector<double> t, v;
    for (int k = 0; k < 40; ++k) {
        t.push_back(0.1 * k);
        v.push_back(3.0 * std::exp(-0.7 * t.back()));
    }
    const auto f = fit_decay(t, v);
    EXPECT_NEAR(f.alpha, 0.7, 1e-12);
    EXPECT_NEAR(f.eta, 3.0, 1e-12);
    EXPECT_NEAR(f.rSquared, 1.0, 1e-12);
    EXPECT_EQ(f.points, 40);

    // a transient before the window is ignored
    for (int k = 0; k < 10; ++k)
        v[k] *= 5;
    const auto g = fit_decay(t, v, 1.0);
    EXPECT_NEAR(g.alpha, 0.7, 1e-12);
    EXPECT_EQ(g.points, 30);

    v[20] = 0.0;
    EXPECT_THROW(fit_decay(t, v), NonPositiveValues);
    EXPECT_THROW(fit_decay({0, 1, 2}, {1, 1, 1}), ValidationError);
    EXPECT_THROW(fit_decay(t, std::vector<double>(40, 1.0), 100.0), ValidationError);
}

TEST(Solver, ConfigValidation)
{
    SimConfig c;
    c.cfl = 0.96;
    EXPECT_THROW(validate(c), CFLViolation);
    c.cfl = 0.0;
    EXPECT_THROW(validate(c), CFLViolation);
    c.cfl = 0.5;
    c.N = 8;
    EXPECT_THROW(validate(c), ValidationError);
    EXPECT_EQ(scheme_from_string("upwind2"), Scheme::upwind2);
    EXPECT_THROW(scheme_from_string("weno"), ValidationError);
}

TEST(Solver, UpwindDerivativeExactOnLinearData)
{
    const Grid g{2.0, 32};
    Field12 r(12, g.nodes());
    for (int j = 0; j <= g.N; ++j)
        for (int i = 0; i < 12; ++i)
            r(i, j) = (i + 1) * g.x(j) - 0.5 * i;
    for (Scheme sc : {Scheme::upwind1, Scheme::upwind2}) {
        const Field12 d = upwind_derivative(r, g, sc);
        for (int j = 0; j <= g.N; ++j)
            for (int i = 0; i < 12; ++i)
                EXPECT_NEAR(d(i, j), i + 1.0, 1e-12) << to_string(sc);
    }
}

TEST(Solver, EnergiesAgreeAcrossRepresentations)
{
    const auto u = setup("helical", 64);
    const StateField y = generate_initial_datum(u.m, u.ref, 1e-2, 4, 1);
    const auto [ep, ed] = energies(y, u.m);
    EXPECT_NEAR(ep, ed, 1e-14 * ep);
    const auto [ep2, ed2] = energies(to_diagonal(y, u.m), u.m);
    EXPECT_NEAR(ep2, ep, 1e-14 * ep);
    EXPECT_NEAR(ed2, ep, 1e-14 * ep);
}

TEST(Datum, DeterministicAndCompatible)
{
    const auto u = setup("helical", 256);
    const StateField a = generate_initial_datum(u.m, u.ref, 1e-2, 9, 1);
    const StateField b = generate_initial_datum(u.m, u.ref, 1e-2, 9, 1);
    const StateField c = generate_initial_datum(u.m, u.ref, 1e-2, 10, 1);
    EXPECT_EQ(a.values, b.values);
    EXPECT_GT((a.values - c.values).cwiseAbs().maxCoeff(), 1e-6);

    const auto c0 = check_compatibility(a, u.m, u.ref, 0);
    EXPECT_LT(c0.worst(), 1e-14);
    const auto c1 = check_compatibility(a, u.m, u.ref, 1);
    EXPECT_LT(c1.worst(), 1e-8);

    const double h1 = std::sqrt(sobolev_norm_sq(a, u.m, Scheme::upwind1, 1));
    EXPECT_NEAR(h1, 1e-2, 1e-3);

    const StateField z = generate_initial_datum(u.m, u.ref, 0.0, 9, 1);
    EXPECT_EQ(z.values.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_THROW(generate_initial_datum(u.m, u.ref, -1.0, 9, 1), ValidationError);
}

TEST(Datum, ZeroOrderScalesLinearly)
{
    const auto u = setup("straight-toy", 64);
    const StateField a = generate_initial_datum(u.m, u.ref, 1e-2, 2, 0);
    const StateField b = generate_initial_datum(u.m, u.ref, 1e-3, 2, 0);
    EXPECT_LT((a.values - 10.0 * b.values).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Solver, RejectsIncompatibleDatum)
{
    const auto u = setup("straight-toy", 32);
    StateField y = StateField::zero(u.ref.grid, Repr::physical);
    y.values.setConstant(0.1);
    SimConfig c;
    c.N = 32;
    EXPECT_THROW(simulate(c, u.m, u.ref, y), ValidationError);
}

TEST(Solver, ZeroDatumStaysZero)
{
    const auto u = setup("helical", 32);
    SimConfig c;
    c.N = 32;
    c.tEnd = 0.5;
    const auto tr = simulate(c, u.m, u.ref, StateField::zero(u.ref.grid, Repr::physical));
    EXPECT_EQ(tr.final.values.cwiseAbs().maxCoeff(), 0.0);
    for (double e : tr.energyD)
        EXPECT_EQ(e, 0.0);
}

TEST(Solver, BoundaryRelationsAndDissipation)
{
    const auto u = setup("helical", 128);
    const auto cert = build_certificate(u.m, u.ref);
    SimConfig c;
    c.N = 128;
    c.tEnd = 2.0;
    const auto y0 = generate_initial_datum(u.m, u.ref, 1e-2, 1, 1);
    const auto tr = simulate(c, u.m, u.ref, y0, &cert);
    ASSERT_EQ(tr.times.back(), 2.0);
    const Vector6d kap = u.m.kappa.diagonal();
    for (const auto& tr4 : tr.traces) {
        const double s = 1e-12 * (1 + tr4[0].cwiseAbs().maxCoeff() + tr4[3].cwiseAbs().maxCoeff());
        EXPECT_LE((tr4[1] - kap.cwiseProduct(tr4[0])).cwiseAbs().maxCoeff(), s);
        EXPECT_LE((tr4[2] + tr4[3]).cwiseAbs().maxCoeff(), s);
    }
    for (std::size_t k = 1; k < tr.energyD.size(); ++k)
        EXPECT_LE(tr.energyD[k], tr.energyD[k - 1] * (1 + 1e-6));
    EXPECT_LT(tr.lyap.back(), tr.lyap.front());
    EXPECT_GT(tr.lyap.back(), 0.0);
}

TEST(Solver, BlowupIsReported)
{
    const auto u = setup("straight-toy", 32);
    SimConfig c;
    c.N = 32;
    c.blowupThreshold = 1e-6;
    const auto y0 = generate_initial_datum(u.m, u.ref, 1e-2, 1, 1);
    try {
        simulate(c, u.m, u.ref, y0);
        FAIL() << "expected BlowupDetected";
    } catch (const BlowupDetected& e) {
        EXPECT_GE(e.time(), 0.0);
    }
}

TEST(Solver, TransportMatchesCharacteristics)
{
    // B = 0, g = 0 and kappa = 0: every component translates at its speed,
    // rightward ones reflect at x = l with a sign flip and leave through x = 0.
    auto u = setup("straight-toy", 128);
    BeamParamsd p = u.m.params;
    p.mu_diag = u.m.MD();
    const auto m = derive_matrices(p);
    const auto ref = straight_reference(m, 128);
    const double l = p.length;
    auto init = [&](int i, double x) { return (1.0 + 0.1 * i) * bump(x, 0.5 * l, 0.4 * l); };

    StateField r0 = StateField::zero(ref.grid, Repr::diagonal);
    for (int j = 0; j <= 128; ++j)
        for (int i = 0; i < 12; ++i)
            r0.values(i, j) = init(i, ref.grid.x(j));
    SimConfig c;
    c.N = 128;
    c.scheme = Scheme::upwind2;
    c.coupling = false;
    c.nonlinear = false;
    c.tEnd = 0.5 * l / m.lambda.tail<6>().minCoeff();
    const auto tr = simulate(c, m, ref, to_physical(r0, m));
    const double T = c.tEnd;
    double err = 0, pulse = 0;
    for (int j = 0; j <= 128; ++j) {
        const double x = ref.grid.x(j), wq = (j == 0 || j == 128) ? 0.5 : 1.0;
        for (int i = 0; i < 6; ++i) {
            const double d = m.lambda(6 + i);
            const double xm = x + d * T, xp = x - d * T;
            const double em = xm <= l ? init(i, xm) : (2 * l - xm >= 0 ? -init(6 + i, 2 * l - xm) : 0.0);
            const double ep = xp >= 0 ? init(6 + i, xp) : 0.0;
            err += wq * (std::abs(tr.final.values(i, j) - em) + std::abs(tr.final.values(6 + i, j) - ep));
            pulse += wq * (std::abs(r0.values(i, j)) + std::abs(r0.values(6 + i, j)));
        }
    }
    EXPECT_LT(err, 5 * ref.grid.dx() * pulse);
}

TEST(Solver, LyapunovValueOrders)
{
    const auto u = setup("straight-toy", 64);
    const auto cert = build_certificate(u.m, u.ref);
    const auto y = to_diagonal(generate_initial_datum(u.m, u.ref, 1e-2, 1, 1), u.m);
    const double l1 = lyapunov_value(y, cert, u.m, u.ref, 1);
    const double l2 = lyapunov_value(y, cert, u.m, u.ref, 2);
    EXPECT_GT(l1, 0.0);
    EXPECT_GT(l2, l1);
    // k = 1 dominates the weighted L2 energy with the smallest weight
    const auto [ep, ed] = energies(y, u.m);
    (void)ep;
    EXPECT_GT(l1, cert.phi0 * ed * 0.999);
}

TEST(Solver, TrajectoryCsvColumns)
{
    const auto u = setup("straight-toy", 32);
    SimConfig c;
    c.N = 32;
    c.tEnd = 0.1;
    const auto tr = simulate(c, u.m, u.ref, generate_initial_datum(u.m, u.ref, 1e-2, 1, 1));
    std::stringstream ss;
    write_trajectory_csv(ss, tr, {"name = test"});
    std::string line;
    std::getline(ss, line);
    EXPECT_EQ(line, "# name = test");
    while (std::getline(ss, line) && line[0] == '#') {
    }
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 4 + 24);
    int rows = 0;
    while (std::getline(ss, line))
        ++rows;
    EXPECT_EQ(rows, static_cast<int>(tr.times.size()));
}
