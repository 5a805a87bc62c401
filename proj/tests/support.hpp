#pragma once

#include <random>
#include <string>

#include "geb/beam.hpp"
#include "geb/rng.hpp"
#include "geb/scenario.hpp"

namespace geb::test {

// Parameters spread over a few decades, still physically ordered (G < E).
inline BeamParamsd random_params(std::mt19937_64& gen)
{
    auto logu = [&gen](double lo, double hi) { return std::exp(uniform(gen, std::log(lo), std::log(hi))); };
    BeamParamsd p;
    p.rho = logu(0.5, 1e4);
    p.a = logu(1e-3, 2.0);
    p.youngE = logu(1.0, 1e11);
    p.shearG = p.youngE * uniform(gen, 0.3, 0.5);
    p.I2 = logu(1e-5, 1.0);
    p.I3 = p.I2 * logu(0.3, 3.0);
    p.k1 = uniform(gen, 0.5, 1.0);
    p.k2 = uniform(gen, 0.5, 1.0);
    p.k3 = uniform(gen, 0.5, 1.0);
    p.length = logu(0.5, 5.0);
    p.mu1 = 1.0;
    p.mu2 = 1.0;
    const auto [mu1, mu2] = optimal_feedback(p);
    p.mu1 = mu1 * logu(0.2, 5.0);
    p.mu2 = mu2 * logu(0.2, 5.0);
    return p;
}

inline Scenario preset_scenario(const std::string& name, int N = 128)
{
    ScenarioText t = preset(name);
    t.set("sim.N", std::to_string(N));
    return resolve(t);
}

} // namespace geb::test
