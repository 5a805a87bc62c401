#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "geb/beam.hpp"
#include "geb/lyapunov.hpp"
#include "geb/reference.hpp"
#include "geb/state.hpp"

namespace geb {

enum class Scheme { upwind1, upwind2 };

const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct SimConfig
{
    int N = 128;
    double cfl = 0.9;
    double tEnd = 1.0;
    int outputStride = 1;
    Scheme scheme = Scheme::upwind1;
    bool storeSnapshots = false;
    bool coupling = true;     // B(x) r term
    bool nonlinear = true;    // g(r) term
    int lyapunovOrder = 1;    // k in the Lyapunov functional, 1 or 2
    double blowupThreshold = 1e6;
    long maxSteps = 10'000'000;
};

/// Throws CFLViolation for cfl outside (0, 0.95], ValidationError otherwise.
void validate(const SimConfig& c);

struct Trajectory
{
    std::vector<double> times;
    std::vector<double> energyP, energyD;
    std::vector<double> lyap;          // empty when no certificate was given
    std::vector<double> h1, h2;        // squared Sobolev norms of y; h2 only for k = 2
    std::vector<std::array<Vector6d, 4>> traces; // r-(0), r+(0), r-(l), r+(l)
    std::vector<StateField> snapshots; // diagonal representation
    StateField final;                  // diagonal representation
    double dt = 0.0;
    long steps = 0;
};

/// x-derivative of every component of r using the scheme's upwind stencils
/// (leftward components 0..5 look right, rightward components 6..11 look left).
Field12 upwind_derivative(const Field12& r, const Grid& g, Scheme scheme);

/// Right-hand side -bigD r_x - B r + g(r); entries of incoming components at
/// the two boundaries are left as computed and overwritten by apply_boundary.
Field12 rhs(const Field12& r, const BeamMatricesd& m, const PrecurvedReference& ref, Scheme scheme,
            bool coupling = true, bool nonlinear = true);

/// r+(0) = kappa r-(0), r-(l) = -r+(l).
void apply_boundary(Field12& r, const BeamMatricesd& m);

/// Energies: E_P from the physical and E_D from the diagonal representation.
std::pair<double, double> energies(const StateField& state, const BeamMatricesd& m);

/// Squared H^1 (order 1) or H^2 (order 2) norm of y, using the scheme stencils on r.
double sobolev_norm_sq(const StateField& state, const BeamMatricesd& m, Scheme scheme, int order);

/// sum_{j<=k} int <d_t^j r, Q d_t^j r> dx with d_t r from the discrete right-hand side.
double lyapunov_value(const StateField& state, const LyapunovCertificate& cert, const BeamMatricesd& m,
                      const PrecurvedReference& ref, int k, Scheme scheme = Scheme::upwind1,
                      bool coupling = true, bool nonlinear = true);

Trajectory simulate(const SimConfig& config, const BeamMatricesd& m, const PrecurvedReference& ref,
                    const StateField& y0, const LyapunovCertificate* cert = nullptr);

struct CompatibilityReport
{
    double vAtL = 0.0;        // |v0(l)|
    double feedbackAt0 = 0.0; // |C^-1 s0(0) - mu v0(0)|
    double v1AtL = 0.0;       // same for y1 = -A y0' - Bbar y0 + gbar(y0)
    double feedback1At0 = 0.0;
    int order = 0;

    double worst() const;
};

CompatibilityReport check_compatibility(const StateField& y0, const BeamMatricesd& m,
                                        const PrecurvedReference& ref, int order);

/// Smooth pseudo-random datum satisfying the compatibility conditions of the
/// given order, with H^1 norm close to `amplitude` (exact for order 0).
StateField generate_initial_datum(const BeamMatricesd& m, const PrecurvedReference& ref, double amplitude,
                                  std::uint64_t seed, int order);

struct DecayFit
{
    double alpha = 0.0;
    double eta = 0.0;
    double rSquared = 0.0;
    int points = 0;
};

/// Least-squares line through log(values) over times >= windowStart.
DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values, double windowStart = 0.0);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::vector<std::string>& header);
void write_snapshot_csv(std::ostream& os, const StateField& diagonal, const BeamMatricesd& m);

} // namespace geb
