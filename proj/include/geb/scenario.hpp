#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geb/beam.hpp"
#include "geb/reference.hpp"
#include "geb/solver.hpp"

namespace geb {

/// Flat key/value view of a scenario. Keys are dot paths ("params.rho",
/// "sim.N"); the set of keys is fixed by the defaults, so unknown keys are
/// rejected instead of silently ignored.
class ScenarioText
{
public:
    ScenarioText();

    void set(const std::string& key, const std::string& value);
    const std::string& get(const std::string& key) const;
    bool known(const std::string& key) const { return entries_.count(key) != 0; }
    const std::map<std::string, std::string>& entries() const { return entries_; }

    /// "key = value" lines for output headers, sorted by key.
    std::vector<std::string> echo() const;

private:
    std::map<std::string, std::string> entries_;
};

std::vector<std::string> preset_names();
ScenarioText preset(const std::string& name);

/// Parses "key = value" lines. "[section]" lines prefix following keys with
/// "section."; '#' starts a comment; a leading "preset = name" line selects
/// the base preset (straight-toy otherwise).
ScenarioText parse_scenario(std::istream& is);

/// "key=value" as given on the command line.
void apply_override(ScenarioText& text, const std::string& assignment);

enum class FeedbackMode { gains, optimal, transparent };
enum class ReferenceKind { straight, constant, file };

struct Scenario
{
    std::string name;
    BeamParamsd params;
    FeedbackMode feedback = FeedbackMode::gains;
    ReferenceKind reference = ReferenceKind::straight;
    Eigen::Vector3d curvature = Eigen::Vector3d::Zero();
    std::string referenceFile;
    SimConfig sim;
    int certOrder = 1;
    double phi0 = 1.0;
    std::optional<double> phiL;
    double delta = 0.0;
    double amplitude = 1e-2;
    std::uint64_t seed = 1;
    int datumOrder = 1;
    std::optional<Eigen::Vector3d> hp;
    int poseSnapshots = 5;
    bool renormalize = true;
    std::optional<double> fitWindowStart;
};

/// Typed view; every malformed or invalid field is reported in one ValidationError.
Scenario resolve(const ScenarioText& text);

/// Matrices with the feedback mode applied (optimal gains, or mu = diag(M D)).
BeamMatricesd scenario_matrices(const Scenario& s);
PrecurvedReference scenario_reference(const Scenario& s, const BeamMatricesd& m);

/// Start of the decay-fit window: one round trip 2 l / lambda_7 unless set.
double fit_window_start(const Scenario& s, const BeamMatricesd& m);

} // namespace geb
