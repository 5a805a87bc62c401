#include "geb/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace geb {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const std::vector<std::pair<std::string, std::string>>& defaults()
{
    static const std::vector<std::pair<std::string, std::string>> d = {
        {"name", "straight-toy"},
        {"params.rho", "1"},
        {"params.a", "1"},
        {"params.E", "4"},
        {"params.G", "1"},
        {"params.I2", "1"},
        {"params.I3", "1"},
        {"params.k1", "1"},
        {"params.k2", "1"},
        {"params.k3", "1"},
        {"params.length", "1"},
        {"params.mu1", "auto"},
        {"params.mu2", "auto"},
        {"params.feedback", "gains"},
        {"reference.kind", "straight"},
        {"reference.curvature", "0,0,0"},
        {"reference.file", ""},
        {"sim.N", "128"},
        {"sim.cfl", "0.9"},
        {"sim.tEnd", "10"},
        {"sim.outputStride", "4"},
        {"sim.scheme", "upwind1"},
        {"sim.coupling", "true"},
        {"sim.nonlinear", "true"},
        {"sim.lyapunovOrder", "1"},
        {"sim.blowup", "1e6"},
        {"sim.maxSteps", "10000000"},
        {"sim.snapshots", "false"},
        {"certificate.m", "1"},
        {"certificate.phi0", "1"},
        {"certificate.phiL", "auto"},
        {"certificate.delta", "0"},
        {"datum.amplitude", "0.01"},
        {"datum.seed", "1"},
        {"datum.order", "1"},
        {"reconstruct.hp", "auto"},
        {"reconstruct.poseSnapshots", "5"},
        {"reconstruct.renormalize", "true"},
        {"fit.windowStart", "auto"},
    };
    return d;
}

class FieldReader
{
public:
    explicit FieldReader(const ScenarioText& t) : text_(t) {}

    double number(const std::string& key)
    {
        const std::string& s = text_.get(key);
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
            problems.push_back(key + ": '" + s + "' is not a finite number");
            return 0.0;
        }
        return v;
    }

    long integer(const std::string& key)
    {
        const std::string& s = text_.get(key);
        long v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
            problems.push_back(key + ": '" + s + "' is not an integer");
            return 0;
        }
        return v;
    }

    bool boolean(const std::string& key)
    {
        const std::string& s = text_.get(key);
        if (s == "true" || s == "1" || s == "yes")
            return true;
        if (s == "false" || s == "0" || s == "no")
            return false;
        problems.push_back(key + ": '" + s + "' is not a boolean");
        return false;
    }

    std::optional<double> auto_number(const std::string& key)
    {
        if (text_.get(key) == "auto")
            return std::nullopt;
        return number(key);
    }

    Eigen::Vector3d vec3(const std::string& key)
    {
        std::stringstream ss(text_.get(key));
        std::string cell;
        std::vector<double> v;
        while (std::getline(ss, cell, ',')) {
            cell = trim(cell);
            double x = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), x);
            if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() || !std::isfinite(x)) {
                problems.push_back(key + ": '" + text_.get(key) + "' is not a list of 3 numbers");
                return Eigen::Vector3d::Zero();
            }
            v.push_back(x);
        }
        if (v.size() != 3) {
            problems.push_back(key + ": expected 3 comma-separated numbers");
            return Eigen::Vector3d::Zero();
        }
        return {v[0], v[1], v[2]};
    }

    const std::string& str(const std::string& key) { return text_.get(key); }

    std::vector<std::string> problems;

private:
    const ScenarioText& text_;
};

} // namespace

ScenarioText::ScenarioText()
{
    for (const auto& [k, v] : defaults())
        entries_[k] = v;
}

void ScenarioText::set(const std::string& key, const std::string& value)
{
    auto it = entries_.find(key);
    if (it == entries_.end())
        throw ValidationError({"unknown scenario key '" + key + "'"});
    it->second = value;
}

const std::string& ScenarioText::get(const std::string& key) const
{
    return entries_.at(key);
}

std::vector<std::string> ScenarioText::echo() const
{
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_)
        out.push_back(k + " = " + v);
    return out;
}

std::vector<std::string> preset_names()
{
    return {"straight-toy", "straight-steel", "helical"};
}

ScenarioText preset(const std::string& name)
{
    ScenarioText t;
    if (name == "straight-toy")
        return t;
    if (name == "straight-steel") {
        // thin-walled steel tube, outer radius 0.1 m, wall 5 mm
        const double pi = std::acos(-1.0);
        const double ro = 0.1, ri = 0.095;
        t.set("name", name);
        t.set("params.rho", "7850");
        t.set("params.E", "210e9");
        t.set("params.G", "80.8e9");
        t.set("params.a", fmt(pi * (ro * ro - ri * ri)));
        t.set("params.I2", fmt(0.25 * pi * (std::pow(ro, 4) - std::pow(ri, 4))));
        t.set("params.I3", fmt(0.25 * pi * (std::pow(ro, 4) - std::pow(ri, 4))));
        t.set("params.k1", "1");
        t.set("params.k2", "0.5");
        t.set("params.k3", "0.5");
        t.set("params.length", "1");
        // ten round trips of the fastest wave
        t.set("sim.tEnd", fmt(10.0 * 2.0 / std::sqrt(210e9 / 7850.0)));
        t.set("datum.amplitude", "1e-6");
        return t;
    }
    if (name == "helical") {
        t.set("name", name);
        t.set("params.I3", "0.5");
        t.set("reference.kind", "constant");
        t.set("reference.curvature", "0.5,0.3,0.2");
        return t;
    }
    throw ValidationError({"unknown preset '" + name + "'"});
}

ScenarioText parse_scenario(std::istream& is)
{
    std::vector<std::pair<std::string, std::string>> assignments;
    std::vector<std::string> problems;
    std::string line, section;
    std::string base = "straight-toy";
    int lineNo = 0;
    while (std::getline(is, line)) {
        ++lineNo;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                problems.push_back("line " + std::to_string(lineNo) + ": malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            problems.push_back("line " + std::to_string(lineNo) + ": expected key = value");
            continue;
        }
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!section.empty())
            key = section + "." + key;
        if (key == "preset")
            base = value;
        else
            assignments.emplace_back(key, value);
    }
    ScenarioText t;
    try {
        t = preset(base);
    } catch (const ValidationError& e) {
        problems.insert(problems.end(), e.problems().begin(), e.problems().end());
    }
    for (const auto& [k, v] : assignments) {
        if (!t.known(k))
            problems.push_back("unknown scenario key '" + k + "'");
        else
            t.set(k, v);
    }
    if (!problems.empty())
        throw ValidationError(std::move(problems));
    return t;
}

void apply_override(ScenarioText& text, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ValidationError({"override '" + assignment + "' must look like key=value"});
    text.set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

Scenario resolve(const ScenarioText& text)
{
    FieldReader r(text);
    Scenario s;
    s.name = r.str("name");
    BeamParamsd& p = s.params;
    p.rho = r.number("params.rho");
    p.a = r.number("params.a");
    p.youngE = r.number("params.E");
    p.shearG = r.number("params.G");
    p.I2 = r.number("params.I2");
    p.I3 = r.number("params.I3");
    p.k1 = r.number("params.k1");
    p.k2 = r.number("params.k2");
    p.k3 = r.number("params.k3");
    p.length = r.number("params.length");
    // "auto" gains are the optimal ones, filled in below once the rest validates
    const std::optional<double> mu1 = r.auto_number("params.mu1");
    const std::optional<double> mu2 = r.auto_number("params.mu2");
    p.mu1 = mu1.value_or(1.0);
    p.mu2 = mu2.value_or(1.0);

    const std::string& fb = r.str("params.feedback");
    if (fb == "gains")
        s.feedback = FeedbackMode::gains;
    else if (fb == "optimal")
        s.feedback = FeedbackMode::optimal;
    else if (fb == "transparent")
        s.feedback = FeedbackMode::transparent;
    else
        r.problems.push_back("params.feedback must be gains, optimal or transparent");

    const std::string& kind = r.str("reference.kind");
    if (kind == "straight")
        s.reference = ReferenceKind::straight;
    else if (kind == "constant")
        s.reference = ReferenceKind::constant;
    else if (kind == "file")
        s.reference = ReferenceKind::file;
    else
        r.problems.push_back("reference.kind must be straight, constant or file");
    s.curvature = r.vec3("reference.curvature");
    s.referenceFile = r.str("reference.file");
    if (s.reference == ReferenceKind::file && s.referenceFile.empty())
        r.problems.push_back("reference.file is required when reference.kind = file");

    SimConfig& c = s.sim;
    c.N = static_cast<int>(r.integer("sim.N"));
    c.cfl = r.number("sim.cfl");
    c.tEnd = r.number("sim.tEnd");
    c.outputStride = static_cast<int>(r.integer("sim.outputStride"));
    try {
        c.scheme = scheme_from_string(r.str("sim.scheme"));
    } catch (const ValidationError& e) {
        r.problems.insert(r.problems.end(), e.problems().begin(), e.problems().end());
    }
    c.coupling = r.boolean("sim.coupling");
    c.nonlinear = r.boolean("sim.nonlinear");
    c.lyapunovOrder = static_cast<int>(r.integer("sim.lyapunovOrder"));
    c.blowupThreshold = r.number("sim.blowup");
    c.maxSteps = r.integer("sim.maxSteps");
    c.storeSnapshots = r.boolean("sim.snapshots");

    s.certOrder = static_cast<int>(r.integer("certificate.m"));
    s.phi0 = r.number("certificate.phi0");
    s.phiL = r.auto_number("certificate.phiL");
    s.delta = r.number("certificate.delta");

    s.amplitude = r.number("datum.amplitude");
    const long seed = r.integer("datum.seed");
    if (seed < 0)
        r.problems.push_back("datum.seed must be >= 0");
    s.seed = static_cast<std::uint64_t>(seed);
    s.datumOrder = static_cast<int>(r.integer("datum.order"));

    if (r.str("reconstruct.hp") != "auto")
        s.hp = r.vec3("reconstruct.hp");
    s.poseSnapshots = static_cast<int>(r.integer("reconstruct.poseSnapshots"));
    s.renormalize = r.boolean("reconstruct.renormalize");
    s.fitWindowStart = r.auto_number("fit.windowStart");

    // collect module-level validation as well
    {
        BeamParamsd q = p;
        q.mu1 = q.mu2 = 1.0;
        const auto problems = validation_problems(q);
        for (auto& prob : problems)
            r.problems.push_back("params." + prob);
        if (problems.empty() && (!mu1 || !mu2)) {
            const auto [o1, o2] = optimal_feedback(q);
            p.mu1 = mu1.value_or(o1);
            p.mu2 = mu2.value_or(o2);
        }
        if (s.feedback == FeedbackMode::gains && problems.empty())
            for (auto& prob : validation_problems(p))
                r.problems.push_back("params." + prob);
    }
    try {
        validate(c);
    } catch (const ValidationError& e) {
        for (const auto& prob : e.problems())
            r.problems.push_back("sim." + prob);
    } catch (const CFLViolation& e) {
        r.problems.push_back(std::string("sim.cfl: ") + e.what());
    }
    if (s.certOrder != 1 && s.certOrder != 2)
        r.problems.push_back("certificate.m must be 1 or 2");
    if (!(s.phi0 > 0.0))
        r.problems.push_back("certificate.phi0 must be > 0");
    if (s.delta < 0.0)
        r.problems.push_back("certificate.delta must be >= 0");
    if (s.amplitude < 0.0)
        r.problems.push_back("datum.amplitude must be >= 0");
    if (s.datumOrder != 0 && s.datumOrder != 1)
        r.problems.push_back("datum.order must be 0 or 1");
    if (s.poseSnapshots < 0)
        r.problems.push_back("reconstruct.poseSnapshots must be >= 0");

    if (!r.problems.empty())
        throw ValidationError(std::move(r.problems));
    return s;
}

BeamMatricesd scenario_matrices(const Scenario& s)
{
    BeamParamsd p = s.params;
    if (s.feedback == FeedbackMode::optimal) {
        const auto [mu1, mu2] = optimal_feedback(p);
        p.mu1 = mu1;
        p.mu2 = mu2;
    } else if (s.feedback == FeedbackMode::transparent) {
        BeamParamsd q = p;
        q.mu1 = q.mu2 = 1.0;
        p.mu_diag = derive_matrices(q).MD();
    }
    return derive_matrices(p);
}

PrecurvedReference scenario_reference(const Scenario& s, const BeamMatricesd& m)
{
    switch (s.reference) {
    case ReferenceKind::straight:
        return straight_reference(m, s.sim.N);
    case ReferenceKind::constant: {
        const Eigen::Vector3d u = s.curvature;
        return curved_reference(m, s.sim.N, [u](double) { return u; });
    }
    case ReferenceKind::file: {
        std::ifstream in(s.referenceFile);
        if (!in)
            throw IoError("cannot open reference file '" + s.referenceFile + "'");
        PrecurvedReference ref = read_reference_csv(in, m);
        if (ref.grid.N != s.sim.N)
            throw ValidationError({"reference file has N = " + std::to_string(ref.grid.N) + " but sim.N = " +
                                   std::to_string(s.sim.N)});
        return ref;
    }
    }
    return straight_reference(m, s.sim.N);
}

double fit_window_start(const Scenario& s, const BeamMatricesd& m)
{
    if (s.fitWindowStart)
        return *s.fitWindowStart;
    return 2.0 * m.params.length / m.lambda(6);
}

} // namespace geb
