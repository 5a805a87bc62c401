#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "geb/scenario.hpp"

namespace geb {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,       // bad command line or I/O failure
    exit_validation = 2,  // invalid scenario or parameters
    exit_certificate = 3, // certificate invalid or not constructible
    exit_blowup = 4,
};

/// Maps an in-flight exception to an exit code and writes its message.
int exit_code_for_current_exception(std::ostream& log);

/// Each runner writes CSV files under `out` and returns an ExitCode.
int run_certify(const ScenarioText& text, const std::filesystem::path& out, std::ostream& log);
int run_simulate(const ScenarioText& text, const std::filesystem::path& out, std::ostream& log);
int run_reconstruct(const ScenarioText& text, const std::filesystem::path& out, std::ostream& log);
int run_dump_matrices(const ScenarioText& text, const std::filesystem::path& out, std::ostream& log);

enum class SweepAxis { mu1, mu2, amplitude, N };
SweepAxis sweep_axis_from_string(const std::string& s);

struct SweepRow
{
    double value = 0.0;
    double Ckappa = 0.0;
    bool certValid = false;
    double alpha = 0.0;
    std::string status = "ok";
    double seconds = 0.0;
};

/// Independent certify + simulate runs, one per value, on `workers` threads.
/// Rows come back in input order.
std::vector<SweepRow> sweep(const ScenarioText& text, SweepAxis axis, const std::vector<double>& values,
                            int workers);

int run_sweep(const ScenarioText& text, SweepAxis axis, const std::vector<double>& values, int workers,
              const std::filesystem::path& out, std::ostream& log);

} // namespace geb
