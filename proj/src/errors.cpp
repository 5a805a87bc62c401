#include "geb/errors.hpp"

#include <sstream>

namespace geb {

namespace {

std::string join_problems(const std::vector<std::string>& problems)
{
    std::ostringstream os;
    os << "invalid input:";
    for (const auto& p : problems)
        os << "\n  - " << p;
    return os.str();
}

} // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : Error(join_problems(problems)), problems_(std::move(problems))
{
}

BlowupDetected::BlowupDetected(double time, double magnitude)
    : Error("blow-up detected at t = " + std::to_string(time) + " (|r| = " + std::to_string(magnitude) + ")"),
      time_(time)
{
}

} // namespace geb
