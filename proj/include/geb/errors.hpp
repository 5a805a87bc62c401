#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace geb {

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Collects every offending field instead of stopping at the first one.
class ValidationError : public Error
{
public:
    explicit ValidationError(std::vector<std::string> problems);

    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

class IoError : public Error
{
public:
    using Error::Error;
};

class WindowViolation : public Error
{
public:
    using Error::Error;
};

class CkappaDegenerate : public Error
{
public:
    using Error::Error;
};

class CFLViolation : public Error
{
public:
    using Error::Error;
};

class BlowupDetected : public Error
{
public:
    BlowupDetected(double time, double magnitude);

    double time() const { return time_; }

private:
    double time_;
};

class NonPositiveValues : public Error
{
public:
    using Error::Error;
};

class NonFiniteCurvature : public Error
{
public:
    using Error::Error;
};

class ZeroQuaternion : public Error
{
public:
    using Error::Error;
};

class NotARotation : public Error
{
public:
    using Error::Error;
};

class NonUnitInput : public Error
{
public:
    using Error::Error;
};

class EndpointMismatch : public Error
{
public:
    using Error::Error;
};

} // namespace geb
