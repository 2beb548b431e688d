#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace planopt {

/// A single problem found while checking user input. `path` names the offending
/// field ("activities[2].lower", "efficiency", ...) and may be empty.
struct Violation
{
    std::string path;
    std::string message;

    bool operator==(const Violation&) const = default;
};

std::string format_violations(const std::vector<Violation>& violations);

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Input rejected with one or more field-level violations.
class ValidationError : public Error
{
public:
    ValidationError(std::string what, std::vector<Violation> violations);

    const std::vector<Violation>& violations() const noexcept
    {
        return _violations;
    }

private:
    std::vector<Violation> _violations;
};

/// A quantity, activity or indicator name that does not resolve against the instance.
class NameError : public ValidationError
{
public:
    NameError(std::string path, const std::string& message);
};

class DimensionError : public Error
{
public:
    using Error::Error;
};

/// Wall-clock deadline exceeded while solving.
class TimeoutError : public Error
{
public:
    using Error::Error;
};

}
