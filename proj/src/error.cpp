#include "planopt/error.h"

namespace planopt {

std::string format_violations(const std::vector<Violation>& violations)
{
    std::string result;
    for (const auto& v : violations) {
        if (!result.empty()) {
            result += '\n';
        }
        if (!v.path.empty()) {
            result += v.path;
            result += ": ";
        }
        result += v.message;
    }
    return result;
}

ValidationError::ValidationError(std::string what, std::vector<Violation> violations)
: Error(what.empty() ? format_violations(violations) : what)
, _violations(std::move(violations))
{
}

NameError::NameError(std::string path, const std::string& message)
: ValidationError(message, {Violation{std::move(path), message}})
{
}

}
