#pragma once

#include "planopt/error.h"
#include "planopt/lp.h"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace planopt {

struct PlanInstance;

/// The closed set of plan quantities objectives and constraints may refer to.
enum class QuantityKind
{
    TotalCost,    // total_cost
    TotalOutcome, // total_outcome
    Activity,     // activity:<id>
    Receptor,     // receptor:<name>
    Emission,     // emission:<name>
    Indicator,    // indicator:<name>, worst case
};

struct QuantityKey
{
    QuantityKind kind = QuantityKind::TotalCost;
    std::string name;

    std::string to_string() const;

    /// Parses "total_cost", "receptor:air_quality", ... Throws NameError on an
    /// unknown prefix.
    static QuantityKey parse(std::string_view text);

    bool operator==(const QuantityKey&) const = default;
};

/// Weighted quantities in first-appearance order; repeated keys are merged.
using Terms = std::vector<std::pair<QuantityKey, double>>;

void add_term(Terms& terms, QuantityKey key, double weight);

struct ObjectiveSpec
{
    Terms terms;
    lp::Sense sense = lp::Sense::Minimize;
    std::string label;

    bool operator==(const ObjectiveSpec&) const = default;
};

struct UserConstraint
{
    Terms terms;
    lp::Relation relation = lp::Relation::LessEqual;
    double rhs            = 0.0;

    bool operator==(const UserConstraint&) const = default;
};

/// Canonical text, e.g. "min 1*total_cost + 0.5*receptor:air_quality". Doubles as
/// the default objective label.
std::string format_objective(lp::Sense sense, const Terms& terms);
std::string format_constraint(const UserConstraint& constraint);

/// Syntax error in an objective/constraint expression, with the offending column.
class SpecSyntaxError : public ValidationError
{
public:
    SpecSyntaxError(std::string text, std::size_t position, std::string message);

    std::size_t position() const noexcept
    {
        return _position;
    }

    /// The expression, a caret under the error column and the message.
    std::string diagnostic() const;

private:
    std::string _text;
    std::size_t _position;
    std::string _message;
};

/// `min|max k1*key1 + k2*key2 ...`; a bare key has weight 1.
ObjectiveSpec parse_objective(std::string_view text);

/// `k1*key1 + ... <=|=|>= rhs`.
UserConstraint parse_constraint(std::string_view text);

/// Throws NameError (path `field`) when a key does not resolve against `instance`;
/// an empty term list is rejected too.
void resolve_terms(const PlanInstance& instance, const Terms& terms, const std::string& field);

}
