#include "planopt/quantity.h"
#include "planopt/instance.h"

#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <cmath>

namespace planopt {

namespace {

struct Prefix
{
    std::string_view text;
    QuantityKind kind;
};

constexpr Prefix prefixes[] = {
    {"activity", QuantityKind::Activity},
    {"receptor", QuantityKind::Receptor},
    {"emission", QuantityKind::Emission},
    {"indicator", QuantityKind::Indicator},
};

std::string_view prefix_of(QuantityKind kind)
{
    for (const auto& p : prefixes) {
        if (p.kind == kind) {
            return p.text;
        }
    }
    return {};
}

bool name_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

class Parser
{
public:
    explicit Parser(std::string_view text)
    : _text(text)
    {
    }

    [[noreturn]] void fail(std::string message) const
    {
        throw SpecSyntaxError(std::string(_text), _pos, std::move(message));
    }

    void skip_space()
    {
        while (_pos < _text.size() && std::isspace(static_cast<unsigned char>(_text[_pos]))) {
            ++_pos;
        }
    }

    bool at_end()
    {
        skip_space();
        return _pos >= _text.size();
    }

    bool accept(std::string_view token)
    {
        skip_space();
        if (_text.substr(_pos, token.size()) == token) {
            _pos += token.size();
            return true;
        }
        return false;
    }

    std::optional<double> number()
    {
        skip_space();
        const char* begin = _text.data() + _pos;
        const char* end   = _text.data() + _text.size();
        if (begin == end || !(std::isdigit(static_cast<unsigned char>(*begin)) || *begin == '.')) {
            return std::nullopt;
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc() || !std::isfinite(value)) {
            fail("invalid number");
        }
        _pos += std::size_t(ptr - begin);
        return value;
    }

    std::string_view word()
    {
        skip_space();
        const auto start = _pos;
        while (_pos < _text.size() && name_char(_text[_pos])) {
            ++_pos;
        }
        return _text.substr(start, _pos - start);
    }

    QuantityKey key()
    {
        skip_space();
        const auto start = _pos;
        const auto head  = word();
        if (head.empty()) {
            fail("expected a quantity key");
        }
        if (head == "total_cost") {
            return {QuantityKind::TotalCost, {}};
        }
        if (head == "total_outcome") {
            return {QuantityKind::TotalOutcome, {}};
        }
        for (const auto& p : prefixes) {
            if (head == p.text) {
                if (!accept(":")) {
                    fail(fmt::format("expected ':' after '{}'", head));
                }
                const auto at   = _pos;
                const auto name = word();
                if (name.empty()) {
                    _pos = at;
                    fail(fmt::format("expected a {} name", head));
                }
                return {p.kind, std::string(name)};
            }
        }
        _pos = start;
        fail(fmt::format("unknown quantity '{}' (expected total_cost, total_outcome, activity:, receptor:, emission: or "
                         "indicator:)",
                         head));
    }

    // [sign] [number '*'] key { ('+'|'-') [number '*'] key }
    Terms expression()
    {
        Terms terms;
        bool first = true;
        while (true) {
            double sign = 1.0;
            if (accept("+")) {
            } else if (accept("-")) {
                sign = -1.0;
            } else if (!first) {
                break;
            }
            double weight = 1.0;
            const auto at = _pos;
            if (auto n = number()) {
                weight = *n;
                if (!accept("*")) {
                    skip_space();
                    fail("expected '*' between weight and quantity");
                }
            } else {
                _pos = at;
            }
            add_term(terms, key(), sign * weight);
            first = false;
        }
        return terms;
    }

    double signed_number()
    {
        double sign = 1.0;
        if (accept("-")) {
            sign = -1.0;
        } else {
            accept("+");
        }
        auto n = number();
        if (!n) {
            fail("expected a number");
        }
        return sign * *n;
    }

    std::size_t position() const noexcept
    {
        return _pos;
    }

private:
    std::string_view _text;
    std::size_t _pos = 0;
};

std::string format_terms(const Terms& terms)
{
    std::string out;
    for (const auto& [key, weight] : terms) {
        if (out.empty()) {
            out += fmt::format("{}*{}", weight, key.to_string());
        } else if (weight < 0 || (weight == 0 && std::signbit(weight))) {
            out += fmt::format(" - {}*{}", -weight, key.to_string());
        } else {
            out += fmt::format(" + {}*{}", weight, key.to_string());
        }
    }
    return out;
}

}

std::string QuantityKey::to_string() const
{
    switch (kind) {
    case QuantityKind::TotalCost:
        return "total_cost";
    case QuantityKind::TotalOutcome:
        return "total_outcome";
    default:
        return fmt::format("{}:{}", prefix_of(kind), name);
    }
}

QuantityKey QuantityKey::parse(std::string_view text)
{
    if (text == "total_cost") {
        return {QuantityKind::TotalCost, {}};
    }
    if (text == "total_outcome") {
        return {QuantityKind::TotalOutcome, {}};
    }
    if (const auto colon = text.find(':'); colon != std::string_view::npos && colon + 1 < text.size()) {
        for (const auto& p : prefixes) {
            if (text.substr(0, colon) == p.text) {
                return {p.kind, std::string(text.substr(colon + 1))};
            }
        }
    }
    throw NameError(std::string(text), fmt::format("unknown quantity key '{}'", text));
}

void add_term(Terms& terms, QuantityKey key, double weight)
{
    for (auto& [k, w] : terms) {
        if (k == key) {
            w += weight;
            return;
        }
    }
    terms.emplace_back(std::move(key), weight);
}

std::string format_objective(lp::Sense sense, const Terms& terms)
{
    return fmt::format("{} {}", sense == lp::Sense::Minimize ? "min" : "max", format_terms(terms));
}

std::string format_constraint(const UserConstraint& constraint)
{
    return fmt::format("{} {} {}", format_terms(constraint.terms), lp::to_string(constraint.relation), constraint.rhs);
}

SpecSyntaxError::SpecSyntaxError(std::string text, std::size_t position, std::string message)
: ValidationError(fmt::format("{} at column {}", message, position + 1), {Violation{"", message}})
, _text(std::move(text))
, _position(position)
, _message(std::move(message))
{
}

std::string SpecSyntaxError::diagnostic() const
{
    return fmt::format("error: {}\n  {}\n  {}^", _message, _text, std::string(_position, ' '));
}

ObjectiveSpec parse_objective(std::string_view text)
{
    Parser p(text);
    ObjectiveSpec spec;
    const auto head = p.word();
    if (head == "min" || head == "minimize") {
        spec.sense = lp::Sense::Minimize;
    } else if (head == "max" || head == "maximize") {
        spec.sense = lp::Sense::Maximize;
    } else {
        Parser at_start(text);
        at_start.skip_space();
        at_start.fail("objective must start with 'min' or 'max'");
    }
    spec.terms = p.expression();
    if (!p.at_end()) {
        p.fail("unexpected trailing input");
    }
    spec.label = format_objective(spec.sense, spec.terms);
    return spec;
}

UserConstraint parse_constraint(std::string_view text)
{
    Parser p(text);
    UserConstraint c;
    c.terms = p.expression();
    if (p.accept("<=")) {
        c.relation = lp::Relation::LessEqual;
    } else if (p.accept(">=")) {
        c.relation = lp::Relation::GreaterEqual;
    } else if (p.accept("==") || p.accept("=")) {
        c.relation = lp::Relation::Equal;
    } else {
        p.skip_space();
        p.fail("expected '<=', '=' or '>='");
    }
    c.rhs = p.signed_number();
    if (!p.at_end()) {
        p.fail("unexpected trailing input");
    }
    return c;
}

void resolve_terms(const PlanInstance& instance, const Terms& terms, const std::string& field)
{
    if (terms.empty()) {
        throw NameError(field, "at least one term is required");
    }
    for (const auto& [key, weight] : terms) {
        if (!std::isfinite(weight)) {
            throw NameError(field, fmt::format("weight of {} must be finite", key.to_string()));
        }
        bool found = true;
        switch (key.kind) {
        case QuantityKind::TotalCost:
        case QuantityKind::TotalOutcome:
            break;
        case QuantityKind::Activity:
            found = instance.activity_index(key.name).has_value();
            break;
        case QuantityKind::Receptor:
            found = instance.receptor_index(key.name).has_value();
            break;
        case QuantityKind::Emission:
            found = instance.emission_index(key.name).has_value();
            break;
        case QuantityKind::Indicator:
            found = instance.indicator_index(key.name).has_value();
            break;
        }
        if (!found) {
            throw NameError(field, fmt::format("unknown {} '{}'", prefix_of(key.kind), key.name));
        }
    }
}

}
