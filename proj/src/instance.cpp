#include "planopt/instance.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace planopt {

std::string_view to_string(ActivityKind kind) noexcept
{
    return kind == ActivityKind::Primary ? "primary" : "secondary";
}

std::optional<double> lookup(const NamedValues& values, std::string_view name)
{
    for (const auto& [n, v] : values) {
        if (n == name) {
            return v;
        }
    }
    return std::nullopt;
}

IndicatorFactors factors_from_members(const std::vector<double>& members)
{
    if (members.empty()) {
        return {};
    }
    const auto [lo, hi] = std::minmax_element(members.begin(), members.end());
    const double mean   = std::accumulate(members.begin(), members.end(), 0.0) / double(members.size());
    return IndicatorFactors{*lo, mean, *hi};
}

const IndicatorFactors* IndicatorTable::find(std::string_view emission) const
{
    for (const auto& [name, factors] : rows) {
        if (name == emission) {
            return &factors;
        }
    }
    return nullptr;
}

std::vector<std::size_t> PlanInstance::primaries() const
{
    std::vector<std::size_t> result;
    for (std::size_t i = 0; i < activities.size(); ++i) {
        if (activities[i].kind == ActivityKind::Primary) {
            result.push_back(i);
        }
    }
    return result;
}

std::vector<std::size_t> PlanInstance::secondaries() const
{
    std::vector<std::size_t> result;
    for (std::size_t i = 0; i < activities.size(); ++i) {
        if (activities[i].kind == ActivityKind::Secondary) {
            result.push_back(i);
        }
    }
    return result;
}

template <typename Range, typename Key>
static std::optional<std::size_t> index_of(const Range& range, std::string_view name, Key key)
{
    for (std::size_t i = 0; i < range.size(); ++i) {
        if (key(range[i]) == name) {
            return i;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> PlanInstance::activity_index(std::string_view id) const
{
    return index_of(activities, id, [](const Activity& a) -> const std::string& { return a.id; });
}

std::optional<std::size_t> PlanInstance::pressure_index(std::string_view n) const
{
    return index_of(pressure_names, n, [](const std::string& s) -> const std::string& { return s; });
}

std::optional<std::size_t> PlanInstance::receptor_index(std::string_view n) const
{
    return index_of(receptor_names, n, [](const std::string& s) -> const std::string& { return s; });
}

std::optional<std::size_t> PlanInstance::emission_index(std::string_view n) const
{
    return index_of(emission_names, n, [](const std::string& s) -> const std::string& { return s; });
}

std::optional<std::size_t> PlanInstance::boiler_index(std::string_view id) const
{
    return index_of(boilers, id, [](const BoilerType& b) -> const std::string& { return b.id; });
}

std::optional<std::size_t> PlanInstance::indicator_index(std::string_view n) const
{
    return index_of(indicator_tables, n, [](const IndicatorTable& t) -> const std::string& { return t.name; });
}

bool PlanInstance::decommissionable(std::size_t activity) const
{
    const auto& a = activities[activity];
    return a.kind == ActivityKind::Primary && a.lower < 0.0;
}

bool PlanInstance::has_boilers(std::size_t activity) const
{
    if (activity >= moc.rows()) {
        return false;
    }
    for (std::size_t k = 0; k < moc.cols(); ++k) {
        if (moc(activity, k) != 0.0) {
            return true;
        }
    }
    return false;
}

namespace {

class Checker
{
public:
    explicit Checker(ValidationReport& report)
    : _report(report)
    {
    }

    void error(std::string path, std::string message)
    {
        _report.errors.push_back({std::move(path), std::move(message)});
    }

    void warning(std::string path, std::string message)
    {
        _report.warnings.push_back({std::move(path), std::move(message)});
    }

    bool shape(const Matrix& m, std::string_view field, std::size_t rows, std::size_t cols)
    {
        if (m.rows() != rows || m.cols() != cols) {
            error(std::string(field), fmt::format("expected a {}x{} matrix, got {}x{}", rows, cols, m.rows(), m.cols()));
            return false;
        }
        return true;
    }

    template <typename Pred>
    void entries(const Matrix& m, std::string_view field, Pred ok, std::string_view requirement)
    {
        for (std::size_t r = 0; r < m.rows(); ++r) {
            for (std::size_t c = 0; c < m.cols(); ++c) {
                if (!ok(m(r, c))) {
                    error(fmt::format("{}[{}][{}]", field, r, c), fmt::format("value {} must be {}", m(r, c), requirement));
                }
            }
        }
    }

    void unique(const std::vector<std::string>& names, std::string_view field)
    {
        std::set<std::string> seen;
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i].empty()) {
                error(fmt::format("{}[{}]", field, i), "name must not be empty");
            } else if (!seen.insert(names[i]).second) {
                error(fmt::format("{}[{}]", field, i), fmt::format("duplicate name {}", names[i]));
            }
        }
    }

private:
    ValidationReport& _report;
};

bool finite(double v)
{
    return std::isfinite(v);
}

}

ValidationReport validate(const PlanInstance& instance)
{
    ValidationReport report;
    Checker check(report);

    const auto primaries   = instance.primaries();
    const auto secondaries = instance.secondaries();
    const auto nact        = instance.activities.size();

    std::vector<std::string> ids;
    for (std::size_t i = 0; i < nact; ++i) {
        const auto& a   = instance.activities[i];
        const auto path = fmt::format("activities[{}]", i);
        ids.push_back(a.id);
        if (!finite(a.lower)) {
            check.error(path + ".lower", "must be finite");
        }
        if (!finite(a.upper)) {
            check.error(path + ".upper", "must be finite");
        }
        if (a.lower > a.upper) {
            check.error(path + ".lower", fmt::format("lower bound {} exceeds upper bound {}", a.lower, a.upper));
        }
        if (a.kind == ActivityKind::Secondary && a.lower < 0.0) {
            check.error(path + ".lower", "secondary activities cannot be decommissioned (lower must be >= 0)");
        }
        if (!finite(a.unit_cost)) {
            check.error(path + ".unit_cost", "must be finite");
        }
        if (!finite(a.unit_outcome)) {
            check.error(path + ".unit_outcome", "must be finite");
        }
    }
    check.unique(ids, "activities");
    check.unique(instance.pressure_names, "pressure_names");
    check.unique(instance.receptor_names, "receptor_names");
    check.unique(instance.emission_names, "emission_names");
    std::vector<std::string> boiler_ids;
    for (const auto& b : instance.boilers) {
        boiler_ids.push_back(b.id);
    }
    check.unique(boiler_ids, "boilers");

    if (!finite(instance.budget)) {
        check.error("budget", "must be finite");
    }
    if (!finite(instance.min_outcome)) {
        check.error("min_outcome", "must be finite");
    }
    if (!(instance.efficiency > 0.0 && instance.efficiency <= 1.0)) {
        check.error("efficiency", fmt::format("value {} must lie in (0, 1]", instance.efficiency));
    }
    if (!(instance.hours_per_year > 0.0 && instance.hours_per_year <= 8784.0)) {
        check.error("hours_per_year", fmt::format("value {} must lie in (0, 8784]", instance.hours_per_year));
    }

    auto nonnegative = [](double v) { return finite(v) && v >= 0.0; };
    auto unit        = [](double v) { return finite(v) && v >= 0.0 && v <= 1.0; };
    auto zero_one    = [](double v) { return v == 0.0 || v == 1.0; };

    if (check.shape(instance.dep_plus, "dep_plus", primaries.size(), secondaries.size())) {
        check.entries(instance.dep_plus, "dep_plus", nonnegative, ">= 0");
    }
    if (check.shape(instance.dep_minus, "dep_minus", primaries.size(), secondaries.size())) {
        check.entries(instance.dep_minus, "dep_minus", nonnegative, ">= 0");
    }
    if (check.shape(instance.mop, "mop", nact, instance.pressure_names.size())) {
        check.entries(instance.mop, "mop", unit, "in [0, 1]");
    }
    if (check.shape(instance.mpr, "mpr", instance.pressure_names.size(), instance.receptor_names.size())) {
        check.entries(instance.mpr, "mpr", unit, "in [0, 1]");
    }
    const bool moc_ok = check.shape(instance.moc, "moc", nact, instance.boilers.size());
    if (moc_ok) {
        check.entries(instance.moc, "moc", zero_one, "0 or 1");
    }
    if (check.shape(instance.mec, "mec", instance.emission_names.size(), instance.boilers.size())) {
        check.entries(instance.mec, "mec", nonnegative, ">= 0");
    }

    if (moc_ok) {
        for (std::size_t i = 0; i < nact; ++i) {
            if (instance.has_boilers(i) && instance.activities[i].lower < 0.0) {
                check.error(fmt::format("activities[{}].lower", i),
                            "an activity with boiler rows cannot be decommissioned (negative lower bound)");
            }
        }
    }

    std::set<std::string> table_names;
    for (std::size_t t = 0; t < instance.indicator_tables.size(); ++t) {
        const auto& table = instance.indicator_tables[t];
        const auto path   = fmt::format("indicator_tables.{}", table.name);
        if (table.name.empty()) {
            check.error(fmt::format("indicator_tables[{}]", t), "name must not be empty");
        } else if (!table_names.insert(table.name).second) {
            check.error(path, "duplicate indicator name");
        }
        std::set<std::string> seen;
        for (const auto& [emission, f] : table.rows) {
            const auto row_path = fmt::format("{}.{}", path, emission);
            if (!instance.emission_index(emission)) {
                check.error(row_path, fmt::format("unknown emission {}", emission));
            }
            if (!seen.insert(emission).second) {
                check.error(row_path, "duplicate factor row");
            }
            if (!finite(f.best) || !finite(f.average) || !finite(f.worst)) {
                check.error(row_path, "factors must be finite");
            } else if (!(f.best <= f.average && f.average <= f.worst)) {
                check.error(row_path, fmt::format("factors must satisfy best <= average <= worst (got {}, {}, {})", f.best,
                                                  f.average, f.worst));
            }
        }
        for (const auto& emission : instance.emission_names) {
            if (!table.find(emission)) {
                check.warning(fmt::format("{}.{}", path, emission), "missing factor row; contributes 0 to every case");
            }
        }
    }

    for (const auto& [emission, group] : instance.emission_groups) {
        if (!instance.emission_index(emission)) {
            check.error(fmt::format("emission_groups.{}", emission), fmt::format("unknown emission {}", emission));
        }
    }
    return report;
}

}
