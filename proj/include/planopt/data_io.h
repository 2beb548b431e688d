#pragma once

#include "planopt/assessment.h"
#include "planopt/pareto.h"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

// JSON documents for instances, scenarios, fronts and assessments. Every document
// carries "schema_version"; matrices are arrays of rows or {"table": "file.csv"}
// with the path relative to the document.
namespace planopt {

using Json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

/// Malformed JSON or CSV text.
class ParseError : public Error
{
public:
    using Error::Error;
};

/// Well-formed text with the wrong structure (missing field, wrong type, ...).
class SchemaError : public ValidationError
{
public:
    using ValidationError::ValidationError;
};

/// A structurally valid instance that breaks a PlanInstance invariant.
class InvariantError : public ValidationError
{
public:
    using ValidationError::ValidationError;
};

/// File missing, unreadable or unwritable.
class IoError : public Error
{
public:
    using Error::Error;
};

/// Numeric value of each qualitative label.
struct QualitativeMapping
{
    double high   = 1.0;
    double medium = 0.5;
    double low    = 0.25;
    double null   = 0.0;

    bool operator==(const QualitativeMapping&) const = default;
};

/// Parses "high=1,medium=0.5,..."; unspecified labels keep their defaults.
/// Throws SchemaError (path "mapping") on bad syntax or values.
QualitativeMapping parse_mapping(std::string_view text);

/// Violations of: every value in [0, 1], null mapped to 0.
std::vector<Violation> check_mapping(const QualitativeMapping& mapping, const std::string& path);

struct QualitativeMatrix
{
    std::vector<std::string> row_names;
    std::vector<std::string> column_names;
    std::vector<std::vector<std::string>> cells; // high | medium | low | null
};

/// Elementwise label substitution. Throws SchemaError on an unknown label or an
/// invalid mapping.
Matrix qualitative_to_coefficient(const QualitativeMatrix& matrix, const QualitativeMapping& mapping);

/// Delimited table: header row of column names, first column of row names. Cells are
/// all numbers or all qualitative labels. Throws ParseError.
struct Table
{
    std::vector<std::string> row_names;
    std::vector<std::string> column_names;
    std::vector<std::vector<std::string>> cells;
};
Table parse_table(std::string_view text, const std::string& origin);

struct LoadOptions
{
    // Overrides the document's "qualitative_mapping" when set.
    std::optional<QualitativeMapping> mapping;
    // Whether matrices may reference table files next to the document.
    bool allow_tables = true;
};

/// Throws ParseError, SchemaError or InvariantError; never returns a partial instance.
PlanInstance instance_from_json(const Json& doc, const std::filesystem::path& base_dir = {},
                                const LoadOptions& options = {});
PlanInstance parse_instance(std::string_view text, const std::filesystem::path& base_dir = {},
                            const LoadOptions& options = {});
/// Adds IoError for unreadable files.
PlanInstance load_instance(const std::filesystem::path& path, const LoadOptions& options = {});

/// Inline (all-numeric) document.
Json instance_to_json(const PlanInstance& instance);
void save_instance(const PlanInstance& instance, const std::filesystem::path& path);

Json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const Json& doc);
Json front_to_json(const ParetoFront& front);
ParetoFront front_from_json(const Json& doc);
Json assessment_to_json(const PlanInstance& instance, const AssessmentResult& result);

/// Scenario/front documents with schema_version.
Json scenario_document(const Scenario& scenario);

void write_front(const ParetoFront& front, const std::filesystem::path& path);
ParetoFront read_front(const std::filesystem::path& path);

/// Externally given plan for assessment: {"magnitudes": {id: MW}, "boiler_powers": {id: MW}}.
struct FixedPlan
{
    NamedValues magnitudes;
    NamedValues boiler_powers;
};
FixedPlan fixed_plan_from_json(const Json& doc);

/// Canonical text of a document: two-space indentation, trailing newline.
std::string dump(const Json& doc);
Json parse_json(std::string_view text, const std::string& origin);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}
