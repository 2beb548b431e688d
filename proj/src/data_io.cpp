#include "planopt/data_io.h"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace planopt {

namespace fs = std::filesystem;

namespace {

std::string join(const std::string& path, std::string_view key)
{
    return path.empty() ? std::string(key) : fmt::format("{}.{}", path, key);
}

std::string at(const std::string& path, std::size_t index)
{
    return fmt::format("{}[{}]", path, index);
}

std::string lower_case(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string type_name(const Json& j)
{
    return j.type_name();
}

// JSON has no -0; keep documents free of it.
double clean(double x)
{
    return x == 0.0 ? 0.0 : x;
}

std::optional<double> label_value(std::string_view label, const QualitativeMapping& m)
{
    const auto l = lower_case(label);
    if (l == "high") {
        return m.high;
    }
    if (l == "medium") {
        return m.medium;
    }
    if (l == "low") {
        return m.low;
    }
    if (l == "null") {
        return m.null;
    }
    return std::nullopt;
}

std::optional<double> parse_real(std::string_view text)
{
    const auto t = trim(text);
    if (t.empty()) {
        return std::nullopt;
    }
    const char* b = t.data();
    if (*b == '+') {
        ++b;
    }
    double v       = 0.0;
    auto [ptr, ec] = std::from_chars(b, t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

// Collects structural violations while walking a document.
class Reader
{
public:
    std::vector<Violation> errors;

    void error(std::string path, std::string message)
    {
        errors.push_back({std::move(path), std::move(message)});
    }

    void check_keys(const Json& obj, const std::string& path, std::initializer_list<std::string_view> allowed)
    {
        for (const auto& [key, value] : obj.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                error(join(path, key), "unknown field");
            }
        }
    }

    const Json* field(const Json& obj, std::string_view key, const std::string& path, bool required)
    {
        const auto it = obj.find(std::string(key));
        if (it == obj.end()) {
            if (required) {
                error(join(path, key), "required field is missing");
            }
            return nullptr;
        }
        return &*it;
    }

    double number(const Json& j, const std::string& path)
    {
        if (!j.is_number()) {
            error(path, fmt::format("expected a number, got {}", type_name(j)));
            return 0.0;
        }
        const double v = j.get<double>();
        if (!std::isfinite(v)) {
            error(path, "expected a finite number");
        }
        return v;
    }

    double number(const Json& obj, std::string_view key, const std::string& path, double fallback, bool required)
    {
        const auto* j = field(obj, key, path, required);
        return j ? number(*j, join(path, key)) : fallback;
    }

    std::string text(const Json& j, const std::string& path)
    {
        if (!j.is_string()) {
            error(path, fmt::format("expected a string, got {}", type_name(j)));
            return {};
        }
        return j.get<std::string>();
    }

    std::string text(const Json& obj, std::string_view key, const std::string& path, bool required)
    {
        const auto* j = field(obj, key, path, required);
        return j ? text(*j, join(path, key)) : std::string{};
    }

    bool object(const Json& j, const std::string& path)
    {
        if (!j.is_object()) {
            error(path, fmt::format("expected an object, got {}", type_name(j)));
            return false;
        }
        return true;
    }

    bool array(const Json& j, const std::string& path)
    {
        if (!j.is_array()) {
            error(path, fmt::format("expected an array, got {}", type_name(j)));
            return false;
        }
        return true;
    }

    std::vector<std::string> names(const Json& obj, std::string_view key, const std::string& path)
    {
        std::vector<std::string> out;
        const auto* j = field(obj, key, path, false);
        if (!j || !array(*j, join(path, key))) {
            return out;
        }
        for (std::size_t i = 0; i < j->size(); ++i) {
            out.push_back(text((*j)[i], at(join(path, key), i)));
        }
        return out;
    }

    NamedValues named_values(const Json& obj, std::string_view key, const std::string& path, bool required)
    {
        NamedValues out;
        const auto* j = field(obj, key, path, required);
        if (!j || !object(*j, join(path, key))) {
            return out;
        }
        for (const auto& [name, value] : j->items()) {
            out.emplace_back(name, number(value, join(join(path, key), name)));
        }
        return out;
    }

    std::vector<double> numbers(const Json& obj, std::string_view key, const std::string& path)
    {
        std::vector<double> out;
        const auto* j = field(obj, key, path, true);
        if (!j || !array(*j, join(path, key))) {
            return out;
        }
        for (std::size_t i = 0; i < j->size(); ++i) {
            out.push_back(number((*j)[i], at(join(path, key), i)));
        }
        return out;
    }

    IndicatorFactors factors(const Json& j, const std::string& path)
    {
        IndicatorFactors f;
        if (!object(j, path)) {
            return f;
        }
        if (j.contains("members")) {
            check_keys(j, path, {"members"});
            const auto members = numbers(j, "members", path);
            if (members.empty()) {
                error(join(path, "members"), "at least one member factor is required");
                return f;
            }
            return factors_from_members(members);
        }
        check_keys(j, path, {"best", "average", "worst"});
        f.best    = number(j, "best", path, 0.0, true);
        f.average = number(j, "average", path, 0.0, true);
        f.worst   = number(j, "worst", path, 0.0, true);
        return f;
    }
};

void throw_if(Reader& r)
{
    if (!r.errors.empty()) {
        throw SchemaError({}, std::move(r.errors));
    }
}

void check_version(Reader& r, const Json& doc)
{
    const auto* v = r.field(doc, "schema_version", "", true);
    if (v && (!v->is_number_integer() || v->get<long long>() != schema_version)) {
        r.error("schema_version", fmt::format("unsupported schema version {} (expected {})", v->dump(), schema_version));
    }
}

struct MatrixContext
{
    const fs::path& base_dir;
    const QualitativeMapping& mapping;
    Reader& reader;
    bool allow_tables;
};

// Places table rows/columns by name onto the expected order.
Matrix matrix_from_table(const Table& table, const std::string& path, const std::vector<std::string>& rows,
                         const std::vector<std::string>& cols, bool qualitative, MatrixContext& ctx)
{
    Matrix m(rows.size(), cols.size());
    auto place = [&](const std::vector<std::string>& given, const std::vector<std::string>& expected,
                     std::string_view what) -> std::optional<std::vector<std::size_t>> {
        std::vector<std::size_t> where;
        std::set<std::string> seen;
        for (const auto& name : given) {
            const auto it = std::find(expected.begin(), expected.end(), name);
            if (it == expected.end()) {
                ctx.reader.error(path, fmt::format("table {} '{}' is not a known name", what, name));
                return std::nullopt;
            }
            if (!seen.insert(name).second) {
                ctx.reader.error(path, fmt::format("table {} '{}' appears twice", what, name));
                return std::nullopt;
            }
            where.push_back(std::size_t(it - expected.begin()));
        }
        if (given.size() != expected.size()) {
            ctx.reader.error(path, fmt::format("table has {} {}s, expected {}", given.size(), what, expected.size()));
            return std::nullopt;
        }
        return where;
    };
    const auto r = place(table.row_names, rows, "row");
    const auto c = place(table.column_names, cols, "column");
    if (!r || !c) {
        return m;
    }
    bool any_label = false, any_number = false;
    for (std::size_t i = 0; i < table.cells.size(); ++i) {
        for (std::size_t j = 0; j < table.cells[i].size(); ++j) {
            const auto& cell = table.cells[i][j];
            const auto cell_path = fmt::format("{}[{}][{}]", path, table.row_names[i], table.column_names[j]);
            if (auto v = parse_real(cell)) {
                any_number     = true;
                m((*r)[i], (*c)[j]) = *v;
            } else if (auto l = label_value(cell, ctx.mapping); l && qualitative) {
                any_label      = true;
                m((*r)[i], (*c)[j]) = *l;
            } else {
                ctx.reader.error(cell_path, fmt::format("invalid cell '{}'", cell));
            }
        }
    }
    if (any_label && any_number) {
        ctx.reader.error(path, "table mixes numbers and qualitative labels");
    }
    return m;
}

Matrix read_matrix(const Json& doc, std::string_view key, const std::vector<std::string>& rows,
                   const std::vector<std::string>& cols, bool qualitative, MatrixContext& ctx)
{
    auto& r         = ctx.reader;
    const auto path = std::string(key);
    const auto* j   = r.field(doc, key, "", false);
    if (!j) {
        return Matrix(rows.size(), cols.size());
    }
    if (j->is_object()) {
        r.check_keys(*j, path, {"table"});
        const auto file = r.text(*j, "table", path, true);
        if (!ctx.allow_tables) {
            r.error(path, "table references are not allowed here; give the matrix inline");
            return Matrix(rows.size(), cols.size());
        }
        if (file.empty()) {
            return Matrix(rows.size(), cols.size());
        }
        const auto full = ctx.base_dir / file;
        const auto table = parse_table(read_file(full), full.string());
        return matrix_from_table(table, join(path, "table"), rows, cols, qualitative, ctx);
    }
    if (!r.array(*j, path)) {
        return Matrix(rows.size(), cols.size());
    }
    if (j->size() != rows.size()) {
        r.error(path, fmt::format("expected {} rows, got {}", rows.size(), j->size()));
        return Matrix(rows.size(), cols.size());
    }
    Matrix m(rows.size(), cols.size());
    bool any_label = false, any_number = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row      = (*j)[i];
        const auto row_path  = at(path, i);
        if (!r.array(row, row_path)) {
            continue;
        }
        if (row.size() != cols.size()) {
            r.error(row_path, fmt::format("expected {} columns, got {}", cols.size(), row.size()));
            continue;
        }
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const auto& cell      = row[c];
            const auto cell_path  = at(row_path, c);
            if (cell.is_string() && qualitative) {
                if (auto v = label_value(cell.get<std::string>(), ctx.mapping)) {
                    any_label = true;
                    m(i, c)   = *v;
                } else {
                    r.error(cell_path, fmt::format("unknown qualitative label '{}'", cell.get<std::string>()));
                }
            } else {
                any_number = true;
                m(i, c)    = r.number(cell, cell_path);
            }
        }
    }
    if (any_label && any_number) {
        r.error(path, "matrix mixes numbers and qualitative labels");
    }
    return m;
}

Json named(const NamedValues& values)
{
    Json j = Json::object();
    for (const auto& [name, v] : values) {
        j[name] = clean(v);
    }
    return j;
}

Json triple(const IndicatorFactors& f)
{
    return Json{{"best", clean(f.best)}, {"average", clean(f.average)}, {"worst", clean(f.worst)}};
}

Json matrix_json(const Matrix& m)
{
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) {
            row.push_back(clean(m(i, j)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Json numbers_json(const std::vector<double>& v)
{
    Json j = Json::array();
    for (double x : v) {
        j.push_back(clean(x));
    }
    return j;
}

Json strings_json(const std::vector<std::string>& v)
{
    Json j = Json::array();
    for (const auto& s : v) {
        j.push_back(s);
    }
    return j;
}

Scenario read_scenario(Reader& r, const Json& j, const std::string& path)
{
    Scenario s;
    if (!r.object(j, path)) {
        return s;
    }
    r.check_keys(j, path,
                 {"schema_version", "kind", "magnitudes", "positive_parts", "pressures", "receptors", "boiler_powers",
                  "emissions", "indicators", "total_cost", "total_outcome", "objective_values", "activity_costs",
                  "activity_outcomes"});
    const auto kind = r.text(j, "kind", path, true);
    if (kind == "boundary") {
        s.kind = ScenarioKind::Boundary;
    } else if (kind == "intermediate") {
        s.kind = ScenarioKind::Intermediate;
    } else if (!kind.empty()) {
        r.error(join(path, "kind"), fmt::format("expected 'boundary' or 'intermediate', got '{}'", kind));
    }
    s.magnitudes        = r.named_values(j, "magnitudes", path, true);
    s.positive_parts    = r.named_values(j, "positive_parts", path, true);
    s.pressures         = r.named_values(j, "pressures", path, true);
    s.receptors         = r.named_values(j, "receptors", path, true);
    s.boiler_powers     = r.named_values(j, "boiler_powers", path, true);
    s.emissions         = r.named_values(j, "emissions", path, true);
    s.total_cost        = r.number(j, "total_cost", path, 0.0, true);
    s.total_outcome     = r.number(j, "total_outcome", path, 0.0, true);
    s.objective_values  = r.named_values(j, "objective_values", path, true);
    s.activity_costs    = r.named_values(j, "activity_costs", path, true);
    s.activity_outcomes = r.named_values(j, "activity_outcomes", path, true);
    if (const auto* ind = r.field(j, "indicators", path, true); ind && r.object(*ind, join(path, "indicators"))) {
        for (const auto& [name, value] : ind->items()) {
            s.indicators.emplace_back(name, r.factors(value, join(join(path, "indicators"), name)));
        }
    }
    return s;
}

}

QualitativeMapping parse_mapping(std::string_view text)
{
    QualitativeMapping m;
    std::vector<Violation> errors;
    std::stringstream in{std::string(text)};
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto eq = item.find('=');
        const auto label = lower_case(trim(item.substr(0, eq)));
        const auto value = eq == std::string::npos ? std::nullopt : parse_real(item.substr(eq + 1));
        double* slot = label == "high" ? &m.high : label == "medium" ? &m.medium : label == "low" ? &m.low
                     : label == "null" ? &m.null : nullptr;
        if (!slot || !value) {
            errors.push_back({"mapping", fmt::format("expected label=value with a label among high, medium, low, null; "
                                                     "got '{}'",
                                                     trim(item))});
            continue;
        }
        *slot = *value;
    }
    auto more = check_mapping(m, "mapping");
    errors.insert(errors.end(), more.begin(), more.end());
    if (!errors.empty()) {
        throw SchemaError({}, std::move(errors));
    }
    return m;
}

std::vector<Violation> check_mapping(const QualitativeMapping& m, const std::string& path)
{
    std::vector<Violation> out;
    const std::pair<const char*, double> entries[] = {{"high", m.high}, {"medium", m.medium}, {"low", m.low}, {"null", m.null}};
    for (const auto& [label, v] : entries) {
        if (!(v >= 0.0 && v <= 1.0)) {
            out.push_back({join(path, label), fmt::format("value {} must lie in [0, 1]", v)});
        }
    }
    if (m.null != 0.0) {
        out.push_back({join(path, "null"), "null must map to 0"});
    }
    return out;
}

Matrix qualitative_to_coefficient(const QualitativeMatrix& matrix, const QualitativeMapping& mapping)
{
    auto errors = check_mapping(mapping, "mapping");
    Matrix m(matrix.row_names.size(), matrix.column_names.size());
    if (matrix.cells.size() != m.rows()) {
        errors.push_back({"cells", fmt::format("expected {} rows, got {}", m.rows(), matrix.cells.size())});
    }
    for (std::size_t i = 0; i < std::min(m.rows(), matrix.cells.size()); ++i) {
        if (matrix.cells[i].size() != m.cols()) {
            errors.push_back({at("cells", i), fmt::format("expected {} columns, got {}", m.cols(), matrix.cells[i].size())});
            continue;
        }
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (auto v = label_value(matrix.cells[i][j], mapping)) {
                m(i, j) = *v;
            } else {
                errors.push_back({fmt::format("cells[{}][{}]", i, j),
                                  fmt::format("unknown qualitative label '{}'", matrix.cells[i][j])});
            }
        }
    }
    if (!errors.empty()) {
        throw SchemaError({}, std::move(errors));
    }
    return m;
}

Table parse_table(std::string_view text, const std::string& origin)
{
    auto split = [&](const std::string& line, std::size_t number) {
        std::vector<std::string> cells;
        std::string cell;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    cell += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                cells.push_back(trim(cell));
                cell.clear();
            } else {
                cell += c;
            }
        }
        if (quoted) {
            throw ParseError(fmt::format("{}:{}: unterminated quote", origin, number));
        }
        cells.push_back(trim(cell));
        return cells;
    };

    Table t;
    std::stringstream in{std::string(text)};
    std::string line;
    std::size_t number = 0;
    bool header        = true;
    while (std::getline(in, line)) {
        ++number;
        if (trim(line).empty()) {
            continue;
        }
        auto cells = split(line, number);
        if (header) {
            t.column_names.assign(cells.begin() + 1, cells.end());
            header = false;
            continue;
        }
        if (cells.size() != t.column_names.size() + 1) {
            throw ParseError(fmt::format("{}:{}: expected {} cells, got {}", origin, number, t.column_names.size() + 1,
                                         cells.size()));
        }
        t.row_names.push_back(cells[0]);
        t.cells.emplace_back(cells.begin() + 1, cells.end());
    }
    if (header) {
        throw ParseError(fmt::format("{}: empty table", origin));
    }
    return t;
}

PlanInstance instance_from_json(const Json& doc, const fs::path& base_dir, const LoadOptions& options)
{
    Reader r;
    if (!doc.is_object()) {
        throw SchemaError({}, {{"", fmt::format("expected an object, got {}", type_name(doc))}});
    }
    r.check_keys(doc, "",
                 {"schema_version", "name", "activities", "budget", "min_outcome", "dep_plus", "dep_minus", "mop", "mpr",
                  "pressure_names", "receptor_names", "boilers", "moc", "mec", "emission_names", "indicator_tables",
                  "hours_per_year", "efficiency", "emission_groups", "qualitative_mapping"});
    check_version(r, doc);

    PlanInstance in;
    in.name           = r.text(doc, "name", "", false);
    in.budget         = r.number(doc, "budget", "", 0.0, true);
    in.min_outcome    = r.number(doc, "min_outcome", "", 0.0, true);
    in.hours_per_year = r.number(doc, "hours_per_year", "", 0.0, true);
    in.efficiency     = r.number(doc, "efficiency", "", 0.0, true);

    if (const auto* acts = r.field(doc, "activities", "", true); acts && r.array(*acts, "activities")) {
        for (std::size_t i = 0; i < acts->size(); ++i) {
            const auto& a   = (*acts)[i];
            const auto path = at("activities", i);
            if (!r.object(a, path)) {
                continue;
            }
            r.check_keys(a, path, {"id", "name", "kind", "lower", "upper", "unit_cost", "unit_outcome"});
            Activity act;
            act.id   = r.text(a, "id", path, true);
            act.name = r.text(a, "name", path, false);
            if (act.name.empty()) {
                act.name = act.id;
            }
            const auto kind = r.text(a, "kind", path, true);
            if (kind == "primary") {
                act.kind = ActivityKind::Primary;
            } else if (kind == "secondary") {
                act.kind = ActivityKind::Secondary;
            } else if (!kind.empty()) {
                r.error(join(path, "kind"), fmt::format("expected 'primary' or 'secondary', got '{}'", kind));
            }
            act.lower        = r.number(a, "lower", path, 0.0, true);
            act.upper        = r.number(a, "upper", path, 0.0, true);
            act.unit_cost    = r.number(a, "unit_cost", path, 0.0, true);
            act.unit_outcome = r.number(a, "unit_outcome", path, 0.0, true);
            in.activities.push_back(std::move(act));
        }
    }
    in.pressure_names = r.names(doc, "pressure_names", "");
    in.receptor_names = r.names(doc, "receptor_names", "");
    in.emission_names = r.names(doc, "emission_names", "");
    if (const auto* boilers = r.field(doc, "boilers", "", false); boilers && r.array(*boilers, "boilers")) {
        for (std::size_t k = 0; k < boilers->size(); ++k) {
            const auto& b   = (*boilers)[k];
            const auto path = at("boilers", k);
            if (!r.object(b, path)) {
                continue;
            }
            r.check_keys(b, path, {"id", "name"});
            BoilerType boiler{r.text(b, "id", path, true), r.text(b, "name", path, false)};
            if (boiler.name.empty()) {
                boiler.name = boiler.id;
            }
            in.boilers.push_back(std::move(boiler));
        }
    }
    if (const auto* tables = r.field(doc, "indicator_tables", "", false); tables && r.array(*tables, "indicator_tables")) {
        for (std::size_t t = 0; t < tables->size(); ++t) {
            const auto& tj  = (*tables)[t];
            const auto path = at("indicator_tables", t);
            if (!r.object(tj, path)) {
                continue;
            }
            r.check_keys(tj, path, {"name", "rows"});
            IndicatorTable table{r.text(tj, "name", path, true), {}};
            if (const auto* rows = r.field(tj, "rows", path, true); rows && r.object(*rows, join(path, "rows"))) {
                for (const auto& [emission, f] : rows->items()) {
                    table.rows.emplace_back(emission, r.factors(f, join(join(path, "rows"), emission)));
                }
            }
            in.indicator_tables.push_back(std::move(table));
        }
    }
    if (const auto* groups = r.field(doc, "emission_groups", "", false); groups && r.object(*groups, "emission_groups")) {
        for (const auto& [emission, group] : groups->items()) {
            in.emission_groups.emplace_back(emission, r.text(group, join("emission_groups", emission)));
        }
    }

    QualitativeMapping mapping;
    if (const auto* mj = r.field(doc, "qualitative_mapping", "", false); mj && r.object(*mj, "qualitative_mapping")) {
        r.check_keys(*mj, "qualitative_mapping", {"high", "medium", "low", "null"});
        mapping.high   = r.number(*mj, "high", "qualitative_mapping", mapping.high, false);
        mapping.medium = r.number(*mj, "medium", "qualitative_mapping", mapping.medium, false);
        mapping.low    = r.number(*mj, "low", "qualitative_mapping", mapping.low, false);
        mapping.null   = r.number(*mj, "null", "qualitative_mapping", mapping.null, false);
        for (auto& v : check_mapping(mapping, "qualitative_mapping")) {
            r.errors.push_back(std::move(v));
        }
    }
    if (options.mapping) {
        mapping = *options.mapping;
        for (auto& v : check_mapping(mapping, "mapping")) {
            r.errors.push_back(std::move(v));
        }
    }
    // Matrix shapes depend on the lists; stop before reading them if those are broken.
    throw_if(r);

    std::vector<std::string> ids, primaries, secondaries, boilers;
    for (const auto& a : in.activities) {
        ids.push_back(a.id);
        (a.kind == ActivityKind::Primary ? primaries : secondaries).push_back(a.id);
    }
    for (const auto& b : in.boilers) {
        boilers.push_back(b.id);
    }
    MatrixContext ctx{base_dir, mapping, r, options.allow_tables};
    in.dep_plus  = read_matrix(doc, "dep_plus", primaries, secondaries, false, ctx);
    in.dep_minus = read_matrix(doc, "dep_minus", primaries, secondaries, false, ctx);
    in.mop       = read_matrix(doc, "mop", ids, in.pressure_names, true, ctx);
    in.mpr       = read_matrix(doc, "mpr", in.pressure_names, in.receptor_names, true, ctx);
    in.moc       = read_matrix(doc, "moc", ids, boilers, false, ctx);
    in.mec       = read_matrix(doc, "mec", in.emission_names, boilers, false, ctx);
    throw_if(r);

    auto report = validate(in);
    if (!report.ok()) {
        throw InvariantError({}, std::move(report.errors));
    }
    return in;
}

PlanInstance parse_instance(std::string_view text, const fs::path& base_dir, const LoadOptions& options)
{
    return instance_from_json(parse_json(text, "instance"), base_dir, options);
}

PlanInstance load_instance(const fs::path& path, const LoadOptions& options)
{
    return instance_from_json(parse_json(read_file(path), path.string()), path.parent_path(), options);
}

Json instance_to_json(const PlanInstance& in)
{
    Json doc;
    doc["schema_version"] = schema_version;
    doc["name"]           = in.name;
    Json acts             = Json::array();
    for (const auto& a : in.activities) {
        acts.push_back(Json{{"id", a.id},
                            {"name", a.name},
                            {"kind", std::string(to_string(a.kind))},
                            {"lower", clean(a.lower)},
                            {"upper", clean(a.upper)},
                            {"unit_cost", clean(a.unit_cost)},
                            {"unit_outcome", clean(a.unit_outcome)}});
    }
    doc["activities"]     = std::move(acts);
    doc["budget"]         = clean(in.budget);
    doc["min_outcome"]    = clean(in.min_outcome);
    doc["hours_per_year"] = clean(in.hours_per_year);
    doc["efficiency"]     = clean(in.efficiency);
    doc["dep_plus"]       = matrix_json(in.dep_plus);
    doc["dep_minus"]      = matrix_json(in.dep_minus);
    doc["pressure_names"] = strings_json(in.pressure_names);
    doc["receptor_names"] = strings_json(in.receptor_names);
    doc["mop"]            = matrix_json(in.mop);
    doc["mpr"]            = matrix_json(in.mpr);
    Json boilers          = Json::array();
    for (const auto& b : in.boilers) {
        boilers.push_back(Json{{"id", b.id}, {"name", b.name}});
    }
    doc["boilers"]        = std::move(boilers);
    doc["moc"]            = matrix_json(in.moc);
    doc["emission_names"] = strings_json(in.emission_names);
    doc["mec"]            = matrix_json(in.mec);
    Json tables           = Json::array();
    for (const auto& t : in.indicator_tables) {
        Json rows = Json::object();
        for (const auto& [emission, f] : t.rows) {
            rows[emission] = triple(f);
        }
        tables.push_back(Json{{"name", t.name}, {"rows", std::move(rows)}});
    }
    doc["indicator_tables"] = std::move(tables);
    Json groups             = Json::object();
    for (const auto& [emission, group] : in.emission_groups) {
        groups[emission] = group;
    }
    doc["emission_groups"] = std::move(groups);
    return doc;
}

void save_instance(const PlanInstance& instance, const fs::path& path)
{
    write_file(path, dump(instance_to_json(instance)));
}

Json scenario_to_json(const Scenario& s)
{
    Json j;
    j["kind"]           = std::string(to_string(s.kind));
    j["magnitudes"]     = named(s.magnitudes);
    j["positive_parts"] = named(s.positive_parts);
    j["pressures"]      = named(s.pressures);
    j["receptors"]      = named(s.receptors);
    j["boiler_powers"]  = named(s.boiler_powers);
    j["emissions"]      = named(s.emissions);
    Json ind            = Json::object();
    for (const auto& [name, f] : s.indicators) {
        ind[name] = triple(f);
    }
    j["indicators"]        = std::move(ind);
    j["total_cost"]        = clean(s.total_cost);
    j["total_outcome"]     = clean(s.total_outcome);
    j["objective_values"]  = named(s.objective_values);
    j["activity_costs"]    = named(s.activity_costs);
    j["activity_outcomes"] = named(s.activity_outcomes);
    return j;
}

Json scenario_document(const Scenario& scenario)
{
    Json doc{{"schema_version", schema_version}};
    const auto body = scenario_to_json(scenario);
    for (const auto& [key, value] : body.items()) {
        doc[key] = value;
    }
    return doc;
}

Scenario scenario_from_json(const Json& doc)
{
    Reader r;
    auto s = read_scenario(r, doc, "");
    throw_if(r);
    return s;
}

Json front_to_json(const ParetoFront& f)
{
    Json doc;
    doc["schema_version"]      = schema_version;
    doc["objectives"]          = strings_json(f.objectives);
    doc["constant_objectives"] = strings_json(f.constant_objectives);
    doc["utopia"]              = numbers_json(f.utopia);
    doc["nadir_estimate"]      = numbers_json(f.nadir_estimate);
    doc["dropped"]             = f.dropped;
    Json scenarios             = Json::array();
    for (const auto& s : f.scenarios) {
        scenarios.push_back(scenario_to_json(s));
    }
    doc["scenarios"] = std::move(scenarios);
    return doc;
}

ParetoFront front_from_json(const Json& doc)
{
    Reader r;
    ParetoFront f;
    if (!r.object(doc, "")) {
        throw_if(r);
    }
    r.check_keys(doc, "", {"schema_version", "objectives", "constant_objectives", "utopia", "nadir_estimate", "dropped",
                           "scenarios"});
    check_version(r, doc);
    f.objectives          = r.names(doc, "objectives", "");
    f.constant_objectives = r.names(doc, "constant_objectives", "");
    f.utopia              = r.numbers(doc, "utopia", "");
    f.nadir_estimate      = r.numbers(doc, "nadir_estimate", "");
    if (const auto* d = r.field(doc, "dropped", "", true)) {
        if (d->is_number_unsigned()) {
            f.dropped = d->get<std::size_t>();
        } else {
            r.error("dropped", "expected a nonnegative integer");
        }
    }
    if (const auto* list = r.field(doc, "scenarios", "", true); list && r.array(*list, "scenarios")) {
        for (std::size_t i = 0; i < list->size(); ++i) {
            f.scenarios.push_back(read_scenario(r, (*list)[i], at("scenarios", i)));
        }
    }
    throw_if(r);
    return f;
}

Json assessment_to_json(const PlanInstance& in, const AssessmentResult& result)
{
    auto zip = [](const std::vector<std::string>& names, const std::vector<double>& values) {
        Json j = Json::object();
        for (std::size_t i = 0; i < names.size() && i < values.size(); ++i) {
            j[names[i]] = clean(values[i]);
        }
        return j;
    };
    Json doc;
    doc["schema_version"] = schema_version;
    doc["pressures"]      = zip(in.pressure_names, result.pressures);
    doc["receptors"]      = zip(in.receptor_names, result.receptors);
    doc["emissions"]      = zip(in.emission_names, result.emissions);
    Json ind              = Json::object();
    for (std::size_t t = 0; t < in.indicator_tables.size() && t < result.indicators.size(); ++t) {
        ind[in.indicator_tables[t].name] = triple(result.indicators[t]);
    }
    doc["indicators"] = std::move(ind);
    return doc;
}

void write_front(const ParetoFront& front, const fs::path& path)
{
    write_file(path, dump(front_to_json(front)));
}

ParetoFront read_front(const fs::path& path)
{
    return front_from_json(parse_json(read_file(path), path.string()));
}

FixedPlan fixed_plan_from_json(const Json& doc)
{
    Reader r;
    FixedPlan plan;
    if (r.object(doc, "")) {
        r.check_keys(doc, "", {"schema_version", "magnitudes", "boiler_powers"});
        plan.magnitudes    = r.named_values(doc, "magnitudes", "", true);
        plan.boiler_powers = r.named_values(doc, "boiler_powers", "", false);
    }
    throw_if(r);
    return plan;
}

std::string dump(const Json& doc)
{
    return doc.dump(2, ' ', false, Json::error_handler_t::replace) + "\n";
}

Json parse_json(std::string_view text, const std::string& origin)
{
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        // Byte offset -> line:column for the message.
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::string what = e.what();
        if (const auto colon = what.rfind(": "); colon != std::string::npos) {
            what = what.substr(colon + 2);
        }
        throw ParseError(fmt::format("{}:{}:{}: {}", origin, line, column, what));
    }
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(fmt::format("cannot read {}", path.string()));
    }
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const fs::path& path, std::string_view content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(content.data(), std::streamsize(content.size()))) {
        throw IoError(fmt::format("cannot write {}", path.string()));
    }
}

}
