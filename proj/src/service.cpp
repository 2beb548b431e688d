#include "planopt/service.h"

#include <fmt/format.h>
#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <semaphore>
#include <thread>

namespace planopt {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view api_prefix = "/api/v1";

// Thrown while decoding a request to short-circuit with a finished response.
struct Reply
{
    Response response;
};

Response json_response(int status, const Json& doc)
{
    return Response{status, dump(doc)};
}

Response message_response(int status, std::string_view kind, std::string_view message)
{
    Json doc;
    doc["status"]  = kind;
    doc["message"] = message;
    return json_response(status, doc);
}

Response invalid_response(const std::vector<Violation>& violations)
{
    Json list = Json::array();
    for (const auto& v : violations) {
        list.push_back(Json{{"path", v.path}, {"message", v.message}});
    }
    Json doc;
    doc["status"]     = "invalid";
    doc["violations"] = std::move(list);
    return json_response(422, doc);
}

std::vector<Violation> prefixed(const std::vector<Violation>& violations, const std::string& prefix)
{
    std::vector<Violation> out;
    for (const auto& v : violations) {
        out.push_back(Violation{v.path.empty() ? prefix : prefix + "." + v.path, v.message});
    }
    return out;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string> split_specs(std::string_view text)
{
    std::vector<std::string> out;
    while (true) {
        const auto semi = text.find(';');
        const auto part = trim(text.substr(0, semi));
        if (!part.empty()) {
            out.emplace_back(part);
        }
        if (semi == std::string_view::npos) {
            break;
        }
        text.remove_prefix(semi + 1);
    }
    return out;
}

bool valid_sample_name(std::string_view name)
{
    return !name.empty() && name.size() <= 128 && std::all_of(name.begin(), name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
    });
}

template <class T>
std::optional<T> parse_number(std::string_view text)
{
    T value{};
    const auto* end = text.data() + text.size();
    const auto r    = std::from_chars(text.data(), end, value);
    if (r.ec != std::errc{} || r.ptr != end) {
        return std::nullopt;
    }
    return value;
}

std::optional<std::string> env(const char* name)
{
    const char* value = std::getenv(name);
    if (value == nullptr || *value == '\0') {
        return std::nullopt;
    }
    return std::string(value);
}

// Fields shared by solve and pareto bodies, decoded with every violation collected.
struct Decoded
{
    std::optional<std::string> sample;
    const Json* inline_instance = nullptr;
    std::optional<QualitativeMapping> mapping;
    std::vector<ObjectiveSpec> objectives;
    std::vector<UserConstraint> extra;
    int points = 0;
};

ObjectiveSpec decode_objective(const Json& value, const std::string& path, std::vector<Violation>& violations)
{
    std::string spec;
    std::optional<std::string> label;
    if (value.is_string()) {
        spec = value.get<std::string>();
    } else if (value.is_object()) {
        for (const auto& [key, field] : value.items()) {
            if (key == "spec" && field.is_string()) {
                spec = field.get<std::string>();
            } else if (key == "label" && field.is_string()) {
                label = field.get<std::string>();
            } else {
                violations.push_back({path + "." + key, key == "spec" || key == "label" ? "must be a string" : "unknown field"});
            }
        }
        if (!value.contains("spec")) {
            violations.push_back({path + ".spec", "required"});
            return {};
        }
    } else {
        violations.push_back({path, "must be a string or {\"spec\", \"label\"}"});
        return {};
    }
    try {
        auto objective = parse_objective(spec);
        if (label) {
            objective.label = *label;
        }
        return objective;
    } catch (const SpecSyntaxError& e) {
        violations.push_back({path, e.what()});
    }
    return {};
}

// `doc` must outlive the result, which may point at its "instance" member.
Decoded decode(const Json& doc, bool pareto)
{
    if (!doc.is_object()) {
        throw Reply{invalid_response({{"", "request body must be a JSON object"}})};
    }

    Decoded d;
    std::vector<Violation> violations;
    const std::vector<std::string> allowed =
        pareto ? std::vector<std::string>{"sample", "instance", "mapping", "objectives", "constraints", "points"}
               : std::vector<std::string>{"sample", "instance", "mapping", "objective", "constraints"};
    for (const auto& [key, value] : doc.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            violations.push_back({key, "unknown field"});
        }
    }

    const bool has_sample   = doc.contains("sample");
    const bool has_instance = doc.contains("instance");
    if (has_sample == has_instance) {
        violations.push_back({"instance", "give exactly one of \"instance\" (inline document) or \"sample\" (name)"});
    } else if (has_sample) {
        if (doc["sample"].is_string()) {
            d.sample = doc["sample"].get<std::string>();
        } else {
            violations.push_back({"sample", "must be a string"});
        }
    } else if (doc["instance"].is_object()) {
        d.inline_instance = &doc["instance"];
    } else {
        violations.push_back({"instance", "must be an instance document"});
    }

    if (doc.contains("mapping")) {
        const auto& m = doc["mapping"];
        if (m.is_string()) {
            try {
                d.mapping = parse_mapping(m.get<std::string>());
            } catch (const ValidationError& e) {
                for (const auto& v : e.violations()) {
                    violations.push_back({"mapping", v.message});
                }
            }
        } else {
            violations.push_back({"mapping", "must be a string such as \"high=1,medium=0.5,low=0.25\""});
        }
    }

    if (pareto) {
        if (!doc.contains("objectives")) {
            violations.push_back({"objectives", "required"});
        } else if (const auto& list = doc["objectives"]; list.is_string()) {
            const auto specs = split_specs(list.get<std::string>());
            for (std::size_t k = 0; k < specs.size(); ++k) {
                d.objectives.push_back(decode_objective(Json(specs[k]), fmt::format("objectives[{}]", k), violations));
            }
        } else if (list.is_array()) {
            for (std::size_t k = 0; k < list.size(); ++k) {
                d.objectives.push_back(decode_objective(list[k], fmt::format("objectives[{}]", k), violations));
            }
        } else {
            violations.push_back({"objectives", "must be an array or a \";\"-separated string"});
        }
        disambiguate_labels(d.objectives);

        if (!doc.contains("points")) {
            violations.push_back({"points", "required"});
        } else if (const auto& p = doc["points"]; p.is_number_integer() && p.get<long long>() >= 0 &&
                                                  p.get<long long>() <= std::numeric_limits<int>::max()) {
            d.points = p.get<int>();
        } else if (p.is_number_integer()) {
            d.points = p.get<long long>() < 0 ? -1 : std::numeric_limits<int>::max();
        } else {
            violations.push_back({"points", "must be an integer"});
        }
    } else if (!doc.contains("objective")) {
        violations.push_back({"objective", "required"});
    } else {
        d.objectives.push_back(decode_objective(doc["objective"], "objective", violations));
    }

    if (doc.contains("constraints")) {
        const auto& list = doc["constraints"];
        if (!list.is_array()) {
            violations.push_back({"constraints", "must be an array of strings"});
        } else {
            for (std::size_t k = 0; k < list.size(); ++k) {
                const auto path = fmt::format("constraints[{}]", k);
                if (!list[k].is_string()) {
                    violations.push_back({path, "must be a string"});
                    continue;
                }
                try {
                    d.extra.push_back(parse_constraint(list[k].get<std::string>()));
                } catch (const SpecSyntaxError& e) {
                    violations.push_back({path, e.what()});
                }
            }
        }
    }

    if (!violations.empty()) {
        throw Reply{invalid_response(violations)};
    }
    return d;
}

}

ServiceConfig config_from_env(const fs::path& default_samples_dir)
{
    ServiceConfig config;
    config.samples_dir     = default_samples_dir;
    config.max_concurrency = std::max(1u, std::thread::hardware_concurrency());
    std::vector<Violation> violations;

    if (const auto addr = env("PLANOPT_ADDR")) {
        const auto colon = addr->rfind(':');
        const auto port  = colon == std::string::npos ? std::nullopt : parse_number<int>(std::string_view(*addr).substr(colon + 1));
        if (!port || *port < 0 || *port > 65535 || colon == 0) {
            violations.push_back({"PLANOPT_ADDR", fmt::format("expected host:port, got \"{}\"", *addr)});
        } else {
            config.host = addr->substr(0, colon);
            config.port = *port;
        }
    }
    if (const auto n = env("PLANOPT_MAX_CONCURRENCY")) {
        const auto value = parse_number<unsigned>(*n);
        if (!value || *value == 0) {
            violations.push_back({"PLANOPT_MAX_CONCURRENCY", fmt::format("expected a positive integer, got \"{}\"", *n)});
        } else {
            config.max_concurrency = *value;
        }
    }
    if (const auto t = env("PLANOPT_TIMEOUT_SECS")) {
        const auto value = parse_number<long>(*t);
        if (!value || *value <= 0) {
            violations.push_back({"PLANOPT_TIMEOUT_SECS", fmt::format("expected a positive integer, got \"{}\"", *t)});
        } else {
            config.timeout = std::chrono::seconds(*value);
        }
    }
    if (const auto dir = env("PLANOPT_SAMPLES_DIR")) {
        config.samples_dir = *dir;
    }
    if (const auto dir = env("PLANOPT_UI_DIR")) {
        config.ui_dir = fs::path(*dir);
    }
    if (!violations.empty()) {
        throw ValidationError("", violations);
    }
    return config;
}

std::string content_hash(std::string_view payload)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : payload) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

std::vector<ObjectiveSpec> parse_objective_list(std::string_view text)
{
    std::vector<ObjectiveSpec> out;
    for (const auto& spec : split_specs(text)) {
        out.push_back(parse_objective(spec));
    }
    disambiguate_labels(out);
    return out;
}

std::string solve_document(const PlanInstance& instance, const ObjectiveSpec& objective,
                           const std::vector<UserConstraint>& extra, const lp::SolveOptions& options)
{
    return dump(scenario_document(solve_plan(instance, objective, extra, options)));
}

std::string pareto_document(const PlanInstance& instance, const ParetoRequest& request, const ParetoOptions& options)
{
    return dump(front_to_json(nnc_front(instance, request, options)));
}

std::vector<std::string> sample_names(const fs::path& dir)
{
    std::vector<std::string> names;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        return names;
    }
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        const auto name = entry.path().stem().string();
        if (entry.is_regular_file(ec) && entry.path().extension() == ".json" && valid_sample_name(name)) {
            names.push_back(name);
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

Service::Service(ServiceConfig config)
: _config(std::move(config))
{
}

Response Service::health() const
{
    Json doc;
    doc["status"]  = "ok";
    doc["version"] = PLANOPT_VERSION;
    return json_response(200, doc);
}

Response Service::samples() const
{
    return json_response(200, Json(sample_names(_config.samples_dir)));
}

namespace {

std::optional<fs::path> sample_path(const ServiceConfig& config, std::string_view name)
{
    if (!valid_sample_name(name)) {
        return std::nullopt;
    }
    auto path = config.samples_dir / (std::string(name) + ".json");
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
        return std::nullopt;
    }
    return path;
}

Response not_found_sample(std::string_view name)
{
    return message_response(404, "not_found", fmt::format("no sample named \"{}\"", name));
}

// Instance named by a decoded body. Server-side samples that fail to load are faults.
PlanInstance resolve_instance(const ServiceConfig& config, const Decoded& d)
{
    LoadOptions options;
    options.mapping = d.mapping;
    if (d.sample) {
        const auto path = sample_path(config, *d.sample);
        if (!path) {
            throw Reply{not_found_sample(*d.sample)};
        }
        try {
            return load_instance(*path, options);
        } catch (const Error& e) {
            throw Reply{message_response(500, "error", fmt::format("sample \"{}\" failed to load: {}", *d.sample, e.what()))};
        }
    }
    options.allow_tables = false;
    try {
        return instance_from_json(*d.inline_instance, {}, options);
    } catch (const ValidationError& e) {
        throw Reply{invalid_response(prefixed(e.violations(), "instance"))};
    }
}

template <class Compute>
Response run(const ServiceConfig& config, std::string_view body, bool pareto, Compute compute)
{
    try {
        Json doc;
        try {
            doc = parse_json(body, "body");
        } catch (const ParseError& e) {
            return invalid_response({{"", e.what()}});
        }
        const auto d        = decode(doc, pareto);
        const auto instance = resolve_instance(config, d);
        lp::SolveOptions options;
        options.deadline = std::chrono::steady_clock::now() + config.timeout;
        return Response{200, compute(instance, d, options)};
    } catch (const Reply& r) {
        return r.response;
    } catch (const ValidationError& e) {
        return invalid_response(e.violations());
    } catch (const NoOptimum& e) {
        return message_response(409, lp::to_string(e.status()), e.what());
    } catch (const TimeoutError&) {
        return message_response(408, "timeout", fmt::format("wall-clock limit of {} s exceeded", config.timeout.count()));
    } catch (const std::exception& e) {
        return message_response(500, "error", e.what());
    }
}

}

Response Service::sample(std::string_view name) const
{
    const auto path = sample_path(_config, name);
    if (!path) {
        return not_found_sample(name);
    }
    try {
        return json_response(200, instance_to_json(load_instance(*path)));
    } catch (const std::exception& e) {
        return message_response(500, "error", fmt::format("sample \"{}\" failed to load: {}", name, e.what()));
    }
}

Response Service::solve(std::string_view body) const
{
    return run(_config, body, false, [](const PlanInstance& instance, const Decoded& d, const lp::SolveOptions& options) {
        return solve_document(instance, d.objectives.front(), d.extra, options);
    });
}

Response Service::pareto(std::string_view body) const
{
    return run(_config, body, true, [](const PlanInstance& instance, const Decoded& d, const lp::SolveOptions& options) {
        ParetoOptions po;
        po.solve   = options;
        po.threads = 1; // concurrency is bounded per request by the server
        return pareto_document(instance, ParetoRequest{d.objectives, d.points, d.extra}, po);
    });
}

Response Service::handle(std::string_view method, std::string_view path, std::string_view body) const
{
    if (path.substr(0, api_prefix.size()) != api_prefix) {
        return message_response(404, "not_found", fmt::format("no route {}", path));
    }
    const auto route = path.substr(api_prefix.size());
    auto expect      = [&](std::string_view wanted) {
        return method == wanted ? std::nullopt
                                     : std::optional(message_response(405, "method_not_allowed",
                                                                      fmt::format("{} {} is not supported", method, path)));
    };
    constexpr std::string_view samples_prefix = "/samples/";
    std::optional<Response> wrong;
    if (route == "/health") {
        return (wrong = expect("GET")) ? *wrong : health();
    }
    if (route == "/samples") {
        return (wrong = expect("GET")) ? *wrong : samples();
    }
    if (route.substr(0, samples_prefix.size()) == samples_prefix) {
        return (wrong = expect("GET")) ? *wrong : sample(route.substr(samples_prefix.size()));
    }
    if (route == "/solve") {
        return (wrong = expect("POST")) ? *wrong : solve(body);
    }
    if (route == "/pareto") {
        return (wrong = expect("POST")) ? *wrong : pareto(body);
    }
    return message_response(404, "not_found", fmt::format("no route {}", path));
}

struct HttpServer::Impl
{
    const Service& service;
    httplib::Server server;
    std::counting_semaphore<> slots;
    int port = -1;

    explicit Impl(const Service& s)
    : service(s)
    , slots(static_cast<std::ptrdiff_t>(s.config().max_concurrency))
    {
    }
};

HttpServer::HttpServer(const Service& service)
: _impl(std::make_unique<Impl>(service))
{
    auto& impl = *_impl;
    // Cheap requests (health, samples, UI files) never queue behind solves.
    const auto workers = std::max(8u, 2 * service.config().max_concurrency);
    impl.server.new_task_queue = [workers] {
        return new httplib::ThreadPool(workers);
    };
    auto handler = [&impl](const httplib::Request& req, httplib::Response& res) {
        const bool heavy = req.method == "POST";
        Response r;
        if (heavy && !impl.slots.try_acquire_for(impl.service.config().timeout)) {
            r = message_response(408, "timeout", "no solver slot became free within the wall-clock limit");
        } else {
            r = impl.service.handle(req.method, req.path, req.body);
            if (heavy) {
                impl.slots.release();
            }
        }
        res.status = r.status;
        res.set_header("X-Content-Hash", content_hash(r.body));
        res.set_content(r.body, "application/json");
    };
    impl.server.Get("/api/v1/.*", handler);
    impl.server.Post("/api/v1/.*", handler);
    impl.server.Put("/api/v1/.*", handler);
    impl.server.Delete("/api/v1/.*", handler);
    impl.server.set_payload_max_length(64 * 1024 * 1024);
    if (const auto& ui = service.config().ui_dir) {
        std::error_code ec;
        if (fs::is_directory(*ui, ec)) {
            impl.server.set_mount_point("/", ui->string());
        }
    }
}

HttpServer::~HttpServer()
{
    stop();
}

bool HttpServer::bind()
{
    const auto& config = _impl->service.config();
    if (config.port == 0) {
        _impl->port = _impl->server.bind_to_any_port(config.host);
    } else {
        _impl->port = _impl->server.bind_to_port(config.host, config.port) ? config.port : -1;
    }
    return _impl->port > 0;
}

int HttpServer::port() const noexcept
{
    return _impl->port;
}

bool HttpServer::listen()
{
    return _impl->server.listen_after_bind();
}

void HttpServer::stop()
{
    if (_impl && _impl->server.is_running()) {
        _impl->server.stop();
    }
}

bool serve(const Service& service)
{
    HttpServer server(service);
    if (!server.bind()) {
        return false;
    }
    fmt::print(stderr, "planopt {} listening on http://{}:{}\n", PLANOPT_VERSION, service.config().host, server.port());
    return server.listen();
}

}
