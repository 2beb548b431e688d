#pragma once

#include "planopt/data_io.h"

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Stateless HTTP facade. Handlers are plain functions from request body to
// {status, body}; `serve` wires them to a socket.
namespace planopt {

struct ServiceConfig
{
    std::string host = "127.0.0.1";
    int port         = 8080;
    std::filesystem::path samples_dir;
    std::optional<std::filesystem::path> ui_dir;
    unsigned max_concurrency = 1;
    std::chrono::seconds timeout{120};
};

/// Reads PLANOPT_ADDR, PLANOPT_MAX_CONCURRENCY, PLANOPT_TIMEOUT_SECS,
/// PLANOPT_SAMPLES_DIR and PLANOPT_UI_DIR. Throws ValidationError on bad values.
ServiceConfig config_from_env(const std::filesystem::path& default_samples_dir);

struct Response
{
    int status = 200;
    std::string body;

    bool operator==(const Response&) const = default;
};

/// FNV-1a 64-bit hash of a payload, as 16 lowercase hex digits.
std::string content_hash(std::string_view payload);

/// Splits "spec;spec;..." into objectives with unique labels.
std::vector<ObjectiveSpec> parse_objective_list(std::string_view text);

/// The documents both the command line and the service return.
std::string solve_document(const PlanInstance& instance, const ObjectiveSpec& objective,
                           const std::vector<UserConstraint>& extra, const lp::SolveOptions& options);
std::string pareto_document(const PlanInstance& instance, const ParetoRequest& request, const ParetoOptions& options);

/// Names of the *.json instances in a directory, sorted; empty when it does not exist.
std::vector<std::string> sample_names(const std::filesystem::path& dir);

class Service
{
public:
    explicit Service(ServiceConfig config);

    Response health() const;
    Response samples() const;
    Response sample(std::string_view name) const;
    Response solve(std::string_view body) const;
    Response pareto(std::string_view body) const;

    /// Routes an /api/v1 request; unknown paths give 404, wrong methods 405.
    Response handle(std::string_view method, std::string_view path, std::string_view body) const;

    const ServiceConfig& config() const noexcept
    {
        return _config;
    }

private:
    ServiceConfig _config;
};

/// HTTP binding of a Service: JSON bodies with an X-Content-Hash header, the UI
/// bundle (when configured) under /.
class HttpServer
{
public:
    explicit HttpServer(const Service& service);
    ~HttpServer();

    /// Binds the configured address; port 0 picks a free port. False on failure.
    bool bind();
    int port() const noexcept;
    /// Blocks until stop() is called.
    bool listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> _impl;
};

/// bind + listen. Returns false when the address cannot be bound.
bool serve(const Service& service);

}
