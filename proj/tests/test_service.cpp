#include "planopt/service.h"

#include "service_cases.h"

#include <doctest.h>
#include <httplib.h>

#include <algorithm>
#include <cstdlib>
#include <future>
#include <random>

namespace planopt::test {

namespace fs = std::filesystem;

namespace {

const fs::path samples = PLANOPT_SAMPLES_DIR;

Json toy_instance()
{
    return instance_to_json(load_instance(samples / "toy-segment.json"));
}

Json decode(const Response& r)
{
    return Json::parse(r.body);
}

bool names_path(const Response& r, std::string_view path)
{
    const auto doc = decode(r);
    for (const auto& v : doc["violations"]) {
        if (v["path"] == path) {
            return true;
        }
    }
    return false;
}

// Restores an environment variable at scope exit.
struct EnvGuard
{
    std::string name;
    std::optional<std::string> saved;

    EnvGuard(std::string n, const char* value)
    : name(std::move(n))
    {
        if (const char* old = std::getenv(name.c_str())) {
            saved = old;
        }
        if (value != nullptr) {
            setenv(name.c_str(), value, 1);
        } else {
            unsetenv(name.c_str());
        }
    }

    ~EnvGuard()
    {
        if (saved) {
            setenv(name.c_str(), saved->c_str(), 1);
        } else {
            unsetenv(name.c_str());
        }
    }
};

}

TEST_CASE("status matrix in process")
{
    TempDir empty;
    for (const auto& c : service_matrix(samples, empty.path)) {
        CAPTURE(c.name);
        const auto r = run_case(c);
        CHECK(r.status == c.status);
        REQUIRE_NOTHROW(decode(r));
        if (c.check) {
            CHECK(c.check(decode(r)));
        }
    }
}

TEST_CASE("status matrix over HTTP matches in process")
{
    TempDir empty;
    for (const auto& c : service_matrix(samples, empty.path)) {
        CAPTURE(c.name);
        std::string hash;
        const auto http = run_case_http(c, &hash);
        CHECK(http == run_case(c));
        CHECK(hash == content_hash(http.body));
    }
}

TEST_CASE("routing")
{
    const Service service(test_config(samples));
    CHECK(service.handle("GET", "/api/v1/solve", "").status == 405);
    CHECK(service.handle("POST", "/api/v1/health", "").status == 405);
    CHECK(service.handle("GET", "/api/v1/nothing", "").status == 404);
    CHECK(service.handle("GET", "/elsewhere", "").status == 404);
    CHECK(service.handle("GET", "/api/v1/samples/no-such", "").status == 404);
    CHECK(service.handle("GET", "/api/v1/samples/..%2Fetc", "").status == 404);

    const auto r = service.handle("GET", "/api/v1/samples/sample-region", "");
    REQUIRE(r.status == 200);
    CHECK(instance_from_json(decode(r)) == load_instance(samples / "sample-region.json"));
}

TEST_CASE("request bodies")
{
    const Service service(test_config(samples));
    const auto toy = toy_instance();
    auto solve     = [&](const Json& body) {
        return service.solve(body.dump());
    };

    CHECK(solve({{"sample", "toy-segment"}, {"objective", "min receptor:r1"}}).status == 200);
    CHECK(solve({{"instance", toy}, {"objective", {{"spec", "max total_outcome"}, {"label", "outcome"}}}}).status == 200);
    CHECK(names_path(solve({{"instance", toy}}), "objective"));
    CHECK(names_path(solve({{"objective", "min total_cost"}}), "instance"));
    CHECK(names_path(solve({{"sample", "toy-segment"}, {"instance", toy}, {"objective", "min total_cost"}}), "instance"));
    CHECK(names_path(solve({{"sample", "toy-segment"}, {"objective", "min total_cost +"}}), "objective"));
    CHECK(names_path(solve({{"sample", "toy-segment"}, {"objective", "min total_cost"}, {"colour", 1}}), "colour"));
    CHECK(names_path(solve({{"sample", "toy-segment"}, {"objective", "min total_cost"}, {"constraints", {"x <"}}}),
                     "constraints[0]"));
    CHECK(names_path(solve({{"sample", "toy-segment"}, {"objective", "min receptor:nowhere"}}), "objective"));
    CHECK(names_path(solve({{"sample", "toy-segment"}, {"objective", "min total_cost"}, {"mapping", "high=3"}}), "mapping"));
    CHECK(service.solve("[1, 2]").status == 422);

    auto remapped = solve({{"sample", "sample-region"}, {"objective", "min total_cost"}, {"mapping", "high=0.5"}});
    CHECK(remapped.status == 200);
    CHECK(remapped != solve({{"sample", "sample-region"}, {"objective", "min total_cost"}}));

    SUBCASE("inline instances cannot reference server files")
    {
        auto doc   = toy;
        doc["mpr"] = Json{{"table", "tables/sample-region-mpr.csv"}};
        CHECK(names_path(solve({{"instance", doc}, {"objective", "min total_cost"}}), "instance.mpr"));
    }
    SUBCASE("invariant violations inside the instance")
    {
        auto doc          = toy;
        doc["efficiency"] = 0;
        CHECK(names_path(solve({{"instance", doc}, {"objective", "min total_cost"}}), "instance.efficiency"));
    }
    SUBCASE("pareto objective forms")
    {
        const Json a{{"instance", toy}, {"objectives", "min receptor:r1; min receptor:r2"}, {"points", 5}};
        const Json b{{"instance", toy}, {"objectives", {"min receptor:r1", "min receptor:r2"}}, {"points", 5}};
        CHECK(service.pareto(a.dump()) == service.pareto(b.dump()));
        const Json dup{{"instance", toy}, {"objectives", "min receptor:r1;min receptor:r1"}, {"points", 5}};
        const auto r = service.pareto(dup.dump());
        REQUIRE(r.status == 200);
        CHECK(decode(r)["scenarios"].size() == 1);
        CHECK(names_path(service.pareto(Json{{"instance", toy}, {"objectives", "a;b"}, {"points", 2.5}}.dump()), "points"));
        CHECK(names_path(service.pareto(Json{{"instance", toy}, {"objectives", 3}, {"points", 5}}.dump()), "objectives"));
        CHECK(names_path(service.pareto(Json{{"instance", toy}, {"objectives", "min receptor:r1;min receptor:r2"},
                                             {"points", 100000}}.dump()),
                         "points"));
    }
}

TEST_CASE("responses are deterministic and independent of request order")
{
    TempDir empty;
    auto cases = service_matrix(samples, empty.path);
    std::vector<Response> reference;
    for (const auto& c : cases) {
        reference.push_back(run_case(c));
        CHECK(run_case(c) == reference.back());
    }

    // One long-lived service, the recorded sequence replayed in shuffled orders.
    std::vector<std::size_t> order(cases.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(11);
    for (int round = 0; round < 4; ++round) {
        std::shuffle(order.begin(), order.end(), rng);
        for (auto i : order) {
            CAPTURE(cases[i].name);
            CHECK(run_case(cases[i]) == reference[i]);
        }
    }
}

TEST_CASE("concurrent requests over HTTP")
{
    auto config            = test_config(samples);
    config.max_concurrency = 2;
    const Service service(config);
    HttpServer server(service);
    REQUIRE(server.bind());
    std::thread listener([&server] {
        server.listen();
    });

    const Json body{{"sample", "sample-region"}, {"objectives", "min total_cost;max total_outcome"}, {"points", 4}};
    const auto expected = service.pareto(body.dump());
    REQUIRE(expected.status == 200);
    std::vector<std::future<std::string>> replies;
    for (int k = 0; k < 6; ++k) {
        replies.push_back(std::async(std::launch::async, [&] {
            httplib::Client client("127.0.0.1", server.port());
            client.set_read_timeout(120, 0);
            const auto r = client.Post("/api/v1/pareto", body.dump(), "application/json");
            return r ? r->body : std::string();
        }));
    }
    for (auto& f : replies) {
        CHECK(f.get() == expected.body);
    }
    httplib::Client client("127.0.0.1", server.port());
    const auto health = client.Get("/api/v1/health");
    REQUIRE(health);
    CHECK(health->status == 200);
    CHECK(health->get_header_value("Content-Type") == "application/json");
    server.stop();
    listener.join();
}

TEST_CASE("UI bundle is served under the root")
{
    TempDir ui;
    std::ofstream(ui.path / "index.html") << "<!doctype html><title>planopt</title>\n";
    auto config   = test_config(samples);
    config.ui_dir = ui.path;
    const Service service(config);
    HttpServer server(service);
    REQUIRE(server.bind());
    std::thread listener([&server] {
        server.listen();
    });
    httplib::Client client("127.0.0.1", server.port());
    const auto page = client.Get("/");
    REQUIRE(page);
    CHECK(page->status == 200);
    CHECK(page->body.find("planopt") != std::string::npos);
    const auto api = client.Get("/api/v1/health");
    REQUIRE(api);
    CHECK(api->status == 200);
    server.stop();
    listener.join();
}

TEST_CASE("content hash")
{
    CHECK(content_hash("") == "cbf29ce484222325");
    CHECK(content_hash("a") == "af63dc4c8601ec8c");
    CHECK(content_hash("foobar") == "85944171f73967e8");
}

TEST_CASE("objective lists")
{
    const auto list = parse_objective_list(" min total_cost ; max total_outcome;");
    REQUIRE(list.size() == 2);
    CHECK(list[1].sense == lp::Sense::Maximize);
    const auto dup = parse_objective_list("min total_cost;min total_cost");
    CHECK(dup[0].label != dup[1].label);
    CHECK_THROWS_AS(parse_objective_list("min total_cost;min +"), SpecSyntaxError);
}

TEST_CASE("configuration from the environment")
{
    SUBCASE("defaults")
    {
        EnvGuard a("PLANOPT_ADDR", nullptr), b("PLANOPT_MAX_CONCURRENCY", nullptr), c("PLANOPT_TIMEOUT_SECS", nullptr),
            d("PLANOPT_SAMPLES_DIR", nullptr), e("PLANOPT_UI_DIR", nullptr);
        const auto config = config_from_env("/samples");
        CHECK(config.host == "127.0.0.1");
        CHECK(config.port == 8080);
        CHECK(config.timeout == std::chrono::seconds(120));
        CHECK(config.max_concurrency >= 1);
        CHECK(config.samples_dir == "/samples");
        CHECK_FALSE(config.ui_dir.has_value());
    }
    SUBCASE("overrides")
    {
        EnvGuard a("PLANOPT_ADDR", "0.0.0.0:9000"), b("PLANOPT_MAX_CONCURRENCY", "3"), c("PLANOPT_TIMEOUT_SECS", "5"),
            d("PLANOPT_SAMPLES_DIR", "/s"), e("PLANOPT_UI_DIR", "/ui");
        const auto config = config_from_env("/samples");
        CHECK(config.host == "0.0.0.0");
        CHECK(config.port == 9000);
        CHECK(config.max_concurrency == 3);
        CHECK(config.timeout == std::chrono::seconds(5));
        CHECK(config.samples_dir == "/s");
        CHECK(config.ui_dir == fs::path("/ui"));
    }
    SUBCASE("bad values")
    {
        EnvGuard a("PLANOPT_ADDR", "localhost"), b("PLANOPT_MAX_CONCURRENCY", "0"), c("PLANOPT_TIMEOUT_SECS", "soon");
        try {
            config_from_env("/samples");
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(e.violations().size() == 3);
        }
    }
}

TEST_CASE("sample names")
{
    TempDir dir;
    CHECK(sample_names(dir.path).empty());
    CHECK(sample_names(dir.path / "missing").empty());
    std::ofstream(dir.path / "b.json") << "{}";
    std::ofstream(dir.path / "a.json") << "{}";
    std::ofstream(dir.path / "notes.txt") << "";
    std::ofstream(dir.path / "bad name.json") << "{}";
    CHECK(sample_names(dir.path) == std::vector<std::string>{"a", "b"});
}

}
