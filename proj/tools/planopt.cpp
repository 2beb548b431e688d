// planopt: command-line driver for validation, single-objective solves, Pareto
// fronts, fixed-plan assessment and the HTTP service.
#include "planopt/data_io.h"
#include "planopt/service.h"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <iostream>

namespace {

using namespace planopt;

enum Exit : int
{
    exit_ok         = 0,
    exit_internal   = 1,
    exit_user       = 2,
    exit_io         = 3,
    exit_no_optimum = 4,
};

struct Common
{
    std::string instance;
    std::string mapping;
    std::string out;
};

LoadOptions load_options(const Common& c)
{
    LoadOptions options;
    if (!c.mapping.empty()) {
        options.mapping = parse_mapping(c.mapping);
    }
    return options;
}

void emit(const Common& c, std::string_view document)
{
    if (c.out.empty()) {
        std::fwrite(document.data(), 1, document.size(), stdout);
        std::fflush(stdout);
    } else {
        write_file(c.out, document);
    }
}

std::vector<UserConstraint> constraints(const std::vector<std::string>& specs)
{
    std::vector<UserConstraint> out;
    for (const auto& s : specs) {
        out.push_back(parse_constraint(s));
    }
    return out;
}

// One fixed-width row per scenario: index, kind, objective values in request order.
std::string summary_table(const ParetoFront& front)
{
    std::vector<std::size_t> widths;
    for (const auto& label : front.objectives) {
        widths.push_back(std::max<std::size_t>(16, label.size()));
    }
    std::string table = fmt::format("{:>4}  {:<12}", "#", "kind");
    for (std::size_t j = 0; j < front.objectives.size(); ++j) {
        table += fmt::format("  {:>{}}", front.objectives[j], widths[j]);
    }
    table += '\n';
    for (std::size_t s = 0; s < front.scenarios.size(); ++s) {
        const auto& scenario = front.scenarios[s];
        table += fmt::format("{:>4}  {:<12}", s + 1, to_string(scenario.kind));
        for (std::size_t j = 0; j < front.objectives.size(); ++j) {
            const auto value = lookup(scenario.objective_values, front.objectives[j]);
            table += fmt::format("  {:>{}}", value ? fmt::format("{:.6g}", *value + 0.0) : "-", widths[j]);
        }
        table += '\n';
    }
    table += fmt::format("scenarios: {}  dropped: {}\n", front.scenarios.size(), front.dropped);
    return table;
}

int run_validate(const Common& c)
{
    const auto instance = load_instance(c.instance, load_options(c));
    for (const auto& w : validate(instance).warnings) {
        fmt::print(stderr, "warning: {}: {}\n", w.path, w.message);
    }
    fmt::print("OK\n");
    return exit_ok;
}

int run_solve(const Common& c, const std::string& objective, const std::vector<std::string>& specs)
{
    const auto instance = load_instance(c.instance, load_options(c));
    emit(c, solve_document(instance, parse_objective(objective), constraints(specs), {}));
    return exit_ok;
}

int run_pareto(const Common& c, const std::string& objectives, int points, const std::vector<std::string>& specs,
               unsigned threads)
{
    const auto instance = load_instance(c.instance, load_options(c));
    const ParetoRequest request{parse_objective_list(objectives), points, constraints(specs)};
    ParetoOptions options;
    options.threads      = threads;
    const auto document  = pareto_document(instance, request, options);
    const auto table     = summary_table(front_from_json(parse_json(document, "front")));
    emit(c, document);
    std::fputs(table.c_str(), c.out.empty() ? stderr : stdout);
    return exit_ok;
}

int run_assess(const Common& c, const std::string& magnitudes_file)
{
    const auto instance   = load_instance(c.instance, load_options(c));
    const auto plan       = fixed_plan_from_json(parse_json(read_file(magnitudes_file), magnitudes_file));
    const auto magnitudes = align_magnitudes(instance, plan.magnitudes);
    const auto powers     = align_boiler_powers(instance, plan.boiler_powers);
    if (auto violations = check_bounds(instance, magnitudes); !violations.empty()) {
        throw ValidationError("", std::move(violations));
    }
    emit(c, dump(assessment_to_json(instance, assess(instance, magnitudes, powers))));
    return exit_ok;
}

int run_serve(const std::string& samples_dir, const std::string& ui_dir, const std::string& addr)
{
    auto config = config_from_env(PLANOPT_DEFAULT_SAMPLES_DIR);
    if (!samples_dir.empty()) {
        config.samples_dir = samples_dir;
    }
    if (!ui_dir.empty()) {
        config.ui_dir = std::filesystem::path(ui_dir);
    }
    if (!addr.empty()) {
        const auto colon = addr.rfind(':');
        if (colon == std::string::npos) {
            throw ValidationError("", {{"--addr", "expected host:port"}});
        }
        config.host = addr.substr(0, colon);
        try {
            config.port = std::stoi(addr.substr(colon + 1));
        } catch (const std::exception&) {
            throw ValidationError("", {{"--addr", "expected host:port"}});
        }
    }
    const Service service(std::move(config));
    if (!serve(service)) {
        fmt::print(stderr, "error: cannot listen on {}:{}\n", service.config().host, service.config().port);
        return exit_io;
    }
    return exit_ok;
}

void add_common(CLI::App* cmd, Common& c, bool with_out)
{
    cmd->add_option("instance", c.instance, "Instance document (JSON)")->required();
    cmd->add_option("--mapping", c.mapping, "Qualitative mapping override, e.g. high=1,medium=0.5,low=0.25");
    if (with_out) {
        cmd->add_option("--out,-o", c.out, "Write the document here instead of stdout");
    }
}

}

int main(int argc, char** argv)
{
    CLI::App app{"Regional energy plan synthesis and environmental assessment", "planopt"};
    app.set_version_flag("--version", PLANOPT_VERSION);
    app.require_subcommand(1);

    Common common;
    std::string objective, objectives, magnitudes, samples_dir, ui_dir, addr;
    std::vector<std::string> specs;
    int points       = 0;
    unsigned threads = 0;

    auto* validate_cmd = app.add_subcommand("validate", "Check an instance document");
    add_common(validate_cmd, common, false);

    auto* solve_cmd = app.add_subcommand("solve", "Optimize a single objective and write the scenario");
    add_common(solve_cmd, common, true);
    solve_cmd->add_option("--objective", objective, "min|max k1*key1 + k2*key2 ...")->required();
    solve_cmd->add_option("--constraint", specs, "expr <=|=|>= rhs (repeatable)");

    auto* pareto_cmd = app.add_subcommand("pareto", "Generate an evenly distributed Pareto front");
    add_common(pareto_cmd, common, true);
    pareto_cmd->add_option("--objectives", objectives, "Objective specs separated by ';'")->required();
    pareto_cmd->add_option("--points", points, "Requested number of Pareto points")->required();
    pareto_cmd->add_option("--constraint", specs, "expr <=|=|>= rhs (repeatable)");
    pareto_cmd->add_option("--threads", threads, "Worker threads (0: hardware concurrency)");

    auto* assess_cmd = app.add_subcommand("assess", "Assess a fixed, externally given plan");
    add_common(assess_cmd, common, true);
    assess_cmd->add_option("--magnitudes", magnitudes, "Plan document {magnitudes, boiler_powers}")->required();

    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service (configured by PLANOPT_* variables)");
    serve_cmd->add_option("--samples-dir", samples_dir, "Directory of sample instances");
    serve_cmd->add_option("--ui-dir", ui_dir, "Built UI bundle served under /");
    serve_cmd->add_option("--addr", addr, "host:port (overrides PLANOPT_ADDR)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_user;
    }

    try {
        if (*validate_cmd) {
            return run_validate(common);
        }
        if (*solve_cmd) {
            return run_solve(common, objective, specs);
        }
        if (*pareto_cmd) {
            return run_pareto(common, objectives, points, specs, threads);
        }
        if (*assess_cmd) {
            return run_assess(common, magnitudes);
        }
        return run_serve(samples_dir, ui_dir, addr);
    } catch (const SpecSyntaxError& e) {
        fmt::print(stderr, "{}\n", e.diagnostic());
        return exit_user;
    } catch (const ValidationError& e) {
        fmt::print(stderr, "error: invalid input\n{}\n", format_violations(e.violations()));
        return exit_user;
    } catch (const ParseError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_user;
    } catch (const IoError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_io;
    } catch (const NoOptimum& e) {
        fmt::print(stderr, "{}: {}\n", lp::to_string(e.status()), e.what());
        return exit_no_optimum;
    } catch (const std::exception& e) {
        fmt::print(stderr, "internal error: {}\n", e.what());
        return exit_internal;
    }
}
