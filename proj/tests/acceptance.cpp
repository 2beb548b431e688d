// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "planopt/pareto.h"
#include "planopt/service.h"

#include "fixtures.h"
#include "oracles.h"
#include "service_cases.h"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <random>

namespace {

using namespace planopt;
using namespace planopt::test;
namespace fs = std::filesystem;
using Clock  = std::chrono::steady_clock;

const fs::path samples = PLANOPT_SAMPLES_DIR;

struct Outcome
{
    bool pass = true;
    std::string detail;
};

// Collects failures; the first few are reported verbatim.
struct Tally
{
    int checks   = 0;
    int failures = 0;
    std::string first;

    void check(bool ok, const std::string& what)
    {
        ++checks;
        if (!ok) {
            if (failures < 3) {
                first += (first.empty() ? "" : "; ") + what;
            }
            ++failures;
        }
    }

    Outcome outcome(const std::string& summary) const
    {
        if (failures == 0) {
            return {true, summary};
        }
        return {false, fmt::format("{} of {} checks failed: {}", failures, checks, first)};
    }
};

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double scaled(double tol, double reference)
{
    return tol * std::max(1.0, std::abs(reference));
}

// The instance corpus: shipped samples, hand fixtures and seeded random instances.
struct Corpus
{
    std::vector<std::pair<std::string, PlanInstance>> instances;
};

const Corpus& corpus()
{
    static const Corpus c = [] {
        Corpus out;
        out.instances.emplace_back("sample toy-segment", load_instance(samples / "toy-segment.json"));
        out.instances.emplace_back("sample sample-region", load_instance(samples / "sample-region.json"));
        out.instances.emplace_back("single_primary", single_primary());
        out.instances.emplace_back("split_pair", split_pair(0.3, 0.2));
        out.instances.emplace_back("boiler", boiler_instance());
        out.instances.emplace_back("toy_segment", toy_segment());
        std::mt19937_64 rng(4242);
        for (int k = 0; k < 200; ++k) {
            out.instances.emplace_back(fmt::format("random #{}", k), random_instance(rng));
        }
        return out;
    }();
    return c;
}

std::vector<ObjectiveSpec> corpus_objectives(const PlanInstance& in, std::mt19937_64& rng)
{
    std::vector<ObjectiveSpec> out{parse_objective("min total_cost"), parse_objective("max total_cost"),
                                   parse_objective("min total_outcome"), parse_objective("max total_outcome")};
    for (const auto& a : in.activities) {
        out.push_back(parse_objective("min activity:" + a.id));
        out.push_back(parse_objective("max activity:" + a.id));
    }
    for (int k = 0; k < 4; ++k) {
        out.push_back(random_objective(in, rng));
    }
    return out;
}

// Every optimal single-objective scenario over the corpus, with its solver values.
struct Solved
{
    const PlanInstance* instance;
    PlanModel model;
    lp::Solution solution;
    Scenario scenario;
};

const std::vector<Solved>& corpus_solves()
{
    static const std::vector<Solved> solved = [] {
        std::vector<Solved> out;
        std::mt19937_64 rng(7);
        for (const auto& [name, in] : corpus().instances) {
            for (const auto& objective : corpus_objectives(in, rng)) {
                auto model = build_lp(in, objective, {});
                auto sol   = lp::solve(model.lp);
                if (!sol.optimal()) {
                    continue;
                }
                auto s = extract_scenario(in, sol, model, {objective}, ScenarioKind::Boundary);
                out.push_back(Solved{&in, std::move(model), std::move(sol), std::move(s)});
            }
        }
        return out;
    }();
    return solved;
}

struct FrontCase
{
    std::string name;
    PlanInstance instance;
    ParetoRequest request;
};

ParetoRequest request(const std::string& objectives, int points)
{
    return ParetoRequest{parse_objective_list(objectives), points, {}};
}

// Front fixtures: both samples, the three-objective cube and seeded random instances.
std::vector<FrontCase> front_cases()
{
    const auto toy    = load_instance(samples / "toy-segment.json");
    const auto region = load_instance(samples / "sample-region.json");
    std::vector<FrontCase> out{
        {"toy r1/r2", toy, request("min receptor:r1;min receptor:r2", 5)},
        {"toy r1 both senses", toy, request("min receptor:r1;max receptor:r1", 9)},
        {"toy identical objectives", toy, request("min receptor:r1;min 2*receptor:r1", 5)},
        {"region cost/outcome", region, request("min total_cost;max total_outcome", 8)},
        {"region toxicity/cost", region, request("min indicator:human_toxicity;min total_cost", 6)},
        {"region CO2/outcome", region, request("min emission:CO2;max total_outcome", 7)},
        {"region receptors/outcome", region,
         request("min receptor:air_quality;min receptor:landscape;max total_outcome", 10)},
        {"cube", bare_instance({primary("x", 0, 1, 1, 1), primary("y", 0, 1, 1, 1), primary("z", 0, 1, 1, 1)}, 2, 1),
         request("min activity:x + 0.5*activity:y;min activity:y + 0.5*activity:z;min activity:z + 0.25*activity:x", 10)},
    };
    std::mt19937_64 rng(31);
    for (int k = 0; k < 40; ++k) {
        auto in = random_instance(rng);
        std::string objectives =
            in.emission_names.empty() ? "min total_cost;max total_outcome" : "min emission:" + in.emission_names[0] + ";max total_outcome";
        try {
            nnc_front(in, request(objectives, 6));
        } catch (const NoOptimum&) {
            continue;
        }
        out.push_back({fmt::format("random #{}", k), std::move(in), request(objectives, 6)});
    }
    return out;
}

struct FrontRun
{
    FrontCase fixture;
    ParetoFront front;
};

const std::vector<FrontRun>& front_runs()
{
    static const std::vector<FrontRun> runs = [] {
        std::vector<FrontRun> out;
        for (auto& c : front_cases()) {
            auto front = nnc_front(c.instance, c.request, ParetoOptions{{}, 1});
            out.push_back({std::move(c), std::move(front)});
        }
        return out;
    }();
    return runs;
}

std::vector<double> min_values(const Scenario& s, const std::vector<ObjectiveSpec>& objectives)
{
    std::vector<double> out;
    for (const auto& o : objectives) {
        out.push_back(min_sense(o, *lookup(s.objective_values, objective_label(o))));
    }
    return out;
}

bool dominates(const std::vector<double>& a, const std::vector<double>& b, double tol)
{
    bool strictly = false;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j] > b[j] + scaled(tol, b[j])) {
            return false;
        }
        strictly = strictly || a[j] < b[j] - scaled(tol, b[j]);
    }
    return strictly;
}

double variable_value(const Solved& s, const std::string& entity)
{
    const auto e = s.model.vars.entity(entity);
    if (!e) {
        throw std::logic_error("no entity " + entity);
    }
    return s.solution.values[*s.model.vars.variable(*e)];
}

Outcome lp_oracle()
{
    std::mt19937_64 rng(20240611);
    Tally t;
    int optimal = 0, infeasible = 0;
    const auto t0 = Clock::now();
    int k = 0;
    for (; optimal < 250 && k < 5000; ++k) {
        const auto lp     = random_lp(rng);
        const auto oracle = vertex_enumeration_optimum(lp);
        const auto s      = lp::solve(lp);
        if (!oracle) {
            t.check(s.status == lp::Status::Infeasible, fmt::format("LP {} should be infeasible", k));
            ++infeasible;
            continue;
        }
        ++optimal;
        t.check(s.optimal() && std::abs(*s.objective_value - *oracle) <= 1e-6,
                fmt::format("LP {}: {} vs oracle {}", k, s.objective_value.value_or(NAN), *oracle));
    }
    const double elapsed = seconds_since(t0);
    t.check(elapsed < 10.0, fmt::format("took {:.2f} s", elapsed));
    t.check(optimal >= 200, "fewer than 200 optimal programs");
    return t.outcome(fmt::format("{} random LPs ({} optimal, {} infeasible) agree with vertex enumeration in {:.2f} s", k,
                                 optimal, infeasible, elapsed));
}

Outcome milp_enumeration()
{
    std::mt19937_64 rng(77);
    Tally t;
    int optimal = 0;
    for (int k = 0; optimal < 60 && k < 1000; ++k) {
        const auto lp     = random_milp(rng);
        const auto oracle = binary_enumeration_optimum(lp);
        const auto s      = lp::solve(lp);
        if (!oracle) {
            t.check(s.status == lp::Status::Infeasible, fmt::format("MILP {} should be infeasible", k));
            continue;
        }
        ++optimal;
        t.check(s.optimal() && std::abs(*s.objective_value - *oracle) <= 1e-6,
                fmt::format("MILP {}: {} vs oracle {}", k, s.objective_value.value_or(NAN), *oracle));
    }
    t.check(optimal >= 50, "fewer than 50 optimal instances");
    return t.outcome(fmt::format("{} random MILPs with up to 6 binaries agree with full enumeration", optimal));
}

Outcome complementarity()
{
    Tally t;
    int split = 0;
    double worst = 0.0;
    for (const auto& s : corpus_solves()) {
        for (std::size_t i = 0; i < s.instance->activities.size(); ++i) {
            if (!s.instance->decommissionable(i)) {
                continue;
            }
            const auto& id   = s.instance->activities[i].id;
            const double prod = variable_value(s, "pos[" + id + "]") * variable_value(s, "neg[" + id + "]");
            worst            = std::max(worst, prod);
            ++split;
            t.check(prod <= 1e-6, fmt::format("{}: P*N = {}", id, prod));
        }
    }
    t.check(split > 100, "too few split activities exercised");
    return t.outcome(fmt::format("{} optimal scenarios, {} split activities, max P*N = {}", corpus_solves().size(), split,
                                 worst));
}

Outcome dependency_formula()
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Tally t;
    int vectors = 0;
    double worst = 0.0;
    while (vectors < 100) {
        auto in        = random_instance(rng);
        in.budget      = 1e9;
        in.min_outcome = -1e9;
        // Boilers shared between primaries would couple their magnitudes.
        in.moc = Matrix(in.activities.size(), in.boilers.size());
        for (auto& a : in.activities) {
            if (a.kind == ActivityKind::Secondary) {
                a.upper = 1e6;
            }
        }
        const auto primaries   = in.primaries();
        const auto secondaries = in.secondaries();
        std::vector<UserConstraint> fixes;
        std::vector<double> values;
        for (auto i : primaries) {
            const auto& a = in.activities[i];
            values.push_back(std::round((a.lower + u(rng) * (a.upper - a.lower)) * 8) / 8);
            fixes.push_back(fix(a.id, values.back()));
        }
        ++vectors;
        Scenario s;
        try {
            s = solve_plan(in, parse_objective("min total_cost"), fixes);
        } catch (const NoOptimum& e) {
            t.check(false, fmt::format("vector {}: {}", vectors, e.what()));
            continue;
        }
        for (std::size_t k = 0; k < secondaries.size(); ++k) {
            double expected = 0.0;
            for (std::size_t p = 0; p < primaries.size(); ++p) {
                expected += in.dep_plus(p, k) * std::max(values[p], 0.0) + in.dep_minus(p, k) * std::max(-values[p], 0.0);
            }
            const double got = *lookup(s.magnitudes, in.activities[secondaries[k]].id);
            worst            = std::max(worst, std::abs(got - expected));
            t.check(std::abs(got - expected) <= 1e-6, fmt::format("vector {}: {} vs {}", vectors, got, expected));
        }
    }
    return t.outcome(fmt::format("{} fixed primary vectors, max deviation {}", vectors, worst));
}

Outcome emissions_hand_case()
{
    const auto in = boiler_instance();
    const auto e  = compute_emissions(in, std::vector<double>{1.0});
    const bool ok = e.size() == 1 && std::abs(e[0] - 18461.54) <= 0.01;
    return {ok, fmt::format("1 MW, {} h/yr, efficiency {}, 2 g/GJ -> {:.4f} g/yr", in.hours_per_year, in.efficiency,
                            e.empty() ? NAN : e[0])};
}

Outcome indicator_fixture()
{
    Tally t;
    const auto in  = boiler_instance();
    const auto ind = compute_indicators(in, std::vector<double>{1000.0}); // 1 kg NOx
    t.check(ind.size() == 1, "one indicator expected");
    if (ind.size() == 1) {
        t.check(std::abs(ind[0].best - 95.0) <= 1e-9, fmt::format("best {}", ind[0].best));
        t.check(std::abs(ind[0].average - 197.5) <= 1e-9, fmt::format("average {}", ind[0].average));
        t.check(std::abs(ind[0].worst - 300.0) <= 1e-9, fmt::format("worst {}", ind[0].worst));
    }
    int triples = 0;
    auto ordered = [&](const Scenario& s) {
        for (const auto& [name, v] : s.indicators) {
            ++triples;
            t.check(v.best <= v.average && v.average <= v.worst, fmt::format("{}: {} {} {}", name, v.best, v.average, v.worst));
        }
    };
    for (const auto& s : corpus_solves()) {
        ordered(s.scenario);
    }
    for (const auto& r : front_runs()) {
        for (const auto& s : r.front.scenarios) {
            ordered(s);
        }
    }
    return t.outcome(fmt::format("1 kg NOx -> best 95, average 197.5, worst 300; ordering holds on {} triples", triples));
}

Outcome toy_segment_front()
{
    Tally t;
    const auto in = load_instance(samples / "toy-segment.json");
    const auto t0 = Clock::now();
    const auto f  = nnc_front(in, request("min receptor:r1;min receptor:r2", 5));
    const double elapsed = seconds_since(t0);
    t.check(f.scenarios.size() == 5, fmt::format("{} scenarios", f.scenarios.size()));
    const auto objectives = parse_objective_list("min receptor:r1;min receptor:r2");
    std::vector<double> normalized;
    for (std::size_t k = 0; k < f.scenarios.size(); ++k) {
        const auto v = min_values(f.scenarios[k], objectives);
        normalized.push_back((v[0] - f.utopia[0]) / (f.nadir_estimate[0] - f.utopia[0]));
        t.check(std::abs(normalized.back() - 0.25 * double(k)) <= 1e-6, fmt::format("point {}: {}", k, normalized.back()));
        for (std::size_t m = 0; m < f.scenarios.size(); ++m) {
            t.check(m == k || !dominates(min_values(f.scenarios[m], objectives), v, 1e-9), "dominated scenario");
        }
    }
    t.check(elapsed < 1.0, fmt::format("took {:.3f} s", elapsed));
    return t.outcome(fmt::format("normalized first objective {} in {:.3f} s", fmt::join(normalized, ", "), elapsed));
}

Outcome front_properties()
{
    Tally t;
    std::size_t scenarios = 0;
    for (const auto& [c, front] : front_runs()) {
        const auto& objectives = c.request.objectives;
        std::vector<std::vector<double>> values;
        for (const auto& s : front.scenarios) {
            values.push_back(min_values(s, objectives));
        }
        scenarios += values.size();
        t.check(!values.empty(), c.name + ": empty front");
        for (std::size_t a = 0; a < values.size(); ++a) {
            for (std::size_t b = 0; b < values.size(); ++b) {
                t.check(a == b || !dominates(values[a], values[b], 1e-9), fmt::format("{}: {} dominates {}", c.name, a, b));
            }
        }
        for (std::size_t j = 0; j < objectives.size(); ++j) {
            const auto single = solve_plan(c.instance, objectives[j], c.request.extra);
            const double best = min_sense(objectives[j], single.objective_values[0].second);
            double front_best = lp::infinity;
            for (const auto& v : values) {
                front_best = std::min(front_best, v[j]);
            }
            t.check(std::abs(front_best - best) <= scaled(1e-6, best),
                    fmt::format("{}: objective {} front best {} vs anchor {}", c.name, j, front_best, best));
        }
        if (objectives.size() == 2) {
            for (std::size_t s = 1; s < values.size(); ++s) {
                t.check(values[s][0] >= values[s - 1][0] && values[s][1] <= values[s - 1][1],
                        fmt::format("{}: frontier not monotone at {}", c.name, s));
            }
        }
        const auto text = dump(front_to_json(front));
        t.check(dump(front_to_json(nnc_front(c.instance, c.request, ParetoOptions{{}, 1}))) == text,
                c.name + ": repeated run differs");
        t.check(dump(front_to_json(nnc_front(c.instance, c.request, ParetoOptions{{}, 4}))) == text,
                c.name + ": four-thread run differs");
    }
    return t.outcome(fmt::format("{} fronts, {} scenarios: non-dominated, anchors optimal, monotone for n=2, "
                                 "byte-identical on repeat and across thread counts",
                                 front_runs().size(), scenarios));
}

Outcome budget_outcome()
{
    Tally t;
    std::size_t count = 0;
    double worst      = 0.0;
    auto feasible = [&](const PlanInstance& in, const Scenario& s, const std::string& where) {
        ++count;
        const double over  = s.total_cost - in.budget;
        const double under = in.min_outcome - s.total_outcome;
        worst              = std::max({worst, over, under});
        t.check(over <= 1e-6, fmt::format("{}: cost {} over budget {}", where, s.total_cost, in.budget));
        t.check(under <= 1e-6, fmt::format("{}: outcome {} under {}", where, s.total_outcome, in.min_outcome));
    };
    for (const auto& s : corpus_solves()) {
        feasible(*s.instance, s.scenario, s.instance->name);
    }
    for (const auto& [c, front] : front_runs()) {
        for (const auto& s : front.scenarios) {
            feasible(c.instance, s, c.name);
        }
    }
    return t.outcome(fmt::format("{} scenarios, largest excess {}", count, std::max(worst, 0.0)));
}

Outcome service_conformance()
{
    Tally t;
    TempDir empty, work;
    const auto matrix = service_matrix(samples, empty.path);
    for (const auto& c : matrix) {
        const auto local = run_case(c);
        t.check(local.status == c.status, fmt::format("{}: status {} (expected {})", c.name, local.status, c.status));
        try {
            t.check(!c.check || c.check(Json::parse(local.body)), c.name + ": body check");
        } catch (const std::exception& e) {
            t.check(false, c.name + ": " + e.what());
        }
        std::string hash;
        const auto http = run_case_http(c, &hash);
        t.check(http == local, c.name + ": HTTP response differs from in-process");
        t.check(hash == content_hash(http.body), c.name + ": content hash header");
    }

    const Service service(test_config(samples));
    auto cli = [&](const std::string& args) {
        const auto out = work.path / "out.json";
        fs::remove(out);
        const int code = run_command(fmt::format("'{}' {} --out '{}' >/dev/null 2>&1", PLANOPT_CLI, args, out.string()));
        return code == 0 ? read_file(out) : fmt::format("exit {}", code);
    };
    const auto region = (samples / "sample-region.json").string();
    const auto toy    = (samples / "toy-segment.json").string();
    struct Pair
    {
        std::string cli;
        Response service;
    };
    const std::vector<Pair> pairs{
        {cli(fmt::format("solve '{}' --objective 'min total_cost'", region)),
         service.solve(R"({"sample": "sample-region", "objective": "min total_cost"})")},
        {cli(fmt::format("solve '{}' --objective 'max total_outcome' --constraint 'activity:coal >= -100'", region)),
         service.solve(R"({"sample": "sample-region", "objective": "max total_outcome", "constraints": ["activity:coal >= -100"]})")},
        {cli(fmt::format("pareto '{}' --objectives 'min receptor:r1;min receptor:r2' --points 5", toy)),
         service.pareto(R"({"sample": "toy-segment", "objectives": ["min receptor:r1", "min receptor:r2"], "points": 5})")},
        {cli(fmt::format("pareto '{}' --objectives 'min total_cost;max total_outcome' --points 6", region)),
         service.pareto(R"({"sample": "sample-region", "objectives": "min total_cost;max total_outcome", "points": 6})")},
    };
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        t.check(pairs[k].service.status == 200 && pairs[k].cli == pairs[k].service.body,
                fmt::format("pair {}: CLI and service documents differ", k));
    }
    return t.outcome(fmt::format("{}-case request matrix in process and over HTTP; {} CLI/service pairs byte-identical",
                                 matrix.size(), pairs.size()));
}

}

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"lp-oracle", lp_oracle},
        {"milp-enumeration", milp_enumeration},
        {"complementarity", complementarity},
        {"dependency-formula", dependency_formula},
        {"emissions-hand-case", emissions_hand_case},
        {"indicator-fixture", indicator_fixture},
        {"nnc-toy-segment", toy_segment_front},
        {"front-properties", front_properties},
        {"budget-outcome-feasibility", budget_outcome},
        {"service-conformance", service_conformance},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, fmt::format("exception: {}", e.what())};
        }
        failed += o.pass ? 0 : 1;
        fmt::print("{} {}: {}\n", o.pass ? "PASS" : "FAIL", name, o.detail);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
