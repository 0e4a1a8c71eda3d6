// Command-line entry point for the experiment harness.
//
//   listop <scenario> --config <path> [--seed S] [--out PATH] [--threads K]
//
// Exit codes: 0 success, 2 invalid input/configuration, 3 enumeration budget
// exceeded.  LISTOP_BUDGET overrides the default enumeration cap.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "listop/experiment.hpp"

namespace {

const char* const kSchemaFooter =
    R"(Scenarios and CSV column orders:
  xor-ld / aggregate-ld / fold-ld
      trial,seed,t,n0,n,N,distinct,injective,union_bound,ld_verdict,ld_witness
  subcode-ld
      trial,seed,p,N0,L0,L,N,distinct,distinct_ok,ld_verdict,ld_witness
  cluster-lb
      trial,seed,retained,captured,cluster,certified_list
  concat-decode
      trial,seed,recovered,list_size,picked_agreement
  johnson-audit
      instance,seed,q,n,N,L,lists,violations,min_margin
  replacement-test
      config,seed,kind,q,n0,N,L,n,t,mean_with,mean_without,delta,z_score
  estimate-E
      scenario_id,kind,n0,n,N,L,t,trials,seed,mean,std_dev,bound,fitted_C

Every CSV starts with '#' comment lines echoing the resolved configuration,
the enumeration budget, and scenario-derived quantities.  Floating-point
cells carry 17 significant digits.  Output is written atomically.

Environment:
  LISTOP_BUDGET   positive integer overriding the enumeration budget
)";

std::uint64_t parse_budget_env(const char* text) {
    const std::string s(text);
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw listop::input_error("LISTOP_BUDGET must be a positive base-10 integer, got '" +
                                  s + "'");
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (errno == ERANGE || end != s.c_str() + s.size() || v == 0)
        throw listop::input_error("LISTOP_BUDGET must be a positive base-10 integer, got '" +
                                  s + "'");
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "listop: randomized row/column operations on code matrices, with "
        "list-decoding oracles and agreement-expectation estimators"};
    app.footer(kSchemaFooter);

    std::string scenario;
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    std::uint32_t threads = 1;

    std::string scenario_help = "one of:";
    for (const auto& s : listop::scenario_names()) scenario_help += " " + s;
    app.add_option("scenario", scenario, scenario_help)->required();
    app.add_option("--config", config_path, "JSON experiment config")->required();
    auto* seed_opt = app.add_option("--seed", seed, "override master_seed");
    auto* out_opt = app.add_option("--out", out_path, "override the output path");
    app.add_option("--threads", threads, "worker threads over trials (default 1)")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        listop::ExperimentConfig cfg = listop::load_experiment_config(config_path);
        if (!cfg.scenario.empty() && cfg.scenario != scenario)
            throw listop::input_error("config names scenario '" + cfg.scenario +
                                      "' but the command line asked for '" + scenario +
                                      "'");
        cfg.scenario = scenario;
        if (seed_opt->count() > 0) cfg.master_seed = seed;
        if (out_opt->count() > 0) cfg.output = out_path;

        listop::RunContext ctx;
        ctx.threads = threads;
        if (const char* env = std::getenv("LISTOP_BUDGET"))
            ctx.budget = parse_budget_env(env);

        listop::run_experiment(cfg, ctx);
        return 0;
    } catch (const listop::budget_error& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
