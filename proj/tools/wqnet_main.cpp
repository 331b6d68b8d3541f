#include <CLI11.hpp>
#include <cstdlib>
#include <string>
#include <vector>

#include "wqnet/wqnet.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string transport;
    std::string golden;
};

void add_common(CLI::App* cmd, CommonArgs& args)
{
    auto* opt = cmd->add_option("-c,--config", args.config_path,
                                "scenario config file (default: $WQNET_CONFIG)");
    (void)opt;
    cmd->add_option("-s,--set", args.overrides, "override a config key, key=value")
        ->take_all();
    cmd->add_option("--golden", args.golden, "record|compare fixture outputs")
        ->check(CLI::IsMember({"record", "compare"}));
}

wqnet::ScenarioConfig load_config(CommonArgs& args)
{
    std::string path = args.config_path;
    if (path.empty()) {
        const char* env = std::getenv("WQNET_CONFIG");
        if (env) path = env;
    }
    if (path.empty())
        throw wqnet::ValidationError("no config file: pass --config or set WQNET_CONFIG");
    auto cfg = wqnet::ScenarioConfig::from_file(path);
    cfg.apply_overrides(args.overrides);
    if (!args.transport.empty()) cfg.set("transport", args.transport);
    return cfg;
}

wqnet::cli::GoldenMode golden_mode(const CommonArgs& args)
{
    if (args.golden == "record") return wqnet::cli::GoldenMode::Record;
    if (args.golden == "compare") return wqnet::cli::GoldenMode::Compare;
    return wqnet::cli::GoldenMode::Off;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"water quality simulation and chlorine injection control"};
    app.require_subcommand(1);

    CommonArgs plan_args, sim_args, ana_args, ctl_args;
    auto* plan = app.add_subcommand("plan", "fix the WQ time-step and per-pipe grids");
    add_common(plan, plan_args);
    auto* sim = app.add_subcommand("simulate", "run the multi-species transport simulation");
    add_common(sim, sim_args);
    sim->add_option("--transport", sim_args.transport, "ar|adr|auto transport selection")
        ->check(CLI::IsMember({"ar", "adr", "auto"}));
    auto* ana = app.add_subcommand("analyze", "controllability analysis and MPC weights");
    add_common(ana, ana_args);
    auto* ctl = app.add_subcommand("control", "receding-horizon injection control");
    add_common(ctl, ctl_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : wqnet::cli::kExitValidation;
    }

    try {
        if (plan->parsed()) return wqnet::cli::cmd_plan(load_config(plan_args), golden_mode(plan_args));
        if (sim->parsed()) return wqnet::cli::cmd_simulate(load_config(sim_args), golden_mode(sim_args));
        if (ana->parsed()) return wqnet::cli::cmd_analyze(load_config(ana_args), golden_mode(ana_args));
        if (ctl->parsed()) return wqnet::cli::cmd_control(load_config(ctl_args), golden_mode(ctl_args));
    } catch (const wqnet::ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return wqnet::cli::kExitValidation;
    }
    return wqnet::cli::kExitValidation;
}
