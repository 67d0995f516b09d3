#include <iostream>
#include <locale>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "d2dsim/cli.hpp"

int main(int argc, char** argv)
{
    using namespace d2dsim;

    std::cout.imbue(std::locale::classic());

    CLI::App app{"Slotted D2D spectrum-rental simulator (OMA/NOMA mode selection)"};
    app.require_subcommand(1);

    cli::RunRequest req;
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    std::string policy = "proposed";
    unsigned threads = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--seed", seed, "Master seed");
        sub->add_option("--out", out_path, "Output CSV path");
        sub->add_option("--set", req.overrides, "Override key=value (repeatable)")->take_all();
        sub->add_option("--policy", policy, "proposed|all-noma|all-oma|random");
        sub->add_option("--threads", threads, "Worker threads for repetitions")
            ->check(CLI::Range(1u, 1024u));
    };
    auto* run = app.add_subcommand("run", "Run one episode and write a per-slot CSV");
    auto* compare = app.add_subcommand("compare", "Monte Carlo comparison of all policies");
    auto* threshold = app.add_subcommand("threshold", "Report omega, rho* and the switch slot");
    for (auto* sub : {run, compare, threshold}) {
        add_common(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    auto* active = app.get_subcommands().front();
    if (active->count("--config") > 0) {
        req.config_path = config_path;
    }
    if (active->count("--out") > 0) {
        req.out_path = out_path;
    }
    if (active->count("--seed") > 0) {
        req.seed = seed;
    }
    req.threads = threads;

    try {
        req.policy = parse_policy(policy);
        if (active == run) {
            req.command = cli::Command::Run;
            cli::cmd_run(req, std::cout);
        } else if (active == compare) {
            req.command = cli::Command::Compare;
            cli::cmd_compare(req, std::cout);
        } else {
            req.command = cli::Command::Threshold;
            cli::cmd_threshold(req, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
