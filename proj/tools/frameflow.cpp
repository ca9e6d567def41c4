#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "frameflow/cli.hpp"

int main(int argc, char** argv) {
    using namespace frameflow;
    CLI::App app{"frameflow: transfer operators and frame-flow mixing experiments on Schottky groups"};
    app.set_version_flag("--version", version());
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out;
    std::uint64_t seed = 0;
    int depth = 0;
    int threads = 0;
    auto* opt_config = app.add_option("--config", config_path, "JSON run configuration")->envname("FRAMEFLOW_CONFIG");
    auto* opt_out = app.add_option("--out", out, "output directory")->envname("FRAMEFLOW_OUT");
    auto* opt_seed = app.add_option("--seed", seed, "random seed")->envname("FRAMEFLOW_SEED");
    auto* opt_depth = app.add_option("--depth", depth, "cylinder depth")->envname("FRAMEFLOW_DEPTH");
    auto* opt_threads = app.add_option("--threads", threads, "worker threads (0 = auto)")->envname("FRAMEFLOW_THREADS");
    opt_config->required();

    for (const auto& name : commands()) app.add_subcommand(name, "run " + name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
        Overrides o;
        if (*opt_out) o.out = out;
        if (*opt_seed) o.seed = seed;
        if (*opt_depth) o.depth = depth;
        if (*opt_threads) o.threads = threads;
        apply_overrides(cfg, o);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    return run_command(command, cfg, std::cerr);
}
