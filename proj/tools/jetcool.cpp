#include <iostream>

#include <CLI11.hpp>

#include "jetcool/cli.hpp"

int main(int argc, char** argv) {
    using namespace jetcool;
    CLI::App app{"Jet impingement cooler design and analysis toolkit", "jetcool"};
    cli::Options opt;
    std::string format = "csv";
    app.add_option("command", opt.command, "predict | explore | pareto | cop | hotspot | topo | reduce | gci | benchmark")
        ->required()
        ->check(CLI::IsMember(cli::commands()));
    app.add_option("--config", opt.config, "run configuration file");
    app.add_option("--out", opt.out, "output directory")->capture_default_str();
    app.add_option("--format", format, "table output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_flag("--selftest", opt.selftest, "topo: run the Poiseuille refinement check instead of a problem");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    opt.format = cli::parse_format(format);
    return cli::run(opt, std::cout, std::cerr);
}
