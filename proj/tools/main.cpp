#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "app/commands.hpp"
#include "app/config.hpp"

namespace {

struct FlagSet {
    std::map<std::string, std::string> values;
    std::string config_file;
    bool quick = false;
};

void add_common(CLI::App* sub, FlagSet& flags, bool with_corpus) {
    for (const char* name : {"x", "kmax", "cutoff", "threads", "cache-dir", "out", "seed"})
        sub->add_option(std::string("--") + name, flags.values[name]);
    if (with_corpus) sub->add_option("--corpus", flags.values["corpus"], "tuple corpus, one 'N k m1 n1 ...' per line");
    sub->add_flag("--quick", flags.quick, "reduced scale");
    sub->add_option("--config", flags.config_file, "key=value settings file");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace pslab::app;
    CLI::App cli{"pslab: prime sums of two squares laboratory"};
    cli.require_subcommand(1);

    FlagSet flags;
    struct Entry {
        const char* name;
        const char* help;
        bool corpus;
    };
    const Entry commands[] = {
        {"sweep", "prime-pair sweep: moments.csv, massfn.csv, omega.csv", false},
        {"singular", "singular series of a tuple corpus: singular.csv", true},
        {"constants", "heuristic constants: constants.json, exponents.csv", false},
        {"fk", "exact f_k and f_k* counts with sieve ratios: fk.csv", true},
        {"massfn", "mass function table: massfn.csv", false},
        {"verify", "run every acceptance criterion", false},
    };
    for (const auto& c : commands) add_common(cli.add_subcommand(c.name, c.help), flags, c.corpus);

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }
    const std::string command = cli.get_subcommands().front()->get_name();

    try {
        Settings given;
        auto* sub = cli.get_subcommand(command);
        for (const auto& [key, value] : flags.values)
            if (sub->get_option_no_throw("--" + key) && sub->count("--" + key)) given[key] = value;
        if (flags.quick) given["quick"] = "true";
        const Settings file = flags.config_file.empty() ? Settings{} : read_config_file(flags.config_file);
        const RunConfig config = resolve_config(command, read_environment(), file, given);
        return run_command(config, std::cout, std::cerr);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}
