#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "magvir/errors.hpp"
#include "magvir/lab.hpp"

using namespace magvir;

namespace {

int report(const std::vector<RunResult>& rs) {
    bool ok = true;
    for (const auto& r : rs) {
        std::cout << r.id << ": " << (r.passed ? "PASS" : "FAIL");
        if (r.partial) std::cout << " (partial)";
        std::cout << '\n';
        if (!r.error.empty()) std::cout << "  error: " << r.error << '\n';
        for (const auto& a : r.assertions)
            std::cout << "  " << (a.pass ? "ok   " : "FAIL ") << a.name << " = " << a.value << " (limit " << a.limit << ")\n";
        if (!r.summary_path.empty()) std::cout << "  summary: " << r.summary_path << '\n';
        ok = ok && r.passed;
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"magvir: magnetic virial experiments"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::vector<std::string> configs, scenarios;
    std::string out = "out";
    int threads = 1;
    std::uint64_t seed = 0;
    bool no_checkpoints = false;
    auto* run = app.add_subcommand("run", "run scenarios from config files or the registry");
    run->add_option("--config", configs, "config file (repeatable)");
    run->add_option("--scenario", scenarios, "registered scenario id (repeatable, 'all' for every one)");
    run->add_option("--out", out, "output directory");
    run->add_option("--threads", threads, "worker pool size")->check(CLI::PositiveNumber);
    auto* seed_opt = run->add_option("--seed", seed, "override the config seed");
    run->add_flag("--no-checkpoints", no_checkpoints, "skip binary state checkpoints");

    app.add_subcommand("list-scenarios", "print registered scenario ids");

    std::string id;
    auto* desc = app.add_subcommand("describe", "describe a registered scenario");
    desc->add_option("id", id)->required();

    std::string dump_id, dump_out;
    auto* dump = app.add_subcommand("dump-config", "write a registered scenario's config as JSON");
    dump->add_option("id", dump_id)->required();
    dump->add_option("--out", dump_out, "file (stdout if omitted)");

    std::string fx_out = "tests/fixtures/derived.json";
    auto* fx = app.add_subcommand("fixtures", "regenerate the oracle fixture file");
    fx->add_option("--out", fx_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            std::vector<json> cfgs;
            for (const auto& s : scenarios) {
                if (s == "all")
                    for (const auto& info : scenario_registry()) cfgs.push_back(info.config);
                else
                    cfgs.push_back(find_scenario(s).config);
            }
            for (const auto& p : configs) {
                std::ifstream is(p);
                if (!is) throw ConfigError("cannot open config " + p);
                try {
                    cfgs.push_back(json::parse(is));
                } catch (const json::parse_error& e) {
                    throw ConfigError("config " + p + " does not parse: " + e.what());
                }
            }
            if (cfgs.empty()) throw ArgumentError("run needs --config or --scenario");
            // validate everything up front so a bad file fails before any work
            for (const auto& c : cfgs) validate_config(c);
            RunOptions opt;
            opt.out_dir = out;
            opt.has_seed = seed_opt->count() > 0;
            opt.seed = seed;
            opt.checkpoints = !no_checkpoints;
            return report(run_many(cfgs, opt, threads));
        }
        if (app.got_subcommand("list-scenarios")) {
            for (const auto& s : list_scenarios()) std::cout << s << '\n';
            return 0;
        }
        if (*desc) {
            std::cout << describe(id);
            return 0;
        }
        if (*dump) {
            const std::string text = find_scenario(dump_id).config.dump(2) + "\n";
            if (dump_out.empty()) std::cout << text;
            else std::ofstream(dump_out) << text;
            return 0;
        }
        if (*fx) {
            std::ofstream os(fx_out);
            if (!os) throw ArgumentError("cannot write " + fx_out);
            os << derived_fixtures().dump(2) << '\n';
            std::cout << "wrote " << fx_out << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
