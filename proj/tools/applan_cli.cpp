#include <applan/applan.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string config;
    std::optional<uint64_t> seed;
    std::string out;
    std::optional<std::string> method, task, provider;
    std::optional<std::size_t> particles;
    std::optional<double> temperature;
};

using Entry = applan_status (*)(const char*, char**);

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return json::parse(ss.str());
}

std::string default_out(const std::string& command, const Options& o) {
    std::string dir = "runs/" + command;
    if (!o.config.empty()) dir += "_" + fs::path(o.config).stem().string();
    if (o.seed) dir += "_s" + std::to_string(*o.seed);
    return dir;
}

int run(const std::string& command, Entry entry, const Options& o, bool needs_config) {
    json req = json::object();
    if (!o.config.empty()) {
        req["config"] = load_config(o.config);
        req["base_dir"] = fs::absolute(o.config).parent_path().string();
    } else if (needs_config) {
        std::cerr << command << ": --config is required\n";
        return 2;
    }
    req["out"] = o.out.empty() ? default_out(command, o) : o.out;
    if (o.seed) req["seed"] = *o.seed;
    if (o.method) req["method"] = *o.method;
    if (o.task) req["task"] = *o.task;
    if (o.provider) req["provider"] = *o.provider;
    if (o.particles) req["particles"] = *o.particles;
    if (o.temperature) req["temperature"] = *o.temperature;

    char* result = nullptr;
    const applan_status st = entry(req.dump().c_str(), &result);
    if (result) {
        const json res = json::parse(result);
        applan_string_free(result);
        if (res.contains("report")) std::cout << res["report"].get<std::string>();
        else std::cout << res.dump(2) << "\n";
    }
    std::cerr << "outputs in " << req["out"].get<std::string>() << "\n";
    if (st != APPLAN_OK) {
        std::cerr << command << " failed: " << applan_last_error() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Indoor access point planning: floorplans, propagation, samplers and benchmarks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", applan_version());

    Options o;
    struct Command {
        const char* name;
        const char* help;
        Entry entry;
        bool needs_config;
    };
    const Command commands[] = {
        {"gen-floorplan", "generate a synthetic floorplan", applan_gen_floorplan, false},
        {"simulate", "compute the radio map and metrics of a deployment", applan_simulate, true},
        {"plan", "plan a deployment with one method", applan_plan, true},
        {"train-reward", "train the coverage regressor", applan_train_reward, true},
        {"bench", "run a method x task x seed grid", applan_bench, true},
        {"ablate", "sweep particles or temperature for diffusion", applan_ablate, true},
        {"agent", "run the propose-verify-refine loop with a chat model", applan_agent, true},
    };
    for (const Command& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "seed (bench and ablate: first of the configured seed range)");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--method", o.method, "diffusion, smc_gaussian, smc_langevin, gradient or agent");
        sub->add_option("--task", o.task, "restrict to the task with this name");
        sub->add_option("--particles", o.particles, "particle count")->check(CLI::PositiveNumber);
        sub->add_option("--temperature", o.temperature, "sampling temperature 1/beta")->check(CLI::PositiveNumber);
        sub->add_option("--provider", o.provider, "exact, smooth or learned");
    }
    CLI11_PARSE(app, argc, argv);

    for (const Command& c : commands)
        if (app.got_subcommand(c.name)) {
            try {
                return run(c.name, c.entry, o, c.needs_config);
            } catch (const std::exception& e) {
                std::cerr << c.name << ": " << e.what() << "\n";
                return 1;
            }
        }
    return 2;
}
