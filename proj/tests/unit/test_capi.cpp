// Uses only the C header and the shared library.
#include <applan/applan.h>

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string data_dir() {
    const char* dir = std::getenv("APPLAN_TEST_DATA");
    return dir ? dir : "tests/data";
}

std::string scratch(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("applan_capi_" + tag);
    fs::remove_all(p);
    return p.string();
}

struct Call {
    applan_status status;
    json result;
};

Call call(applan_status (*entry)(const char*, char**), const json& request) {
    char* out = nullptr;
    const applan_status st = entry(request.dump().c_str(), &out);
    Call c{st, json()};
    if (out) {
        c.result = json::parse(out);
        applan_string_free(out);
    }
    return c;
}

}  // namespace

TEST_CASE("version and error state") {
    CHECK(std::string(applan_version()) == "0.1.0");
    applan_floorplan* fp = nullptr;
    CHECK(applan_floorplan_load_json(nullptr, &fp) == APPLAN_ERR_ARGUMENT);
    CHECK(std::string(applan_last_error()).size() > 0);
    CHECK(applan_floorplan_load_json("{not json", &fp) == APPLAN_ERR_CONFIG);
    CHECK(fp == nullptr);
    CHECK(applan_floorplan_from_spec("{\"builtin\": \"open_room\"}", nullptr, &fp) == APPLAN_OK);
    CHECK(std::string(applan_last_error()).empty());
    applan_floorplan_free(fp);
    applan_floorplan_free(nullptr);
}

TEST_CASE("floorplan handles") {
    applan_floorplan* fp = nullptr;
    REQUIRE(applan_floorplan_generate(2, 12.0, 9.0, 5, 0.5, &fp) == APPLAN_OK);
    applan_floorplan_info info{};
    REQUIRE(applan_floorplan_get_info(fp, &info) == APPLAN_OK);
    CHECK(info.level == 2);
    CHECK(info.cell_size_m == 0.5);
    CHECK(info.free_cells > 0);
    CHECK(info.free_cells < info.rows * info.cols);

    char* text = nullptr;
    REQUIRE(applan_floorplan_to_json(fp, &text) == APPLAN_OK);
    applan_floorplan* copy = nullptr;
    REQUIRE(applan_floorplan_load_json(text, &copy) == APPLAN_OK);
    char* text2 = nullptr;
    REQUIRE(applan_floorplan_to_json(copy, &text2) == APPLAN_OK);
    CHECK(std::string(text) == std::string(text2));
    applan_string_free(text);
    applan_string_free(text2);
    applan_floorplan_free(copy);
    applan_floorplan_free(fp);

    CHECK(applan_floorplan_generate(9, 12.0, 9.0, 5, 0.5, &fp) == APPLAN_ERR_CONFIG);
    CHECK(applan_floorplan_load_file("/nonexistent/plan.json", &fp) != APPLAN_OK);
}

TEST_CASE("evaluation through handles") {
    applan_floorplan* fp = nullptr;
    REQUIRE(applan_floorplan_from_spec("{\"builtin\": \"open_room\"}", ".", &fp) == APPLAN_OK);
    int feasible = -1;
    REQUIRE(applan_floorplan_is_feasible(fp, 3.0, 3.0, 1.5, &feasible) == APPLAN_OK);
    CHECK(feasible == 1);
    REQUIRE(applan_floorplan_is_feasible(fp, 3.0, 3.0, 9.0, &feasible) == APPLAN_OK);
    CHECK(feasible == 0);

    const double xyz[3] = {3.0, 3.0, 1.5};
    applan_eval ev{};
    REQUIRE(applan_evaluate(fp, xyz, 1, "{\"n_aps\": 1, \"coverage_target\": 0.9}", &ev) == APPLAN_OK);
    CHECK(ev.coverage == 1.0);
    CHECK(ev.success == 1);
    CHECK(ev.e_phy == 0.0);
    double r = 0.0;
    REQUIRE(applan_exact_reward(fp, xyz, 1, "{\"n_aps\": 1}", &r) == APPLAN_OK);
    CHECK(r == 1.0);

    CHECK(applan_evaluate(fp, xyz, 1, "{\"aps\": 1}", &ev) == APPLAN_ERR_CONFIG);
    CHECK(std::string(applan_last_error()).find("aps") != std::string::npos);
    CHECK(applan_evaluate(fp, nullptr, 1, nullptr, &ev) == APPLAN_ERR_ARGUMENT);
    CHECK(applan_evaluate(fp, xyz, 0, nullptr, &ev) == APPLAN_ERR_CONFIG);
    applan_floorplan_free(fp);
}

TEST_CASE("run entry points") {
    const std::string base = data_dir();

    const std::string gen_out = scratch("gen");
    Call g = call(applan_gen_floorplan, {{"config", {{"level", 1}, {"width_m", 8.0}, {"height_m", 6.0}}},
                                         {"seed", 4},
                                         {"out", gen_out}});
    REQUIRE(g.status == APPLAN_OK);
    CHECK(g.result["connected"] == true);
    CHECK(fs::exists(fs::path(gen_out) / "floorplan.json"));
    CHECK(fs::exists(fs::path(gen_out) / "manifest.json"));

    const std::string sim_out = scratch("sim");
    Call s = call(applan_simulate, {{"config",
                                     {{"task", {{"floorplan", {{"builtin", "open_room"}}}}},
                                      {"deployment", json::parse("[[3.0, 3.0, 1.5]]")}}},
                                    {"out", sim_out}});
    REQUIRE(s.status == APPLAN_OK);
    CHECK(s.result["eval"]["coverage"] == 1.0);
    CHECK(fs::exists(fs::path(sim_out) / "radio_map.csv"));
    CHECK(fs::exists(fs::path(sim_out) / "heatmaps" / "sinr_db.pgm"));

    const json plan_cfg = {{"task", {{"floorplan", {{"builtin", "open_room"}}}}},
                           {"method", "gradient"},
                           {"sampler", {{"steps", 5}}}};
    Call p = call(applan_plan, {{"config", plan_cfg}, {"seed", 1}, {"base_dir", base}});
    REQUIRE(p.status == APPLAN_OK);
    CHECK(p.result["seed"] == 1);
    CHECK(p.result["eval"]["success"] == true);

    const json bench_cfg = {{"methods", {"gradient"}},
                            {"tasks", {{{"floorplan", {{"builtin", "open_room"}}}}}},
                            {"seeds", {0, 1}},
                            {"sampler", {{"steps", 5}}}};
    Call b = call(applan_bench, {{"config", bench_cfg}});
    REQUIRE(b.status == APPLAN_OK);
    CHECK(b.result["rows"][0]["trials"] == 2);
    CHECK(b.result["report"].get<std::string>().find("gradient") != std::string::npos);

    json ablate_cfg = bench_cfg;
    ablate_cfg["ablation"] = {{"parameter", "particles"}, {"values", {2, 3}}};
    Call a = call(applan_ablate, {{"config", ablate_cfg}});
    REQUIRE(a.status == APPLAN_OK);
    CHECK(a.result["rows"].size() == 2);
    CHECK(a.result["rows"][1]["particles"] == 3.0);
    ablate_cfg["ablation"]["parameter"] = "steps";
    CHECK(call(applan_ablate, {{"config", ablate_cfg}}).status == APPLAN_ERR_CONFIG);

    const json agent_cfg = {{"task", {{"floorplan", {{"builtin", "open_room"}}}}},
                            {"agent", {{"mock_script", "mock_success.json"}}}};
    Call ok = call(applan_agent, {{"config", agent_cfg}, {"base_dir", base}});
    REQUIRE(ok.status == APPLAN_OK);
    CHECK(ok.result["reached_target"] == true);

    json failing = agent_cfg;
    failing["agent"]["mock_script"] = "mock_parse_failures.json";
    const std::string agent_out = scratch("agent");
    Call bad = call(applan_agent, {{"config", failing}, {"base_dir", base}, {"out", agent_out}});
    CHECK(bad.status == APPLAN_ERR_ABORTED);
    CHECK(bad.result["history"].empty());
    CHECK(bad.result["error"].get<std::string>().find("consecutive") != std::string::npos);
    CHECK(fs::exists(fs::path(agent_out) / "transcript.jsonl"));
}

TEST_CASE("request errors") {
    char* out = nullptr;
    CHECK(applan_bench(nullptr, &out) == APPLAN_ERR_ARGUMENT);
    CHECK(applan_bench("{}", nullptr) == APPLAN_ERR_ARGUMENT);
    CHECK(call(applan_bench, {{"config", json::object()}, {"colour", 1}}).status == APPLAN_ERR_CONFIG);
    CHECK(call(applan_bench, {{"config", {{"methods", {"annealing"}}}}}).status == APPLAN_ERR_CONFIG);
    CHECK(call(applan_bench, {{"config", json::object()}, {"particles", 0}}).status == APPLAN_ERR_CONFIG);
    CHECK(call(applan_simulate, {{"config", {{"task", json::object()}}}}).status == APPLAN_ERR_CONFIG);
    CHECK(call(applan_train_reward, {{"config", {{"floorplans", json::array()}}}}).status == APPLAN_ERR_CONFIG);
}
