#include <applan/agent.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace applan {

using nlohmann::json;

MockChatClient::MockChatClient(std::vector<Entry> script, std::string model)
    : script_(std::move(script)), model_(std::move(model)) {
    if (script_.empty()) throw ConfigError("mock script must contain at least one response");
}

MockChatClient MockChatClient::from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed mock script: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("responses") || !doc["responses"].is_array())
        throw ConfigError("malformed mock script: missing responses array");
    std::vector<Entry> script;
    for (const json& r : doc["responses"]) {
        if (r.is_string()) {
            script.push_back({r.get<std::string>(), std::nullopt});
        } else if (r.is_object() && r.contains("error") && r["error"].is_string()) {
            script.push_back({"", r["error"].get<std::string>()});
        } else {
            throw ConfigError("malformed mock script: responses must be strings or {\"error\": ...}");
        }
    }
    return MockChatClient(std::move(script), doc.value("model", std::string("mock")));
}

MockChatClient MockChatClient::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::string MockChatClient::complete(const std::vector<ChatMessage>&) {
    const Entry& e = script_[std::min(next_, script_.size() - 1)];
    ++next_;
    if (e.error) throw TransportError(*e.error);
    return e.text;
}

std::string redact(std::string text, const std::string& secret) {
    if (secret.empty()) return text;
    std::size_t pos = 0;
    while ((pos = text.find(secret, pos)) != std::string::npos) {
        text.replace(pos, secret.size(), "***");
        pos += 3;
    }
    return text;
}

void AgentConfig::validate() const {
    if (max_iters < 1) throw ConfigError("max_iters must be at least 1");
    if (max_parse_failures < 1) throw ConfigError("max_parse_failures must be at least 1");
    if (map_summary_max < 1) throw ConfigError("map_summary_max must be at least 1");
    radio.validate();
}

void DeploymentHistory::append(HistoryEntry e) {
    entries_.push_back(std::move(e));
    const std::size_t i = entries_.size() - 1;
    auto feasible = [&](std::size_t k) {
        const Residuals& r = entries_[k].eval.residuals;
        return r.e_d == 0.0 && r.e_b == 0.0;
    };
    if (!best_) {
        best_ = i;
        return;
    }
    const bool fi = feasible(i), fb = feasible(*best_);
    if ((fi && !fb) || (fi == fb && entries_[i].eval.coverage > entries_[*best_].eval.coverage)) best_ = i;
}

const HistoryEntry& DeploymentHistory::best() const {
    if (!best_) throw Error("empty history");
    return entries_[*best_];
}

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string deployment_json(const Deployment& p) {
    std::string s = "[";
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (k) s += ", ";
        s += "[" + fmt("%.2f", p[k].x) + ", " + fmt("%.2f", p[k].y) + ", " + fmt("%.2f", p[k].z) + "]";
    }
    return s + "]";
}

}  // namespace

std::string grid_codes(const FloorPlan& fp) {
    std::string s = "[";
    for (std::size_t r = 0; r < fp.rows(); ++r) {
        s += r ? ",\n [" : "[";
        for (std::size_t c = 0; c < fp.cols(); ++c) {
            if (c) s += ", ";
            s += static_cast<char>('0' + static_cast<int>(fp.at(r, c)));
        }
        s += "]";
    }
    return s + "]";
}

std::string build_init_prompt(const FloorPlan& fp, const TaskSpec& task, const AgentConfig& cfg) {
    std::ostringstream o;
    const double s = fp.cell_size();
    o << "Role & Mission: You are a wireless network planning assistant. Given the indoor layout and a fixed "
         "number of APs, propose AP locations to maximize coverage probability under a received power threshold.\n\n"
      << "Building Analysis:\n"
      << "Indoor area coordinates: x in [" << fmt("%.2f", fp.origin_x()) << ", " << fmt("%.2f", fp.x_max())
      << "] m, y in [" << fmt("%.2f", fp.origin_y()) << ", " << fmt("%.2f", fp.y_max()) << "] m, z in ["
      << fmt("%.2f", fp.z_min()) << ", " << fmt("%.2f", fp.z_max()) << "] m; grid cell (row r, column c) spans x in ["
      << fmt("%.2f", fp.origin_x()) << " + " << fmt("%.2f", s) << "*c, " << fmt("%.2f", fp.origin_x()) << " + "
      << fmt("%.2f", s) << "*(c+1)], y in [" << fmt("%.2f", fp.origin_y()) << " + " << fmt("%.2f", s) << "*r, "
      << fmt("%.2f", fp.origin_y()) << " + " << fmt("%.2f", s) << "*(r+1)]\n"
      << "Total indoor area: " << fp.count(CellKind::FreeSpace) << " grid cells\n\n"
      << "Floor Information: " << grid_codes(fp) << "\n"
      << "where the floor information is a 2d array with 0 to 3:\n"
      << "- 0 = free space (preferred for AP placement)\n"
      << "- 1 = wall (avoid placing AP here)\n"
      << "- 2 = window (avoid placing AP here)\n"
      << "- 3 = door (avoid placing AP here)\n\n"
      << "Before generating coordinates, you must think step-by-step.\n"
      << "1) Deployment feasibility constraints:\n"
      << "- Keep the number of APs fixed:" << task.n_aps << ".\n"
      << "- Each AP must be placed in indoor free-space cells only (value 0).\n"
      << "- Minimum separation between the APs: " << fmt("%g", task.d_min_m) << ".\n"
      << "- AP coordinates must remain within the building boundary.\n\n"
      << "2) Coverage definition (pathloss-based):\n"
      << "- Pathloss should be lower than " << fmt("%g", cfg.radio.pathloss_threshold_db) << " dB.\n"
      << "- Interference should be lower than "
      << (std::isfinite(task.interference_threshold_db) ? fmt("%g", task.interference_threshold_db) + " dB above noise"
                                                        : std::string("no limit"))
      << " .\n"
      << "- Throughput should be larger than "
      << (task.throughput_min_bps > 0.0 ? fmt("%g", task.throughput_min_bps / 1e6) + " Mbps" : std::string("0 Mbps"))
      << ".\n\n"
      << "You must keep the following wireless propagation principles:\n\n"
      << "1) Distance-dependent attenuation:\n"
         "   Signal strength decays with distance. Avoid leaving large uncovered areas far from any AP.\n\n"
      << "2) Wall and obstacle penetration loss:\n"
         "   Walls/obstacles introduce additional attenuation. Placing an AP behind multiple walls rarely improves "
         "coverage in the target region.\n\n"
      << "3) Line-of-sight preference:\n"
         "   Prioritize AP locations that provide clear LoS paths to large open regions or key corridors.\n\n"
      << "4) NLoS compensation strategy:\n"
         "   If a region is blocked, cover it by placing an AP inside the region or near entrances/openings, rather "
         "than relying on deep penetration.\n\n"
      << "5) Coverage overlap control:\n"
         "   Some overlap is needed for smooth coverage, but excessive clustering wastes APs. Spread APs to maximize "
         "marginal coverage gain.\n\n"
      << "6) Spatial diversity:\n"
         "   Prefer placing APs in geometrically diverse positions (different rooms/corridors) to reduce redundancy "
         "and shadowed zones.\n\n"
      << "7) Boundary awareness:\n"
         "   Avoid placing APs too close to walls/corners unless needed to cover edge regions; central elevated "
         "positions often produce broader coverage.\n\n"
      << "8) Iterative improvement rule:\n"
         "   Use the verifier feedback to identify the largest uncovered region first, then relocate the most "
         "redundant AP toward that region.\n\n"
      << "Output requirement:\n"
      << "- Always output exactly N AP locations in the required structured format in '[[X1, Y1, Z1], [X2, Y2, Z2], "
         "...]' format without any other text.\n";
    return o.str();
}

std::string constraint_summary(const EvalResult& r, const TaskSpec& task) {
    std::vector<std::string> issues;
    if (r.residuals.e_d > 0.0)
        issues.push_back("minimum-separation violation (APs closer than " + fmt("%g", task.d_min_m) + " m)");
    if (r.residuals.e_b > 0.0) issues.push_back("boundary violation (AP outside free space)");
    if (std::isfinite(task.interference_threshold_db) && r.ior > 0.0)
        issues.push_back("interference violation (IOR " + fmt("%.4f", r.ior) + ")");
    if (task.throughput_min_bps > 0.0 && r.residuals.e_T > 0.0)
        issues.push_back("throughput violation (e_T " + fmt("%.4f", r.residuals.e_T) + ")");
    if (issues.empty()) return "all constraints satisfied";
    std::string s;
    for (std::size_t i = 0; i < issues.size(); ++i) s += (i ? "; " : "") + issues[i];
    return s;
}

std::string coverage_map_summary(const FloorPlan& fp, const RadioMap& map, std::size_t max_dim) {
    if (max_dim < 1) throw ConfigError("map summary size must be positive");
    const std::size_t R = fp.rows(), C = fp.cols();
    const std::size_t br = (R + max_dim - 1) / max_dim, bc = (C + max_dim - 1) / max_dim;
    const std::size_t out_r = (R + br - 1) / br, out_c = (C + bc - 1) / bc;
    std::vector<int> covered(R * C, -1);
    for (std::size_t i = 0; i < map.size(); ++i)
        covered[map.cell_index[i].row * C + map.cell_index[i].col] = map.covered[i] ? 1 : 0;
    std::string s;
    for (std::size_t orow = 0; orow < out_r; ++orow) {
        for (std::size_t ocol = 0; ocol < out_c; ++ocol) {
            std::size_t cov = 0, unc = 0, kinds[4] = {0, 0, 0, 0};
            for (std::size_t r = orow * br; r < std::min(R, (orow + 1) * br); ++r)
                for (std::size_t c = ocol * bc; c < std::min(C, (ocol + 1) * bc); ++c) {
                    const int v = covered[r * C + c];
                    if (v == 1) ++cov;
                    else if (v == 0) ++unc;
                    else ++kinds[static_cast<int>(fp.at(r, c))];
                }
            char ch;
            if (cov + unc > 0) {
                ch = cov >= unc ? '5' : '4';
            } else {
                int best = 1;
                for (int k = 2; k < 4; ++k)
                    if (kinds[k] > kinds[best]) best = k;
                ch = static_cast<char>('0' + best);
            }
            s += ch;
        }
        s += '\n';
    }
    return s;
}

std::string build_refine_prompt(const DeploymentHistory& history, const std::string& map_summary,
                                const TaskSpec& task) {
    if (history.empty()) throw Error("empty history");
    const HistoryEntry& best = history.best();
    std::ostringstream o;
    o << "Role & Mission: You receive the current best deployment and its evaluation results from the physical "
         "verifier.\n"
      << "If such feedback is available, you MUST treat the current best deployment as the baseline and perform a "
         "refinement rather than re-planning from scratch.\n\n"
      << "Current best deployment: " << deployment_json(best.deployment) << "\n\n"
      << "Verifier feedback for the baseline:\n"
      << "- Coverage score: " << fmt("%.2f", best.eval.coverage) << "\n"
      << "- Constraint status: " << constraint_summary(best.eval, task) << "\n"
      << "- Visual summary from coverage maps:\n"
      << map_summary << "\n"
      << "Refinement policy:\n\n"
      << "- Identify the largest uncovered region (4: not covered, 5: covered) indicated by the feedback.\n\n"
      << "- Prefer relocating APs that contribute the least marginal gain or lie in redundant clusters.\n\n"
      << "- Move APs toward the uncovered region, while preserving already well-covered areas.\n\n"
      << "- Avoid moving many APs simultaneously. Update only a small subset of APs in one iteration.\n\n"
      << "- If interference violations are reported, reduce excessive overlap by increasing spatial separation "
         "among nearby APs.\n\n"
      << "- If throughput violations are reported, prioritize improving service to those regions by placing an AP "
         "closer with fewer obstructions.\n\n"
      << "Output requirement:\n\n"
      << "- Always output exactly N AP locations in the required structured format in '[[X1, Y1, Z1], [X2, Y2, Z2], "
         "...]' format without any other text.\n\n"
      << "- Do not output intermediate analysis. Provide only the final updated deployment.\n";
    return o.str();
}

Deployment parse_deployment(const std::string& text, std::size_t n) {
    const std::size_t start = text.find("[[");
    if (start == std::string::npos) throw Error("no deployment block found");
    int depth = 0;
    std::size_t end = std::string::npos;
    for (std::size_t i = start; i < text.size(); ++i) {
        if (text[i] == '[') ++depth;
        else if (text[i] == ']' && --depth == 0) {
            end = i;
            break;
        }
    }
    if (end == std::string::npos) throw Error("unterminated deployment block");
    json doc;
    try {
        doc = json::parse(text.substr(start, end - start + 1));
    } catch (const json::exception&) {
        throw Error("deployment block is not a list of numeric triples");
    }
    if (doc.size() != n)
        throw Error("expected " + std::to_string(n) + " AP triples, got " + std::to_string(doc.size()));
    Deployment out;
    for (const json& t : doc) {
        if (!t.is_array() || t.size() != 3) throw Error("each AP must have exactly 3 coordinates");
        double v[3];
        for (int a = 0; a < 3; ++a) {
            if (!t[a].is_number()) throw Error("coordinates must be numbers");
            v[a] = t[a].get<double>();
            if (!std::isfinite(v[a])) throw Error("coordinates must be finite");
        }
        out.push_back({v[0], v[1], v[2]});
    }
    return out;
}

Deployment repair_deployment(const FloorPlan& fp, const Deployment& p, bool* changed) {
    Deployment out = p;
    bool any = false;
    for (Position& q : out) {
        const Position before = q;
        q.z = std::clamp(q.z, fp.z_min(), fp.z_max());
        if (!is_feasible_position(fp, q)) q = snap_to_free_cell(fp, q);
        any = any || !(q == before);
    }
    if (changed) *changed = any;
    return out;
}

namespace {

json messages_json(const std::vector<ChatMessage>& m) {
    json a = json::array();
    for (const ChatMessage& x : m) a.push_back({{"role", x.role}, {"content", x.content}});
    return a;
}

json deployment_array(const Deployment& p) {
    json a = json::array();
    for (const Position& q : p) a.push_back({q.x, q.y, q.z});
    return a;
}

}  // namespace

AgentResult run_agent_loop(ChatClient& client, const FloorPlan& fp, const TaskSpec& task, const AgentConfig& cfg) {
    cfg.validate();
    task.validate();
    AgentResult res;
    std::ofstream log;
    if (!cfg.transcript_path.empty()) {
        log.open(cfg.transcript_path, std::ios::trunc);
        if (!log) throw ConfigError("cannot write " + cfg.transcript_path);
    }
    auto record = [&](json entry) {
        std::string line = entry.dump();
        if (log) log << line << '\n' << std::flush;
        res.transcript.push_back(std::move(line));
    };
    auto finish = [&]() {
        if (!res.history.empty()) res.best = res.history.best().deployment;
    };

    const std::string init = build_init_prompt(fp, task, cfg);
    std::size_t parse_failures = 0;
    for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
        res.iterations = it;
        std::vector<ChatMessage> msgs{{"system", init}};
        if (res.history.empty()) {
            msgs.push_back({"user", "Propose the initial deployment of " + std::to_string(task.n_aps) + " APs."});
        } else {
            const RadioMap map = compute_radio_map(fp, res.history.best().deployment, cfg.radio);
            msgs.push_back({"user", build_refine_prompt(res.history, coverage_map_summary(fp, map, cfg.map_summary_max),
                                                        task)});
        }

        std::string reply;
        bool ok = false;
        for (int attempt = 1; attempt <= 2 && !ok; ++attempt) {
            try {
                reply = client.complete(msgs);
                ok = true;
            } catch (const TransportError& e) {
                record({{"iteration", it}, {"attempt", attempt}, {"model", client.model()},
                        {"request", messages_json(msgs)}, {"response", nullptr}, {"error", e.what()}});
                if (attempt == 2) {
                    finish();
                    throw AgentAborted(std::string("transport failure: ") + e.what(), std::move(res));
                }
            }
        }

        json entry = {{"iteration", it}, {"model", client.model()}, {"request", messages_json(msgs)},
                      {"response", reply}};
        Deployment proposed;
        try {
            proposed = parse_deployment(reply, task.n_aps);
        } catch (const Error& e) {
            entry["error"] = std::string("parse: ") + e.what();
            record(std::move(entry));
            if (++parse_failures >= cfg.max_parse_failures) {
                finish();
                throw AgentAborted("aborted after " + std::to_string(parse_failures) +
                                       " consecutive unparseable replies: " + e.what(),
                                   std::move(res));
            }
            continue;
        }
        parse_failures = 0;

        HistoryEntry h;
        h.iteration = it;
        h.proposed = proposed;
        h.deployment = repair_deployment(fp, proposed, &h.repaired);
        h.eval = evaluate(fp, h.deployment, task, cfg.radio);
        h.feedback = constraint_summary(h.eval, task);
        entry["parsed"] = deployment_array(proposed);
        entry["repaired"] = h.repaired;
        entry["deployment"] = deployment_array(h.deployment);
        entry["coverage"] = h.eval.coverage;
        entry["success"] = h.eval.success;
        entry["feedback"] = h.feedback;
        record(std::move(entry));
        const bool hit = h.eval.success;
        res.history.append(std::move(h));
        if (cfg.stop_on_target && hit) {
            res.reached_target = true;
            break;
        }
    }
    finish();
    return res;
}

}  // namespace applan
