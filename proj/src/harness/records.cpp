// Copyright 2026 The qbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <fstream>

#include <json.hpp>

#include "qbench/errors.hpp"
#include "qbench/harness.hpp"

namespace qbench::harness {

using nlohmann::ordered_json;

std::string job_id(const std::string &scenario, ModelKind model, std::size_t k_gibbs, std::size_t repetition) {
    std::string id = scenario + ":" + to_string(model);
    if (model == ModelKind::Rbm) {
        id += "-k" + std::to_string(k_gibbs);
    }
    return id + ":r" + std::to_string(repetition);
}

namespace {

ordered_json record_body(const RunRecord &r) {
    ordered_json j;
    j["id"] = r.id;
    j["scenario_id"] = r.scenario_id;
    j["n"] = r.n;
    j["kappa"] = r.kappa;
    j["rho"] = r.rho;
    j["subset_index"] = r.subset_index;
    j["assets"] = r.assets;
    j["model"] = to_string(r.model);
    if (r.model == ModelKind::Rbm) {
        j["k_gibbs"] = r.k_gibbs;
    } else {
        j["k_gibbs"] = nullptr;
    }
    j["repetition"] = r.repetition;
    j["seed"] = r.seed;
    j["status"] = r.ok ? "ok" : "failed";
    if (!r.ok) {
        j["error"] = r.error;
    }
    j["final_kl"] = r.ok ? ordered_json(r.final_kl) : ordered_json(nullptr);
    j["baseline_kl"] = r.baseline_kl;
    j["evaluations"] = r.evaluations;
    auto hist = ordered_json::array();
    for (const auto &h : r.history) {
        hist.push_back(ordered_json::array({h.step, h.best, h.median}));
    }
    j["history"] = std::move(hist);
    j["params"] = r.params;
    j["params_hash"] = r.params_hash;
    return j;
}

} // namespace

std::string to_json_line(const RunRecord &r) {
    ordered_json j = record_body(r);
    j["wall_time_s"] = r.wall_time_s;
    return j.dump();
}

std::string canonical_line(const RunRecord &r) { return record_body(r).dump(); }

RunRecord record_from_json(const std::string &line) {
    RunRecord r;
    try {
        const auto j = nlohmann::json::parse(line);
        r.id = j.at("id").get<std::string>();
        r.scenario_id = j.at("scenario_id").get<std::string>();
        r.n = j.at("n").get<std::size_t>();
        r.kappa = j.at("kappa").get<std::size_t>();
        r.rho = j.at("rho").get<double>();
        r.subset_index = j.at("subset_index").get<std::size_t>();
        r.assets = j.at("assets").get<std::vector<std::size_t>>();
        r.model = parse_model(j.at("model").get<std::string>());
        r.k_gibbs = j.at("k_gibbs").is_null() ? 0 : j.at("k_gibbs").get<std::size_t>();
        r.repetition = j.at("repetition").get<std::size_t>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.ok = j.at("status").get<std::string>() == "ok";
        if (!r.ok) {
            r.error = j.value("error", std::string{});
        }
        r.final_kl = j.at("final_kl").is_null() ? 0.0 : j.at("final_kl").get<double>();
        r.baseline_kl = j.at("baseline_kl").get<double>();
        r.evaluations = j.at("evaluations").get<std::size_t>();
        for (const auto &h : j.at("history")) {
            r.history.push_back({h.at(0).get<std::size_t>(), h.at(1).get<double>(), h.at(2).get<double>()});
        }
        r.params = j.at("params").get<std::vector<double>>();
        r.params_hash = j.at("params_hash").get<std::string>();
        r.wall_time_s = j.value("wall_time_s", 0.0);
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(std::string("run record: ") + e.what(), 1, 1);
    }
    return r;
}

ResultStore::ResultStore(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(target_dir(), ec);
    if (ec) {
        throw IoError("cannot create result store at " + root_.string() + ": " + ec.message());
    }
}

std::vector<RunRecord> ResultStore::load() const {
    std::vector<RunRecord> out;
    std::ifstream in(records_path());
    if (!in) {
        return out;
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        try {
            out.push_back(record_from_json(line));
        } catch (const ParseError &e) {
            throw ParseError(e.what(), line_no, 1);
        }
    }
    return out;
}

std::set<std::string> ResultStore::completed_ids() const {
    std::set<std::string> ids;
    for (const auto &r : load()) {
        ids.insert(r.id);
    }
    return ids;
}

void ResultStore::append(const RunRecord &r) {
    const std::string line = to_json_line(r);
    std::lock_guard lock(mutex_);
    std::ofstream out(records_path(), std::ios::app);
    if (!out) {
        throw IoError("cannot append to " + records_path().string());
    }
    out << line << '\n';
    out.flush();
}

void ResultStore::save_scenario(const Scenario &s) const {
    const auto path = target_dir() / (s.id + ".target.json");
    if (!std::filesystem::exists(path)) {
        frontier::save_target(path, s.target);
    }
}

void ResultStore::bind_settings(const std::string &fingerprint) const {
    const auto path = root_ / "settings.json";
    if (std::filesystem::exists(path)) {
        std::ifstream in(path);
        const std::string stored((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        if (stored != fingerprint + "\n") {
            throw ConfigError("result store " + root_.string() +
                              " was produced with different training settings (see settings.json)");
        }
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << fingerprint << '\n';
}

} // namespace qbench::harness
