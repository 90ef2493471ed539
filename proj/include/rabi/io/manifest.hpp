// manifest.hpp: JSON record written next to every run's artifacts

#pragma once

#include <chrono>
#include <string>
#include <utility>

#include <json.hpp>

#include "rabi/io/config.hpp"
#include "rabi/version.hpp"

namespace rabi::io {

using json = nlohmann::ordered_json;

inline constexpr int kManifestSchemaVersion = 1;

class RunManifest {
public:
    explicit RunManifest(std::string subcommand) : start_(clock::now()) {
        doc_["schema_version"] = kManifestSchemaVersion;
        doc_["library"] = "rabi";
        doc_["version"] = kVersion;
        doc_["subcommand"] = std::move(subcommand);
        doc_["status"] = "running";
        doc_["exit_code"] = nullptr;
        doc_["error"] = nullptr;
        doc_["config"] = nullptr;
        doc_["stages"] = json::array();
        doc_["artifacts"] = json::array();
        doc_["warnings"] = json::array();
        doc_["diagnostics"] = json::object();
    }

    void set_config(const RunConfig& cfg) {
        json c = json::object();
        for (const auto& [key, field] : detail::fields()) c[key] = field.write(cfg);
        doc_["config"] = std::move(c);
    }

    // Runs f() and records its wall time under `name`.
    template <class F>
    decltype(auto) stage(const std::string& name, F&& f) {
        const auto t0 = clock::now();
        struct Record {
            RunManifest* m;
            std::string name;
            clock::time_point t0;
            ~Record() { m->doc_["stages"].push_back({{"name", name}, {"wall_seconds", seconds_since(t0)}}); }
        } record{this, name, t0};
        return f();
    }

    void artifact(const std::string& name) { doc_["artifacts"].push_back(name); }
    void warn(const std::string& w) { doc_["warnings"].push_back(w); }
    json& diagnostics() { return doc_["diagnostics"]; }

    void finish(int exit_code, const std::string& error_kind = {}, const std::string& message = {}) {
        doc_["exit_code"] = exit_code;
        doc_["status"] = exit_code == 0 ? "ok" : exit_code == 1 ? "validation-error" : "numerical-error";
        if (!error_kind.empty()) doc_["error"] = {{"kind", error_kind}, {"message", message}};
        doc_["wall_seconds"] = seconds_since(start_);
    }

    const json& document() const { return doc_; }
    std::string dump() const { return doc_.dump(2) + "\n"; }

private:
    using clock = std::chrono::steady_clock;
    static double seconds_since(clock::time_point t0) {
        return std::chrono::duration<double>(clock::now() - t0).count();
    }

    clock::time_point start_;
    json doc_;
};

} // namespace rabi::io
