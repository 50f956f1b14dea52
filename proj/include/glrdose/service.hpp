// service.hpp - trial-conduct store and its JSON-over-HTTP front end.
//
// Each trial is an append-only JSON-lines event log in the data directory:
// one "created" event followed by one "cohort" event per accepted cohort.
// State is rebuilt by replaying the log through the trial engine.
#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "glrdose/engine.hpp"
#include "glrdose/json_io.hpp"

namespace httplib {
class Server;
}

namespace glrdose {

inline constexpr int kApiSchemaVersion = 1;

/// Error surfaced to API clients as {"code", "message"} with an HTTP status.
class ServiceError : public std::runtime_error {
public:
    ServiceError(int status, std::string code, const std::string& message)
        : std::runtime_error(message), status_(status), code_(std::move(code)) {}

    int status() const { return status_; }
    const std::string& code() const { return code_; }

private:
    int status_;
    std::string code_;
};

struct CreateResult {
    std::string id;
    bool created = true;  // false when an idempotency key matched an existing trial
};

struct Recommendation {
    StepResult step;
    long version = 0;
};

struct Projection {
    int dlt_count = 0;
    StepResult step;
};

class TrialStore {
public:
    /// Opens (creating if needed) `data_dir` and replays every trial log in it.
    explicit TrialStore(std::filesystem::path data_dir);

    CreateResult create(const TrialSettings& settings, const std::optional<std::string>& idempotency_key = {});

    /// Applies one cohort if `expected_version` matches the current version.
    /// The event is on disk before this returns.
    Recommendation record_cohort(const std::string& id, int dlt_count, int cohort_size, long expected_version);

    /// Projected recommendation for every possible outcome of the next cohort.
    std::vector<Projection> what_if(const std::string& id, std::optional<int> cohort_size = {}) const;

    /// Read-only snapshot: settings, state, audit history, isotonic fit over
    /// tried doses and the MTD estimate so far.
    Json snapshot(const std::string& id) const;

    long version(const std::string& id) const;
    TrialSettings settings(const std::string& id) const;
    std::vector<std::string> ids() const;

private:
    struct Trial {
        std::string id;
        TrialSettings settings;
        TrialState state;
        long version = 1;
        std::optional<std::string> idempotency_key;
        mutable std::mutex mutex;
    };

    std::shared_ptr<Trial> find(const std::string& id) const;
    std::filesystem::path log_path(const std::string& id) const;
    void append_event(const std::string& id, const Json& event) const;
    void load(const std::filesystem::path& file);

    std::filesystem::path dir_;
    mutable std::shared_mutex map_mutex_;
    std::map<std::string, std::shared_ptr<Trial>> trials_;
    std::map<std::string, std::string> by_idempotency_key_;
};

/// JSON form of a step outcome as returned by the cohort and what-if endpoints.
Json step_to_json(const StepResult& step);

/// Installs the API routes on `server`:
///   POST /trials, GET /trials/{id}, POST /trials/{id}/cohorts,
///   GET /trials/{id}/what-if, GET /trials/{id}/decision-table, GET /healthz.
void register_routes(httplib::Server& server, TrialStore& store);

/// Blocking server loop.
int serve(const std::string& host, int port, const std::filesystem::path& data_dir);

}  // namespace glrdose
