#include "glrdose/service.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <httplib.h>
#include <iostream>
#include <random>

#include "glrdose/commands.hpp"
#include "glrdose/isotonic.hpp"

namespace glrdose {

namespace {

std::string new_trial_id() {
    static std::mutex mutex;
    static std::mt19937_64 gen{std::random_device{}()};
    std::lock_guard lock(mutex);
    char buf[24];
    std::snprintf(buf, sizeof buf, "t%016llx", static_cast<unsigned long long>(gen()));
    return buf;
}

ServiceError not_found(const std::string& id) { return {404, "not_found", "no trial with id '" + id + "'"}; }

ServiceError invalid(const std::string& message) { return {400, "invalid_request", message}; }

Json history_to_json(const std::vector<CohortEntry>& history) {
    Json out = Json::array();
    for (const CohortEntry& e : history) {
        Json j{{"dose", e.dose},
               {"cohort_size", e.size},
               {"dlt_count", e.dlt},
               {"action", std::string(to_string(e.action))},
               {"eliminated", e.eliminated}};
        if (e.log_glr) {
            j["log_glr"] = *e.log_glr;
            j["glr"] = std::exp(*e.log_glr);
        }
        out.push_back(std::move(j));
    }
    return out;
}

}  // namespace

Json step_to_json(const StepResult& step) {
    Json j{{"action", std::string(to_string(step.decision.action))},
           {"design_action", std::string(to_string(step.design_decision.action))},
           {"eliminated", step.decision.eliminate_current},
           {"next_dose", step.next_dose},
           {"stopped", step.state.stopped}};
    if (step.glr) {
        j["glr"] = step.glr->value();
        j["log_glr"] = step.glr->log_value;
        j["glr_display"] = format_glr(*step.glr);
    } else {
        j["glr"] = nullptr;
    }
    return j;
}

TrialStore::TrialStore(std::filesystem::path data_dir) : dir_(std::move(data_dir)) {
    std::filesystem::create_directories(dir_);
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") load(entry.path());
    }
}

std::filesystem::path TrialStore::log_path(const std::string& id) const { return dir_ / (id + ".jsonl"); }

void TrialStore::append_event(const std::string& id, const Json& event) const {
    const std::string line = event.dump() + "\n";
    const int fd = ::open(log_path(id).c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd < 0) throw std::runtime_error("cannot open trial log: " + std::string(std::strerror(errno)));
    const ssize_t written = ::write(fd, line.data(), line.size());
    const int synced = ::fsync(fd);
    ::close(fd);
    if (written != static_cast<ssize_t>(line.size()) || synced != 0) {
        throw std::runtime_error("failed to persist trial event");
    }
}

void TrialStore::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    std::string line;
    std::shared_ptr<Trial> trial;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const Json event = Json::parse(line);
        const std::string type = event.at("type").get<std::string>();
        if (type == "created") {
            trial = std::make_shared<Trial>();
            trial->id = event.at("id").get<std::string>();
            trial->settings = settings_from_json(event.at("settings"));
            trial->state = initial_state(trial->settings);
            if (event.contains("idempotency_key") && !event["idempotency_key"].is_null()) {
                trial->idempotency_key = event["idempotency_key"].get<std::string>();
            }
        } else if (type == "cohort" && trial) {
            trial->state = step(trial->state, trial->settings, event.at("cohort_size").get<int>(),
                                event.at("dlt_count").get<int>())
                               .state;
            trial->version = event.at("version").get<long>();
        }
    }
    if (!trial) return;
    if (trial->idempotency_key) by_idempotency_key_[*trial->idempotency_key] = trial->id;
    trials_[trial->id] = std::move(trial);
}

std::shared_ptr<TrialStore::Trial> TrialStore::find(const std::string& id) const {
    std::shared_lock lock(map_mutex_);
    const auto it = trials_.find(id);
    if (it == trials_.end()) throw not_found(id);
    return it->second;
}

CreateResult TrialStore::create(const TrialSettings& settings, const std::optional<std::string>& idempotency_key) {
    try {
        settings.validate();
    } catch (const std::invalid_argument& e) {
        throw invalid(e.what());
    }
    std::unique_lock lock(map_mutex_);
    if (idempotency_key) {
        const auto it = by_idempotency_key_.find(*idempotency_key);
        if (it != by_idempotency_key_.end()) return {it->second, false};
    }
    auto trial = std::make_shared<Trial>();
    trial->id = new_trial_id();
    trial->settings = settings;
    trial->state = initial_state(settings);
    trial->idempotency_key = idempotency_key;
    Json event{{"type", "created"},
               {"schema_version", kApiSchemaVersion},
               {"id", trial->id},
               {"version", 1},
               {"settings", settings_to_json(settings)},
               {"idempotency_key", idempotency_key ? Json(*idempotency_key) : Json(nullptr)}};
    append_event(trial->id, event);
    if (idempotency_key) by_idempotency_key_[*idempotency_key] = trial->id;
    trials_[trial->id] = trial;
    return {trial->id, true};
}

Recommendation TrialStore::record_cohort(const std::string& id, int dlt_count, int cohort_size,
                                         long expected_version) {
    const auto trial = find(id);
    std::lock_guard lock(trial->mutex);
    if (trial->version != expected_version) {
        throw ServiceError(409, "version_conflict",
                           "expected version " + std::to_string(expected_version) + " but trial is at version " +
                               std::to_string(trial->version));
    }
    if (trial->state.stopped) throw ServiceError(409, "trial_stopped", "trial has stopped");
    if (cohort_size < 1 || dlt_count < 0 || dlt_count > cohort_size) {
        throw invalid("need cohort_size >= 1 and 0 <= dlt_count <= cohort_size");
    }
    StepResult result = step(trial->state, trial->settings, cohort_size, dlt_count);
    const long next_version = trial->version + 1;
    append_event(id, Json{{"type", "cohort"},
                          {"version", next_version},
                          {"cohort_size", cohort_size},
                          {"dlt_count", dlt_count}});
    trial->state = result.state;
    trial->version = next_version;
    return {std::move(result), next_version};
}

std::vector<Projection> TrialStore::what_if(const std::string& id, std::optional<int> cohort_size) const {
    const auto trial = find(id);
    std::lock_guard lock(trial->mutex);
    if (trial->state.stopped) throw ServiceError(409, "trial_stopped", "trial has stopped");
    const int size = cohort_size.value_or(trial->settings.cohort_size);
    if (size < 1) throw invalid("cohort_size must be >= 1");
    std::vector<Projection> out;
    for (int x = 0; x <= size; ++x) out.push_back({x, step(trial->state, trial->settings, size, x)});
    return out;
}

long TrialStore::version(const std::string& id) const {
    const auto trial = find(id);
    std::lock_guard lock(trial->mutex);
    return trial->version;
}

TrialSettings TrialStore::settings(const std::string& id) const {
    const auto trial = find(id);
    std::lock_guard lock(trial->mutex);
    return trial->settings;
}

std::vector<std::string> TrialStore::ids() const {
    std::shared_lock lock(map_mutex_);
    std::vector<std::string> out;
    for (const auto& [id, _] : trials_) out.push_back(id);
    return out;
}

Json TrialStore::snapshot(const std::string& id) const {
    const auto trial = find(id);
    std::lock_guard lock(trial->mutex);
    const TrialState& s = trial->state;
    const TargetRate phi = trial->settings.phi;

    int highest_tried = 0;
    for (std::size_t i = 0; i < s.per_dose.size(); ++i) {
        if (s.per_dose[i].n > 0) highest_tried = static_cast<int>(i) + 1;
    }
    Json fitted = Json::array();
    if (highest_tried > 0) {
        const std::span<const DoseData> tried(s.per_dose.data(), static_cast<std::size_t>(highest_tried));
        for (double p : pava_mle(tried)) fitted.push_back(p);
    }
    Json doses = Json::array();
    for (std::size_t i = 0; i < s.per_dose.size(); ++i) {
        const DoseData& d = s.per_dose[i];
        Json j{{"dose", i + 1}, {"n", d.n}, {"x", d.x}};
        j["observed_rate"] = d.n > 0 ? Json(d.observed_rate()) : Json(nullptr);
        j["fitted_rate"] = i < fitted.size() ? fitted[i] : Json(nullptr);
        doses.push_back(std::move(j));
    }
    return Json{{"schema_version", kApiSchemaVersion},
                {"id", trial->id},
                {"version", trial->version},
                {"settings", settings_to_json(trial->settings)},
                {"current_dose", s.current_dose},
                {"stopped", s.stopped},
                {"cohorts_treated", s.cohorts_treated},
                {"eliminated_at_or_above", s.eliminated_at_or_above ? Json(*s.eliminated_at_or_above) : Json(nullptr)},
                {"doses", doses},
                {"fitted_rates", fitted},
                {"estimated_mtd", final_mtd(s, phi)},
                {"history", history_to_json(s.history)}};
}

// HTTP ------------------------------------------------------------------------

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
    send_json(res, status, Json{{"schema_version", kApiSchemaVersion}, {"code", code}, {"message", message}});
}

template <class Handler>
httplib::Server::Handler guarded(Handler handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
        try {
            handler(req, res);
        } catch (const ServiceError& e) {
            send_error(res, e.status(), e.code(), e.what());
        } catch (const Json::exception& e) {
            send_error(res, 400, "invalid_json", e.what());
        } catch (const std::invalid_argument& e) {
            send_error(res, 400, "invalid_request", e.what());
        } catch (const std::logic_error& e) {
            send_error(res, 409, "invalid_state", e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, "internal", e.what());
        }
    };
}

Json parse_body(const httplib::Request& req) {
    if (req.body.empty()) throw invalid("request body must be a JSON object");
    Json body = Json::parse(req.body);
    if (!body.is_object()) throw invalid("request body must be a JSON object");
    return body;
}

int int_param(const httplib::Request& req, const char* name, int fallback) {
    if (!req.has_param(name)) return fallback;
    try {
        return std::stoi(req.get_param_value(name));
    } catch (const std::exception&) {
        throw invalid(std::string("query parameter '") + name + "' must be an integer");
    }
}

}  // namespace

void register_routes(httplib::Server& server, TrialStore& store) {
    server.Get("/healthz", guarded([](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, Json{{"schema_version", kApiSchemaVersion}, {"status", "ok"}});
    }));

    server.Post("/trials", guarded([&store](const httplib::Request& req, httplib::Response& res) {
        const Json body = parse_body(req);
        std::optional<std::string> key;
        if (req.has_header("Idempotency-Key")) key = req.get_header_value("Idempotency-Key");
        if (body.contains("idempotency_key") && body["idempotency_key"].is_string()) {
            key = body["idempotency_key"].get<std::string>();
        }
        TrialSettings settings = [&] {
            try {
                return settings_from_json(body);
            } catch (const std::invalid_argument& e) {
                throw ServiceError(422, "invalid_spec", e.what());
            }
        }();
        const CreateResult created = store.create(settings, key);
        send_json(res, created.created ? 201 : 200,
                  Json{{"schema_version", kApiSchemaVersion},
                       {"id", created.id},
                       {"created", created.created},
                       {"trial", store.snapshot(created.id)}});
    }));

    server.Get(R"(/trials/([A-Za-z0-9_-]+))", guarded([&store](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, store.snapshot(req.matches[1]));
    }));

    server.Post(R"(/trials/([A-Za-z0-9_-]+)/cohorts)",
                guarded([&store](const httplib::Request& req, httplib::Response& res) {
                    const std::string id = req.matches[1];
                    const Json body = parse_body(req);
                    if (!body.contains("dlt_count") || !body.contains("expected_version")) {
                        throw invalid("cohort body needs dlt_count and expected_version");
                    }
                    const int size = body.value("cohort_size", store.settings(id).cohort_size);
                    const Recommendation rec = store.record_cohort(id, body.at("dlt_count").get<int>(), size,
                                                                   body.at("expected_version").get<long>());
                    Json out = step_to_json(rec.step);
                    out["schema_version"] = kApiSchemaVersion;
                    out["version"] = rec.version;
                    out["trial"] = store.snapshot(id);
                    send_json(res, 200, out);
                }));

    server.Get(R"(/trials/([A-Za-z0-9_-]+)/what-if)",
               guarded([&store](const httplib::Request& req, httplib::Response& res) {
                   const std::string id = req.matches[1];
                   std::optional<int> size;
                   if (req.has_param("cohort_size")) size = int_param(req, "cohort_size", 0);
                   const long version = store.version(id);
                   Json rows = Json::array();
                   for (const Projection& p : store.what_if(id, size)) {
                       Json j = step_to_json(p.step);
                       j["dlt_count"] = p.dlt_count;
                       rows.push_back(std::move(j));
                   }
                   send_json(res, 200,
                             Json{{"schema_version", kApiSchemaVersion}, {"version", version}, {"projections", rows}});
               }));

    server.Get(R"(/trials/([A-Za-z0-9_-]+)/decision-table)",
               guarded([&store](const httplib::Request& req, httplib::Response& res) {
                   const TrialSettings settings = store.settings(req.matches[1]);
                   const int n_min = int_param(req, "n_min", 1);
                   const int n_max = int_param(req, "n_max", std::min(50, settings.cohort_size * 4));
                   OutputTable table = [&] {
                       try {
                           return decision_table(settings.design, settings.phi, n_min, n_max);
                       } catch (const std::invalid_argument& e) {
                           throw ServiceError(422, "not_tabulable", e.what());
                       }
                   }();
                   Json rendered = Json::parse(render(table, OutputFormat::Json));
                   rendered["schema_version"] = kApiSchemaVersion;
                   send_json(res, 200, rendered);
               }));
}

int serve(const std::string& host, int port, const std::filesystem::path& data_dir) {
    TrialStore store(data_dir);
    httplib::Server server;
    register_routes(server, store);
    std::cerr << "glrdose: serving on " << host << ":" << port << " (data: " << data_dir.string() << ")\n";
    return server.listen(host, port) ? 0 : 1;
}

}  // namespace glrdose
