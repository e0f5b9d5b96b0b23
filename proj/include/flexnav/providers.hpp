#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "flexnav/common.hpp"
#include "flexnav/telemetry.hpp"

namespace flexnav {

// ---------------------------------------------------------------------------
// Provider
//
// Every external model role (planner, verifier, follower, tiebreaker,
// perceiver, extractor, scorer) speaks the same wire shape: one request
// string in, one response string out. Role-specific request/response
// encodings are defined by the modules that own each role and documented in
// the README; this uniform boundary is what makes recording, replaying and
// instrumenting any role possible with a single set of wrappers.

class Provider {
public:
    virtual ~Provider() = default;

    // May throw ProviderError on transport or model failure.
    virtual std::string complete(const std::string& request) = 0;
};

using ProviderPtr = std::shared_ptr<Provider>;

// ---------------------------------------------------------------------------
// Scripted provider: canned responses in order, for tests and fixtures.
// A response equal to kFailToken simulates a transport failure.

class ScriptedProvider : public Provider {
public:
    static constexpr const char* kFailToken = "<<FAIL>>";

    ScriptedProvider() = default;
    explicit ScriptedProvider(std::vector<std::string> responses)
        : responses_(std::move(responses)) {}

    // When the script runs out: repeat the last response, or fail if empty.
    void set_repeat_last(bool v) { repeat_last_ = v; }

    std::string complete(const std::string& request) override {
        requests_.push_back(request);
        if (next_ >= responses_.size()) {
            if (repeat_last_ && !responses_.empty()) return check(responses_.back());
            throw ProviderError("scripted provider exhausted after " +
                                std::to_string(responses_.size()) + " responses");
        }
        return check(responses_[next_++]);
    }

    const std::vector<std::string>& requests() const { return requests_; }
    size_t calls() const { return requests_.size(); }

private:
    std::string check(const std::string& r) {
        if (r == kFailToken) throw ProviderError("scripted failure");
        return r;
    }

    std::vector<std::string> responses_;
    std::vector<std::string> requests_;
    size_t next_ = 0;
    bool repeat_last_ = false;
};

// Provider backed by a function, for one-off test behaviors.
class LambdaProvider : public Provider {
public:
    explicit LambdaProvider(std::function<std::string(const std::string&)> fn)
        : fn_(std::move(fn)) {}
    std::string complete(const std::string& request) override { return fn_(request); }

private:
    std::function<std::string(const std::string&)> fn_;
};

// ---------------------------------------------------------------------------
// Record / replay
//
// Recordings are JSONL files, one {"request":..., "response":...} object per
// line, one file per (episode, role). Replay matches by exact request text:
// identical requests are answered in recorded order, so a replayed episode
// is deterministic regardless of what other episodes run concurrently.

class RecordingProvider : public Provider {
public:
    RecordingProvider(ProviderPtr inner, const std::filesystem::path& file)
        : inner_(std::move(inner)), file_(file) {
        std::filesystem::create_directories(file_.parent_path());
    }

    std::string complete(const std::string& request) override {
        std::string response = inner_->complete(request);
        nlohmann::json j{{"request", request}, {"response", response}};
        std::lock_guard<std::mutex> lock(mu_);
        std::ofstream out(file_, std::ios::app);
        out << j.dump() << "\n";
        return response;
    }

private:
    ProviderPtr inner_;
    std::filesystem::path file_;
    std::mutex mu_;
};

class ReplayProvider : public Provider {
public:
    // A missing file is an empty store: the role was never called while
    // recording, and replay only fails if this run tries to call it.
    explicit ReplayProvider(const std::filesystem::path& file) : file_(file.string()) {
        std::ifstream in(file);
        if (!in) return;
        std::string line;
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line);
            queues_[j.at("request").get<std::string>()].push_back(
                j.at("response").get<std::string>());
        }
    }

    std::string complete(const std::string& request) override {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = queues_.find(request);
        if (it == queues_.end() || it->second.empty())
            throw ProviderError("no recorded response in " + file_ +
                                " for request hash " + hash_hex(request));
        std::string response = it->second.front();
        it->second.pop_front();
        return response;
    }

private:
    std::string file_;
    std::map<std::string, std::deque<std::string>> queues_;
    std::mutex mu_;
};

// ---------------------------------------------------------------------------
// Instrumentation: tags calls with a role, charging the episode's ledger and
// trace. Created per episode around a (possibly shared) inner provider.

class InstrumentedProvider : public Provider {
public:
    InstrumentedProvider(ProviderPtr inner, std::string role, CostLedger& ledger, Trace& trace)
        : inner_(std::move(inner)), role_(std::move(role)), ledger_(ledger), trace_(trace) {}

    std::string complete(const std::string& request) override {
        auto t0 = std::chrono::steady_clock::now();
        std::string response = inner_->complete(request);
        double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        ledger_.record(role_, request.size(), response.size(), ms);
        trace_.call(role_, request, response);
        return response;
    }

private:
    ProviderPtr inner_;
    std::string role_;
    CostLedger& ledger_;
    Trace& trace_;
};

// ---------------------------------------------------------------------------
// Concurrency adapters. Providers that declare serialized access or a max
// concurrent call count in their binding get wrapped accordingly; the
// episode scheduler then needs no provider-specific knowledge.

class SerializedProvider : public Provider {
public:
    explicit SerializedProvider(ProviderPtr inner) : inner_(std::move(inner)) {}

    std::string complete(const std::string& request) override {
        std::lock_guard<std::mutex> lock(mu_);
        return inner_->complete(request);
    }

private:
    ProviderPtr inner_;
    std::mutex mu_;
};

class ConcurrencyLimitedProvider : public Provider {
public:
    ConcurrencyLimitedProvider(ProviderPtr inner, int max_concurrent)
        : inner_(std::move(inner)), slots_(max_concurrent) {
        if (max_concurrent < 1) throw ConfigError("max_concurrent must be >= 1");
    }

    std::string complete(const std::string& request) override {
        {
            std::unique_lock<std::mutex> lock(mu_);
            cv_.wait(lock, [&] { return slots_ > 0; });
            --slots_;
        }
        try {
            std::string r = inner_->complete(request);
            release();
            return r;
        } catch (...) {
            release();
            throw;
        }
    }

private:
    void release() {
        std::lock_guard<std::mutex> lock(mu_);
        ++slots_;
        cv_.notify_one();
    }

    ProviderPtr inner_;
    int slots_;
    std::mutex mu_;
    std::condition_variable cv_;
};

// ---------------------------------------------------------------------------
// Retry helper: retries ProviderError up to `budget` extra attempts.
// Other exceptions pass through.

template <typename Fn>
auto with_retries(int budget, const WarnFn& warn, Fn&& fn) -> decltype(fn()) {
    for (int attempt = 0;; ++attempt) {
        try {
            return fn();
        } catch (const ProviderError& e) {
            if (attempt >= budget) throw;
            warn_to(warn, std::string("provider call failed (attempt ") +
                              std::to_string(attempt + 1) + "): " + e.what());
        }
    }
}

}  // namespace flexnav
