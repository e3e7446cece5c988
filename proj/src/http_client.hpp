#pragma once

#include <chrono>
#include <string>

#include <json.hpp>

namespace hetqa::detail {

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds backoff{200};
    std::chrono::milliseconds timeout{30000};
};

/// POSTs `body` to endpoint + route and returns the parsed JSON response.
/// Transport errors, non-200 statuses and unparseable bodies are retried with
/// exponential backoff; the last failure is raised as RemoteError.
nlohmann::json post_json(const std::string& endpoint, const std::string& route,
                         const nlohmann::json& body, const RetryPolicy& policy);

}  // namespace hetqa::detail
