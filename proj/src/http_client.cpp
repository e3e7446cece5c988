#include "http_client.hpp"

#include <thread>

#include <httplib.h>

#include "hetqa/error.hpp"

namespace hetqa::detail {

namespace {

// "http://host:port/prefix" -> {"http://host:port", "/prefix"}
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    const auto scheme = endpoint.find("://");
    const auto host_start = scheme == std::string::npos ? 0 : scheme + 3;
    const auto slash = endpoint.find('/', host_start);
    if (slash == std::string::npos) return {endpoint, ""};
    std::string prefix = endpoint.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {endpoint.substr(0, slash), prefix};
}

}  // namespace

nlohmann::json post_json(const std::string& endpoint, const std::string& route,
                         const nlohmann::json& body, const RetryPolicy& policy) {
    const auto [base, prefix] = split_endpoint(endpoint);
    const std::string path = prefix + route;
    const std::string payload = body.dump();
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(policy.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(policy.timeout - secs);

    std::string last_error = "no attempt made";
    auto delay = policy.backoff;
    const int attempts = std::max(1, policy.max_attempts);
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        httplib::Client client(base);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());
        auto res = client.Post(path, payload, "application/json");
        if (!res) {
            last_error = "request failed: " + httplib::to_string(res.error());
        } else if (res->status != 200) {
            last_error = "HTTP status " + std::to_string(res->status);
        } else {
            try {
                return nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::exception& e) {
                last_error = std::string("invalid JSON response: ") + e.what();
            }
        }
        if (attempt < attempts) {
            std::this_thread::sleep_for(delay);
            delay *= 2;
        }
    }
    throw RemoteError("POST " + endpoint + route + " failed after " + std::to_string(attempts) +
                      " attempts: " + last_error);
}

}  // namespace hetqa::detail
