#pragma once

#include <chrono>
#include <string>

#include <json.hpp>

namespace rtlrc::http {

// "http://host[:port]/path" split into the parts cpp-httplib wants.
struct Endpoint {
    std::string base;  // scheme://host:port
    std::string path;  // begins with '/'
};

Endpoint parse_endpoint(const std::string& url);

struct RequestOptions {
    std::chrono::milliseconds timeout{120'000};
    int retries = 2;
    std::chrono::milliseconds backoff{200};  // doubled on every retry
};

// POSTs a JSON body and parses a JSON response. Connection failures, 429 and
// 5xx are retried; any other non-2xx status throws immediately.
// Throws HttpError (status 0 on transport failure) or Timeout.
nlohmann::json post_json(const Endpoint& endpoint, const nlohmann::json& body,
                         const RequestOptions& opts);

}  // namespace rtlrc::http
