#include "rtlrc/http.hpp"

#include <thread>

#include <httplib.h>

#include "rtlrc/error.hpp"

namespace rtlrc::http {

Endpoint parse_endpoint(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint '" + url + "' has no scheme");
    auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https")
        throw ConfigError("endpoint '" + url + "': unsupported scheme '" + scheme + "'");
    auto path_start = url.find('/', scheme_end + 3);
    Endpoint ep;
    if (path_start == std::string::npos) {
        ep.base = url;
        ep.path = "/";
    } else {
        ep.base = url.substr(0, path_start);
        ep.path = url.substr(path_start);
    }
    if (ep.base.size() <= scheme_end + 3) throw ConfigError("endpoint '" + url + "' has no host");
    return ep;
}

nlohmann::json post_json(const Endpoint& endpoint, const nlohmann::json& body,
                         const RequestOptions& opts) {
    const std::string payload = body.dump();
    auto backoff = opts.backoff;
    int status = 0;
    std::string detail;
    bool timed_out = false;

    for (int attempt = 0; attempt <= opts.retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        httplib::Client client(endpoint.base);
        client.set_connection_timeout(opts.timeout);
        client.set_read_timeout(opts.timeout);
        client.set_write_timeout(opts.timeout);

        auto res = client.Post(endpoint.path, payload, "application/json");
        if (!res) {
            timed_out = res.error() == httplib::Error::Read ||
                        res.error() == httplib::Error::ConnectionTimeout;
            status = 0;
            detail = endpoint.base + endpoint.path + ": " + httplib::to_string(res.error());
            continue;
        }
        status = res->status;
        if (status >= 200 && status < 300) {
            try {
                return nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::parse_error& e) {
                throw HttpError(status, endpoint.base + endpoint.path +
                                            ": response is not JSON: " + e.what());
            }
        }
        detail = endpoint.base + endpoint.path + ": HTTP " + std::to_string(status) + ": " +
                 res->body.substr(0, 200);
        timed_out = false;
        if (status != 429 && status < 500) break;
    }
    if (timed_out) throw Timeout(detail);
    throw HttpError(status, detail);
}

}  // namespace rtlrc::http
