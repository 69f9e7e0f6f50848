#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "determlr/backends.hpp"

namespace determlr {

Transport http_transport(std::chrono::seconds timeout) {
  return [timeout](const std::string& url, const std::string& body, const std::string& api_key) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error("endpoint needs a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
    auto result = client.Post(path, headers, body, "application/json");
    if (!result) throw std::runtime_error(httplib::to_string(result.error()));
    return HttpResponse{result->status, result->body};
  };
}

}  // namespace determlr
