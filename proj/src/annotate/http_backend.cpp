#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>

#include "annotate/annotate.hpp"

namespace aix::annotate {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // prefix without trailing slash
};

Endpoint split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    fail(ErrorKind::Config, "llm.base_url '{}' has no scheme", url);
  auto path_start = url.find('/', scheme_end + 3);
  Endpoint ep;
  ep.origin = url.substr(0, path_start);
  ep.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!ep.path.empty() && ep.path.back() == '/') ep.path.pop_back();
  return ep;
}

class HttpBackend final : public ChatBackend {
public:
  HttpBackend(const LlmConfig& config, std::string key)
      : endpoint_(split_url(config.base_url)),
        timeout_(config.timeout_seconds),
        key_(std::move(key)) {}

  ChatResponse send(const CallKey&, const std::string& body) override {
    httplib::Client client(endpoint_.origin);
    client.set_connection_timeout(static_cast<time_t>(timeout_), 0);
    client.set_read_timeout(static_cast<time_t>(timeout_), 0);
    client.set_write_timeout(static_cast<time_t>(timeout_), 0);
    httplib::Headers headers{{"Authorization", "Bearer " + key_}};
    auto res = client.Post(endpoint_.path + "/chat/completions", headers, body,
                           "application/json");
    if (!res)
      fail(ErrorKind::Network, "POST {}{}/chat/completions: {}", endpoint_.origin, endpoint_.path,
           httplib::to_string(res.error()));
    return {res->status, res->body};
  }

private:
  Endpoint endpoint_;
  unsigned timeout_;
  std::string key_;
};

}  // namespace

std::unique_ptr<ChatBackend> make_http_backend(const LlmConfig& config) {
  if (config.base_url.empty()) fail(ErrorKind::Config, "llm.base_url is empty");
  const char* key = std::getenv(config.api_key_env.c_str());
  if (key == nullptr || *key == '\0')
    fail(ErrorKind::Config, "llm.api_key_env: environment variable {} is not set",
         config.api_key_env);
  return std::make_unique<HttpBackend>(config, key);
}

}  // namespace aix::annotate
