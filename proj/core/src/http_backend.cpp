#include <regex>
#include <stdexcept>

#include <httplib.h>

#include "valex/error.hpp"
#include "valex/gateway.hpp"

namespace valex {
namespace {

class HttpBackend final : public Backend {
 public:
  HttpBackend(std::string host, int port, std::string path)
      : host_(std::move(host)), port_(port), path_(std::move(path)) {}

  std::string complete(const BackendRequest& request) override {
    httplib::Client client(host_, port_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(request.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(request.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers headers;
    if (!request.credential.empty()) headers.emplace("Authorization", "Bearer " + request.credential);

    httplib::MultipartFormDataItems items;
    items.push_back({"prompt", std::string(request.prompt_text), "", "text/plain"});
    for (const auto& a : request.attachments) {
      const auto slash = a.locator.find_last_of('/');
      const auto filename = slash == std::string::npos ? a.locator : a.locator.substr(slash + 1);
      items.push_back({"attachment", a.bytes, filename, "application/octet-stream"});
    }
    auto result = client.Post(path_, headers, items);
    if (!result) throw std::runtime_error("http: " + httplib::to_string(result.error()));
    if (result->status < 200 || result->status >= 300) {
      throw std::runtime_error("http: status " + std::to_string(result->status));
    }
    return result->body;
  }

 private:
  std::string host_;
  int port_;
  std::string path_;
};

}  // namespace

std::unique_ptr<Backend> make_http_backend(const BackendConfig& cfg) {
  static const std::regex kUrl(R"(^http://([^/:]+)(?::(\d+))?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(cfg.endpoint, m, kUrl)) {
    throw Error(ErrorCode::Configuration, cfg.backend_id + ": endpoint must look like http://host[:port]/path, got '" +
                                              cfg.endpoint + "'");
  }
  const int port = m[2].matched ? std::stoi(m[2].str()) : 80;
  const std::string path = m[3].matched ? m[3].str() : "/";
  return std::make_unique<HttpBackend>(m[1].str(), port, path);
}

}  // namespace valex
