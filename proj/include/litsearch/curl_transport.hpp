#pragma once

#include <chrono>

#include "litsearch/entrez.hpp"

namespace litsearch {

// Live HTTPS transport backed by libcurl. One easy handle per request, so an
// instance may be shared across threads.
class CurlTransport final : public Transport {
 public:
  explicit CurlTransport(std::chrono::seconds timeout = std::chrono::seconds(60));
  HttpResponse get(const HttpRequest& request) override;

 private:
  std::chrono::seconds timeout_;
};

}  // namespace litsearch
