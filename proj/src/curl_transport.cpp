#include "litsearch/curl_transport.hpp"

#include <memory>
#include <mutex>

#include <curl/curl.h>

#include "litsearch/error.hpp"

namespace litsearch {

namespace {

std::once_flag curl_init;

std::size_t append_body(char* data, std::size_t size, std::size_t count, void* user) {
  static_cast<std::string*>(user)->append(data, size * count);
  return size * count;
}

}  // namespace

CurlTransport::CurlTransport(std::chrono::seconds timeout) : timeout_(timeout) {
  std::call_once(curl_init, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });
}

HttpResponse CurlTransport::get(const HttpRequest& request) {
  std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> handle(curl_easy_init(), &curl_easy_cleanup);
  if (!handle) throw NetworkError("curl_easy_init failed");

  const std::string url = request.full_url();
  HttpResponse response;
  char errbuf[CURL_ERROR_SIZE] = {0};
  curl_easy_setopt(handle.get(), CURLOPT_URL, url.c_str());
  curl_easy_setopt(handle.get(), CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(handle.get(), CURLOPT_TIMEOUT, static_cast<long>(timeout_.count()));
  curl_easy_setopt(handle.get(), CURLOPT_USERAGENT, "litsearch/" LITSEARCH_VERSION);
  curl_easy_setopt(handle.get(), CURLOPT_ACCEPT_ENCODING, "");
  curl_easy_setopt(handle.get(), CURLOPT_ERRORBUFFER, errbuf);
  curl_easy_setopt(handle.get(), CURLOPT_WRITEFUNCTION, &append_body);
  curl_easy_setopt(handle.get(), CURLOPT_WRITEDATA, &response.body);

  CURLcode rc = curl_easy_perform(handle.get());
  if (rc != CURLE_OK) {
    throw NetworkError(std::string("GET ") + request.url + " failed: " +
                       (errbuf[0] ? errbuf : curl_easy_strerror(rc)));
  }
  long status = 0;
  curl_easy_getinfo(handle.get(), CURLINFO_RESPONSE_CODE, &status);
  response.status = static_cast<int>(status);
  return response;
}

}  // namespace litsearch
