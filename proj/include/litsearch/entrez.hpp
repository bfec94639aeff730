#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "litsearch/corpus.hpp"
#include "litsearch/rate_limiter.hpp"

namespace litsearch {

// ---------------------------------------------------------------------------
// Transport

struct HttpRequest {
  std::string url;
  std::vector<std::pair<std::string, std::string>> params;

  // Value of the first parameter named `key`, or empty.
  std::string param(const std::string& key) const;
  // url?k=v&... with percent-encoded values.
  std::string full_url() const;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Every network operation goes through this interface. Implementations
// throw NetworkError for connection-level failures and return the response
// for anything the server answered, whatever the status.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse get(const HttpRequest& request) = 0;
};

std::string url_encode(const std::string& value);

// ---------------------------------------------------------------------------
// Request parameters

struct Credentials {
  std::optional<std::string> email;
  std::optional<std::string> tool;
  std::optional<std::string> api_key;

  // ENTREZ_API_KEY / ENTREZ_EMAIL.
  static Credentials from_environment();
};

struct Date {
  int year = 0;
  int month = 1;
  int day = 1;

  std::string to_entrez() const;  // YYYY/MM/DD
  friend auto operator<=>(const Date&, const Date&) = default;
};

int days_in_month(int year, int month);

// Inclusive publication-date range.
struct DateWindow {
  Date from;
  Date to;

  static DateWindow year(int y);
  static DateWindow month(int y, int m);
  static DateWindow day(int y, int m, int d);
  // Everything published up to the end of `y`.
  static DateWindow through_year(int y);

  friend bool operator==(const DateWindow&, const DateWindow&) = default;
};

struct FetchSpec {
  std::string query;
  int year = 0;
  std::optional<std::size_t> per_month_cap;  // nullopt = unlimited
  Credentials credentials;
};

// ---------------------------------------------------------------------------
// Client

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
};

struct ClientOptions {
  Credentials credentials;
  // Defaults to 3 without an API key and 10 with one.
  std::optional<std::size_t> requests_per_second;
  RetryPolicy retry;
  std::string base_url = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/";
  std::size_t efetch_batch = 200;
  std::size_t esearch_page = 10000;
  // PubMed serves at most this many ids for one query; larger windows are split.
  std::size_t max_window_records = 10000;
  std::shared_ptr<Clock> clock = default_clock();
};

struct SearchPage {
  std::size_t total_hits = 0;
  std::vector<std::string> ids;
};

struct FetchResult {
  std::vector<DocumentRecord> records;
  // Requested ids that came back without an abstract or not at all.
  std::vector<std::string> skipped;
  std::size_t malformed = 0;
};

class EntrezClient {
 public:
  EntrezClient(std::shared_ptr<Transport> transport, ClientOptions options = {});

  SearchPage esearch(const FetchSpec& spec, const DateWindow& window, std::size_t offset,
                     std::size_t page_size);

  // Pages through a window until every hit has been collected or `limit`
  // ids are in hand.
  SearchPage esearch_all(const FetchSpec& spec, const DateWindow& window,
                         std::optional<std::size_t> limit = std::nullopt);

  FetchResult efetch_abstracts(const std::vector<std::string>& ids);

  std::size_t requests_issued() const noexcept { return requests_; }
  const ClientOptions& options() const noexcept { return options_; }

 private:
  HttpResponse send(HttpRequest request, const Credentials& creds);

  std::shared_ptr<Transport> transport_;
  ClientOptions options_;
  RateLimiter limiter_;
  std::size_t requests_ = 0;
};

// Every abstract the engine returns for spec.query within spec.year.
Corpus build_positive_corpus(EntrezClient& client, const FetchSpec& spec);

// The first per_month_cap hits of each month of spec.year, unioned.
Corpus build_negative_corpus(EntrezClient& client, const FetchSpec& spec);

struct YearCount {
  int year = 0;
  std::size_t cumulative_count = 0;
  friend bool operator==(const YearCount&, const YearCount&) = default;
};

std::vector<YearCount> count_by_year(EntrezClient& client, const std::string& query,
                                     const std::vector<int>& years);

}  // namespace litsearch
