#include "litsearch/entrez.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "litsearch/error.hpp"
#include "litsearch/pubmed_xml.hpp"

namespace litsearch {

using nlohmann::json;

std::string HttpRequest::param(const std::string& key) const {
  for (const auto& [k, v] : params) {
    if (k == key) return v;
  }
  return {};
}

std::string url_encode(const std::string& value) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(value.size() * 3);
  for (unsigned char c : value) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 0xF];
    }
  }
  return out;
}

std::string HttpRequest::full_url() const {
  std::string out = url;
  char sep = '?';
  for (const auto& [k, v] : params) {
    out += sep;
    out += url_encode(k);
    out += '=';
    out += url_encode(v);
    sep = '&';
  }
  return out;
}

Credentials Credentials::from_environment() {
  Credentials c;
  if (const char* key = std::getenv("ENTREZ_API_KEY"); key && *key) c.api_key = key;
  if (const char* email = std::getenv("ENTREZ_EMAIL"); email && *email) c.email = email;
  return c;
}

std::string Date::to_entrez() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d/%02d/%02d", year, month, day);
  return buf;
}

int days_in_month(int year, int month) {
  static constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month < 1 || month > 12) throw UsageError("month out of range: " + std::to_string(month));
  bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  return month == 2 && leap ? 29 : days[month - 1];
}

DateWindow DateWindow::year(int y) { return {{y, 1, 1}, {y, 12, 31}}; }

DateWindow DateWindow::month(int y, int m) { return {{y, m, 1}, {y, m, days_in_month(y, m)}}; }

DateWindow DateWindow::day(int y, int m, int d) { return {{y, m, d}, {y, m, d}}; }

DateWindow DateWindow::through_year(int y) { return {{1800, 1, 1}, {y, 12, 31}}; }

namespace {

std::string excerpt(const std::string& body) {
  constexpr std::size_t kMax = 200;
  return body.size() <= kMax ? body : body.substr(0, kMax) + "...";
}

bool retryable_status(int status) { return status == 429 || status == 502 || status == 503 || status == 504; }

std::size_t parse_count(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end()) throw ServiceError(std::string("ESearch response lacks '") + field + "'");
  if (it->is_string()) return static_cast<std::size_t>(std::stoull(it->get<std::string>()));
  if (it->is_number_unsigned()) return it->get<std::size_t>();
  throw ServiceError(std::string("ESearch field '") + field + "' is not a count");
}

const Credentials& pick(const Credentials& spec, const Credentials& client) {
  return spec.api_key || spec.email || spec.tool ? spec : client;
}

}  // namespace

EntrezClient::EntrezClient(std::shared_ptr<Transport> transport, ClientOptions options)
    : transport_(std::move(transport)),
      options_(std::move(options)),
      limiter_(options_.requests_per_second.value_or(options_.credentials.api_key ? 10 : 3),
               options_.clock) {
  if (!transport_) throw UsageError("EntrezClient needs a transport");
  if (options_.efetch_batch == 0 || options_.esearch_page == 0) {
    throw UsageError("batch and page sizes must be positive");
  }
}

HttpResponse EntrezClient::send(HttpRequest request, const Credentials& creds) {
  if (creds.tool) request.params.emplace_back("tool", *creds.tool);
  if (creds.email) request.params.emplace_back("email", *creds.email);
  if (creds.api_key) request.params.emplace_back("api_key", *creds.api_key);

  auto backoff = options_.retry.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    limiter_.acquire();
    ++requests_;
    std::string failure;
    try {
      HttpResponse response = transport_->get(request);
      if (response.status == 200) return response;
      if (!retryable_status(response.status)) {
        throw ServiceError("HTTP " + std::to_string(response.status) + " from " + request.url + ": " +
                               excerpt(response.body),
                           response.status);
      }
      failure = "HTTP " + std::to_string(response.status);
      if (attempt >= options_.retry.max_retries) {
        throw ServiceError("HTTP " + std::to_string(response.status) + " from " + request.url +
                               " after " + std::to_string(attempt + 1) + " attempts: " +
                               excerpt(response.body),
                           response.status);
      }
    } catch (const NetworkError& e) {
      if (attempt >= options_.retry.max_retries) {
        throw NetworkError(std::string(e.what()) + " (after " + std::to_string(attempt + 1) +
                           " attempts)");
      }
      failure = e.what();
    }
    spdlog::warn("request to {} failed ({}); retrying in {} ms", request.url, failure, backoff.count());
    options_.clock->sleep_for(backoff);
    backoff = std::chrono::milliseconds(
        static_cast<long long>(std::llround(static_cast<double>(backoff.count()) * options_.retry.multiplier)));
  }
}

SearchPage EntrezClient::esearch(const FetchSpec& spec, const DateWindow& window, std::size_t offset,
                                 std::size_t page_size) {
  if (page_size == 0) throw UsageError("page_size must be at least 1");
  if (spec.query.empty()) throw UsageError("empty search query");
  HttpRequest req;
  req.url = options_.base_url + "esearch.fcgi";
  req.params = {{"db", "pubmed"},
                {"term", spec.query},
                {"mindate", window.from.to_entrez()},
                {"maxdate", window.to.to_entrez()},
                {"datetype", "pdat"},
                {"retstart", std::to_string(offset)},
                {"retmax", std::to_string(page_size)},
                {"retmode", "json"}};
  HttpResponse response = send(std::move(req), pick(spec.credentials, options_.credentials));

  json body;
  try {
    body = json::parse(response.body);
  } catch (const json::parse_error&) {
    throw ServiceError("ESearch returned non-JSON payload: " + excerpt(response.body));
  }
  if (body.contains("error")) {
    throw ServiceError("ESearch error: " + excerpt(body["error"].dump()));
  }
  auto result = body.find("esearchresult");
  if (result == body.end() || !result->is_object()) {
    throw ServiceError("ESearch payload lacks esearchresult: " + excerpt(response.body));
  }
  if (result->contains("ERROR")) {
    throw ServiceError("ESearch error: " + excerpt((*result)["ERROR"].dump()));
  }
  SearchPage page;
  page.total_hits = parse_count(*result, "count");
  if (auto ids = result->find("idlist"); ids != result->end()) {
    for (const auto& id : *ids) page.ids.push_back(id.get<std::string>());
  }
  return page;
}

SearchPage EntrezClient::esearch_all(const FetchSpec& spec, const DateWindow& window,
                                     std::optional<std::size_t> limit) {
  SearchPage all;
  std::size_t wanted = 0;
  std::size_t offset = 0;
  bool first = true;
  while (first || all.ids.size() < wanted) {
    std::size_t page_size = options_.esearch_page;
    if (limit) page_size = std::min(page_size, *limit - all.ids.size());
    SearchPage page = esearch(spec, window, offset, page_size);
    if (first) {
      all.total_hits = page.total_hits;
      wanted = limit ? std::min(*limit, page.total_hits) : page.total_hits;
      first = false;
    }
    if (page.ids.empty()) break;  // engine returned fewer than it reported
    offset += page.ids.size();
    for (auto& id : page.ids) {
      if (all.ids.size() == wanted) break;
      all.ids.push_back(std::move(id));
    }
  }
  return all;
}

FetchResult EntrezClient::efetch_abstracts(const std::vector<std::string>& ids) {
  if (ids.empty()) throw UsageError("efetch_abstracts needs at least one id");
  FetchResult out;
  for (std::size_t start = 0; start < ids.size(); start += options_.efetch_batch) {
    std::size_t end = std::min(ids.size(), start + options_.efetch_batch);
    std::string joined;
    for (std::size_t i = start; i < end; ++i) {
      if (i > start) joined += ',';
      joined += ids[i];
    }
    HttpRequest req;
    req.url = options_.base_url + "efetch.fcgi";
    req.params = {{"db", "pubmed"}, {"id", joined}, {"rettype", "abstract"}, {"retmode", "xml"}};
    HttpResponse response = send(std::move(req), options_.credentials);

    ParsedArticles parsed = parse_pubmed_xml(response.body);
    out.malformed += parsed.malformed;
    if (parsed.malformed) spdlog::warn("efetch: {} malformed article(s) skipped", parsed.malformed);

    std::unordered_map<std::string, DocumentRecord*> by_id;
    for (auto& rec : parsed.records) by_id.emplace(rec.id, &rec);
    // Keep the requested order, not the response order.
    for (std::size_t i = start; i < end; ++i) {
      auto it = by_id.find(ids[i]);
      if (it == by_id.end() || it->second->abstract.empty()) {
        out.skipped.push_back(ids[i]);
        continue;
      }
      out.records.push_back(std::move(*it->second));
      by_id.erase(it);
    }
  }
  if (!out.skipped.empty()) {
    spdlog::info("efetch: {} of {} id(s) had no abstract", out.skipped.size(), ids.size());
  }
  return out;
}

namespace {

std::vector<std::string> dedupe(std::vector<std::string> ids) {
  std::unordered_set<std::string> seen;
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (auto& id : ids) {
    if (seen.insert(id).second) out.push_back(std::move(id));
  }
  return out;
}

// Collects every id in `window`, splitting year -> month -> day when the
// window holds more hits than the engine will page through.
void collect_window(EntrezClient& client, const FetchSpec& spec, const DateWindow& window,
                    std::vector<std::string>& out) {
  const std::size_t ceiling = client.options().max_window_records;
  SearchPage probe = client.esearch(spec, window, 0, std::min(client.options().esearch_page, ceiling));
  if (probe.total_hits <= ceiling) {
    std::size_t got = probe.ids.size();
    out.insert(out.end(), probe.ids.begin(), probe.ids.end());
    while (got < probe.total_hits) {
      SearchPage page = client.esearch(spec, window, got, client.options().esearch_page);
      if (page.ids.empty()) break;
      got += page.ids.size();
      out.insert(out.end(), page.ids.begin(), page.ids.end());
    }
    return;
  }
  const Date& from = window.from;
  const Date& to = window.to;
  if (from.year == to.year && from.month == 1 && to.month == 12) {
    for (int m = 1; m <= 12; ++m) collect_window(client, spec, DateWindow::month(from.year, m), out);
    return;
  }
  if (from.year == to.year && from.month == to.month && from.day != to.day) {
    for (int d = from.day; d <= to.day; ++d) {
      collect_window(client, spec, DateWindow::day(from.year, from.month, d), out);
    }
    return;
  }
  throw ServiceError("window " + from.to_entrez() + "-" + to.to_entrez() + " holds " +
                     std::to_string(probe.total_hits) + " hits, more than the engine serves (" +
                     std::to_string(ceiling) + ")");
}

}  // namespace

Corpus build_positive_corpus(EntrezClient& client, const FetchSpec& spec) {
  if (spec.query.empty()) throw UsageError("positive corpus needs a nonempty query");
  std::vector<std::string> ids;
  collect_window(client, spec, DateWindow::year(spec.year), ids);
  ids = dedupe(std::move(ids));
  if (ids.empty()) throw ServiceError("empty positive corpus: no hits for '" + spec.query + "'");
  FetchResult fetched = client.efetch_abstracts(ids);
  if (fetched.records.empty()) {
    throw ServiceError("empty positive corpus: no fetched record carried an abstract");
  }
  spdlog::info("positive corpus: {} ids, {} abstracts, {} skipped, {} malformed", ids.size(),
               fetched.records.size(), fetched.skipped.size(), fetched.malformed);
  return Corpus(CorpusLabel::positive(), std::move(fetched.records));
}

Corpus build_negative_corpus(EntrezClient& client, const FetchSpec& spec) {
  if (spec.query.empty()) throw UsageError("negative corpus needs a nonempty query");
  if (!spec.per_month_cap) throw UsageError("negative corpus needs a finite per_month_cap");
  if (*spec.per_month_cap == 0) throw UsageError("per_month_cap must be at least 1");
  if (spec.year <= 0) throw UsageError("negative corpus needs a year");

  std::vector<std::string> ids;
  for (int m = 1; m <= 12; ++m) {
    SearchPage page = client.esearch_all(spec, DateWindow::month(spec.year, m), spec.per_month_cap);
    spdlog::debug("negative corpus: month {} -> {} of {} hits", m, page.ids.size(), page.total_hits);
    ids.insert(ids.end(), page.ids.begin(), page.ids.end());
  }
  ids = dedupe(std::move(ids));
  std::vector<DocumentRecord> docs;
  if (!ids.empty()) docs = client.efetch_abstracts(ids).records;
  return Corpus(CorpusLabel::negative(), std::move(docs));
}

std::vector<YearCount> count_by_year(EntrezClient& client, const std::string& query,
                                     const std::vector<int>& years) {
  if (!std::is_sorted(years.begin(), years.end())) throw UsageError("years must be sorted ascending");
  FetchSpec spec;
  spec.query = query;
  std::vector<YearCount> out;
  out.reserve(years.size());
  for (int y : years) {
    // retmax=1 keeps the payload small; only the count is used.
    SearchPage page = client.esearch(spec, DateWindow::through_year(y), 0, 1);
    if (!out.empty() && page.total_hits < out.back().cumulative_count) {
      throw ServiceError("cumulative count decreased between " + std::to_string(out.back().year) +
                         " and " + std::to_string(y));
    }
    out.push_back({y, page.total_hits});
  }
  return out;
}

}  // namespace litsearch
