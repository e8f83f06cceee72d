#pragma once

// Download of dated dispatch archives into a local cache.
//
// Cache layout: one file per archive item, named after the last URL path
// segment, next to "<name>.sha256" holding the hex SHA-256 of the file.
// Both are written to temporaries and renamed into place.

#include "wavecast/data_io.hpp"
#include "wavecast/types.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace wavecast {

struct HttpResponse {
    int status = 0;    ///< 0 when the transport failed
    std::string body;
    std::string error; ///< transport error text
};

using HttpGet = std::function<HttpResponse(const std::string& url)>;

/// cpp-httplib transport; follows redirects, https when built with OpenSSL.
HttpGet default_http_get(std::chrono::seconds timeout = std::chrono::seconds(60));

struct FetchSpec {
    /// Placeholders: {date} = YYYYMMDD, {yyyy}, {mm}, {dd}.
    std::string url_template;
    DayNumber first = 0;
    DayNumber last = 0; ///< inclusive
    std::filesystem::path cache_dir;
    int max_retries = 3;                      ///< extra attempts after the first
    std::chrono::milliseconds backoff{250};   ///< doubled per retry
    std::chrono::milliseconds max_backoff{4000};
    int max_in_flight = 4;
};

struct FetchedItem {
    DayNumber day = 0;
    std::string url;
    std::filesystem::path path;
    std::string sha256;
    bool from_cache = false;
};

struct FetchResult {
    std::vector<FetchedItem> items; ///< in date order
    std::size_t network_requests = 0;
};

std::string expand_url(const std::string& url_template, DayNumber day);

/// Throws ErrorKind::config unless `url` is http(s)://host[:port]/path.
void validate_url(const std::string& url);

std::string sha256_hex(std::string_view data);

/// Cached items whose file and sidecar agree are reused without a request;
/// a disagreeing pair is an ErrorKind::integrity error. Failed requests are
/// retried with bounded exponential backoff, then ErrorKind::network.
/// Every URL is validated before anything touches the cache.
FetchResult fetch_archive(const FetchSpec& spec, const HttpGet& get = default_http_get());

/// Extracts CSV payloads from a ZIP (nested ZIPs included) or returns the
/// bytes as-is when they are not a ZIP.
std::vector<std::string> extract_csv_payloads(const std::string& bytes);

/// Converts AEMO MMS "DISPATCH,UNIT_SCADA" records into the series CSV
/// layout: one column per requested DUID, keeping readings stamped on the
/// schema's grid. Cells with no reading are left empty, so load_csv rejects
/// those days.
std::string unit_scada_to_series_csv(const std::vector<std::string>& csv_texts,
                                     const std::vector<std::string>& duids,
                                     const CsvSchema& schema = {});

/// Reads fetched items and parses them through the series loader.
LoadResult load_fetched_scada(const FetchResult& fetched, const std::vector<std::string>& duids,
                              const CsvSchema& schema = {});

} // namespace wavecast
