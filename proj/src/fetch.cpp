#include "wavecast/fetch.hpp"

#include "wavecast/calendar.hpp"
#include "wavecast/error.hpp"
#include "wavecast/parallel.hpp"
#include "wavecast/zip.hpp"

#include <httplib.h>
#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

namespace wavecast {

namespace {

void replace_all(std::string& s, std::string_view from, const std::string& to) {
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
        s.replace(pos, from.size(), to);
    }
}

const std::regex& url_pattern() {
    static const std::regex re(R"(^(https?)://([A-Za-z0-9.\-]+)(:([0-9]{1,5}))?(/[^\s]*)?$)");
    return re;
}

std::string read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw data_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_bytes(const std::filesystem::path& p, std::string_view data) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("cannot write " + p.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw data_error("short write to " + p.string());
}

std::string cache_name(const std::string& url) {
    std::string path = url.substr(url.find("://") + 3);
    const auto q = path.find_first_of("?#");
    if (q != std::string::npos) path.resize(q);
    std::string name = path.substr(path.find_last_of('/') + 1);
    for (char& c : name) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-' && c != '_') c = '_';
    }
    if (name.empty() || name.front() == '.') name = sha256_hex(url).substr(0, 16) + name;
    return name;
}

std::string trim_copy(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

} // namespace

std::string expand_url(const std::string& url_template, DayNumber day) {
    const CivilDate c = civil_from_days(day);
    char ymd[16], yyyy[8], mm[4], dd[4];
    std::snprintf(ymd, sizeof ymd, "%04d%02d%02d", c.year, c.month, c.day);
    std::snprintf(yyyy, sizeof yyyy, "%04d", c.year);
    std::snprintf(mm, sizeof mm, "%02d", c.month);
    std::snprintf(dd, sizeof dd, "%02d", c.day);
    std::string url = url_template;
    replace_all(url, "{date}", ymd);
    replace_all(url, "{yyyy}", yyyy);
    replace_all(url, "{mm}", mm);
    replace_all(url, "{dd}", dd);
    return url;
}

void validate_url(const std::string& url) {
    std::smatch m;
    if (!std::regex_match(url, m, url_pattern())) {
        throw config_error("invalid URL '" + url + "' (expected http(s)://host[:port]/path)");
    }
    if (m[4].matched && std::stoi(m[4].str()) > 65535) throw config_error("invalid port in URL '" + url + "'");
}

std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw state_error("sha256: digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

HttpGet default_http_get(std::chrono::seconds timeout) {
    return [timeout](const std::string& url) {
        std::smatch m;
        HttpResponse r;
        if (!std::regex_match(url, m, url_pattern())) {
            r.error = "invalid URL";
            return r;
        }
        httplib::Client cli(m[1].str() + "://" + m[2].str() + (m[3].matched ? m[3].str() : ""));
        cli.set_follow_location(true);
        cli.set_connection_timeout(timeout);
        cli.set_read_timeout(timeout);
        const std::string path = m[5].matched ? m[5].str() : "/";
        if (auto res = cli.Get(path)) {
            r.status = res->status;
            r.body = std::move(res->body);
        } else {
            r.error = httplib::to_string(res.error());
        }
        return r;
    };
}

FetchResult fetch_archive(const FetchSpec& spec, const HttpGet& get) {
    if (spec.last < spec.first) throw config_error("fetch: last date precedes first date");
    if (spec.cache_dir.empty()) throw config_error("fetch: cache directory not set");
    if (spec.max_retries < 0 || spec.max_in_flight < 1) {
        throw config_error("fetch: max_retries must be >= 0 and max_in_flight >= 1");
    }

    FetchResult result;
    std::set<std::string> names;
    for (DayNumber d = spec.first; d <= spec.last; ++d) {
        FetchedItem item;
        item.day = d;
        item.url = expand_url(spec.url_template, d);
        validate_url(item.url);
        const std::string name = cache_name(item.url);
        if (!names.insert(name).second) {
            throw config_error("fetch: several dates map to cache file '" + name +
                               "'; put {date} in the URL's last path segment");
        }
        item.path = spec.cache_dir / name;
        result.items.push_back(std::move(item));
    }
    std::filesystem::create_directories(spec.cache_dir);

    std::atomic<std::size_t> requests{0};
    parallel_for(result.items.size(), spec.max_in_flight, [&](std::size_t i) {
        FetchedItem& item = result.items[i];
        const auto sidecar = std::filesystem::path(item.path.string() + ".sha256");
        if (std::filesystem::exists(item.path) && std::filesystem::exists(sidecar)) {
            const std::string expected = trim_copy(read_bytes(sidecar));
            const std::string actual = sha256_hex(read_bytes(item.path));
            if (expected != actual) {
                throw Error(ErrorKind::integrity, "fetch: checksum mismatch for cached " +
                                                      item.path.string() + " (sidecar " + expected +
                                                      ", file " + actual + ")");
            }
            item.sha256 = actual;
            item.from_cache = true;
            return;
        }

        HttpResponse resp;
        auto delay = spec.backoff;
        for (int attempt = 0;; ++attempt) {
            ++requests;
            resp = get(item.url);
            if (resp.status == 200) break;
            const bool permanent = resp.status >= 400 && resp.status < 500 && resp.status != 408 &&
                                   resp.status != 429;
            if (permanent || attempt >= spec.max_retries) {
                throw Error(ErrorKind::network,
                            "fetch: " + item.url + " failed after " + std::to_string(attempt + 1) +
                                " attempt(s): " +
                                (resp.status ? "HTTP " + std::to_string(resp.status) : resp.error));
            }
            std::this_thread::sleep_for(delay);
            delay = std::min(delay * 2, spec.max_backoff);
        }

        item.sha256 = sha256_hex(resp.body);
        const auto tmp = std::filesystem::path(item.path.string() + ".part");
        const auto tmp_sidecar = std::filesystem::path(sidecar.string() + ".part");
        write_bytes(tmp, resp.body);
        write_bytes(tmp_sidecar, item.sha256 + "\n");
        std::filesystem::rename(tmp, item.path);
        std::filesystem::rename(tmp_sidecar, sidecar);
    });
    result.network_requests = requests.load();
    return result;
}

std::vector<std::string> extract_csv_payloads(const std::string& bytes) {
    if (!looks_like_zip(bytes)) return {bytes};
    std::vector<std::string> out;
    for (auto& e : read_zip(bytes)) {
        std::string lower = e.name;
        std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
        if (looks_like_zip(e.data)) {
            for (auto& inner : extract_csv_payloads(e.data)) out.push_back(std::move(inner));
        } else if (lower.ends_with(".csv")) {
            out.push_back(std::move(e.data));
        }
    }
    return out;
}

std::string unit_scada_to_series_csv(const std::vector<std::string>& csv_texts,
                                     const std::vector<std::string>& duids, const CsvSchema& schema) {
    if (duids.empty()) throw config_error("scada: at least one DUID is required");
    std::map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < duids.size(); ++i) column[duids[i]] = i;

    std::map<long long, std::vector<std::string>> rows;
    for (const auto& text : csv_texts) {
        std::istringstream in(text);
        std::string line;
        int i_date = -1, i_duid = -1, i_value = -1;
        while (std::getline(in, line)) {
            const auto f = split_csv_line(line);
            if (f.size() < 3 || f[1] != "DISPATCH" || f[2] != "UNIT_SCADA") continue;
            if (f[0] == "I") {
                for (std::size_t k = 0; k < f.size(); ++k) {
                    if (f[k] == "SETTLEMENTDATE") i_date = static_cast<int>(k);
                    if (f[k] == "DUID") i_duid = static_cast<int>(k);
                    if (f[k] == "SCADAVALUE") i_value = static_cast<int>(k);
                }
                continue;
            }
            if (f[0] != "D") continue;
            if (i_date < 0 || i_duid < 0 || i_value < 0) {
                throw data_error("scada: D record before its I header (missing SETTLEMENTDATE/DUID/SCADAVALUE)");
            }
            const int need = std::max({i_date, i_duid, i_value});
            if (static_cast<int>(f.size()) <= need) throw data_error("scada: short record '" + line + "'");
            const auto it = column.find(f[i_duid]);
            if (it == column.end()) continue;
            const auto ts = parse_timestamp(f[i_date]);
            if (!ts) throw data_error("scada: bad SETTLEMENTDATE '" + f[i_date] + "'");
            if (ts->minute < schema.window_start_minute || ts->minute > schema.window_end_minute ||
                (ts->minute - schema.window_start_minute) % schema.interval_minutes != 0) {
                continue;
            }
            auto& row = rows[static_cast<long long>(ts->day) * 1440 + ts->minute];
            row.resize(duids.size());
            row[it->second] = trim_copy(f[i_value]);
        }
    }

    std::ostringstream out;
    out << schema.timestamp_column;
    for (const auto& d : duids) out << ',' << d;
    out << '\n';
    for (const auto& [key, values] : rows) {
        out << format_timestamp({static_cast<DayNumber>(key / 1440), static_cast<int>(key % 1440)});
        for (const auto& v : values) out << ',' << v;
        out << '\n';
    }
    return out.str();
}

LoadResult load_fetched_scada(const FetchResult& fetched, const std::vector<std::string>& duids,
                              const CsvSchema& schema) {
    std::vector<std::string> texts;
    for (const auto& item : fetched.items) {
        for (auto& t : extract_csv_payloads(read_bytes(item.path))) texts.push_back(std::move(t));
    }
    CsvSchema s = schema;
    s.value_columns = duids;
    return parse_series_csv(unit_scada_to_series_csv(texts, duids, s), s);
}

} // namespace wavecast
