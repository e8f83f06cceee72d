#include "wavecast/calendar.hpp"
#include "wavecast/error.hpp"
#include "wavecast/fetch.hpp"
#include "wavecast/zip.hpp"

#include <gtest/gtest.h>
#include <httplib.h>
#include <zlib.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

using namespace wavecast;
namespace fs = std::filesystem;

namespace {

void put16(std::string& s, unsigned v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put32(std::string& s, unsigned long v) {
    put16(s, v & 0xffff);
    put16(s, (v >> 16) & 0xffff);
}

std::string deflate_raw(const std::string& data) {
    z_stream zs{};
    EXPECT_EQ(deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY), Z_OK);
    std::string out(deflateBound(&zs, data.size()), '\0');
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    EXPECT_EQ(deflate(&zs, Z_FINISH), Z_STREAM_END);
    out.resize(zs.total_out);
    deflateEnd(&zs);
    return out;
}

/// Minimal ZIP writer: method 8 (deflate) or 0 (stored) per entry.
std::string make_zip(const std::vector<std::pair<std::string, std::string>>& entries, bool deflated = true) {
    std::string body, central;
    for (const auto& [name, data] : entries) {
        const unsigned long crc = crc32(0, reinterpret_cast<const Bytef*>(data.data()), data.size());
        const std::string payload = deflated ? deflate_raw(data) : data;
        const unsigned long offset = body.size();
        put32(body, 0x04034b50);
        put16(body, 20);
        put16(body, 0);
        put16(body, deflated ? 8 : 0);
        put16(body, 0);
        put16(body, 0);
        put32(body, crc);
        put32(body, payload.size());
        put32(body, data.size());
        put16(body, name.size());
        put16(body, 0);
        body += name + payload;

        put32(central, 0x02014b50);
        put16(central, 20);
        put16(central, 20);
        put16(central, 0);
        put16(central, deflated ? 8 : 0);
        put16(central, 0);
        put16(central, 0);
        put32(central, crc);
        put32(central, payload.size());
        put32(central, data.size());
        put16(central, name.size());
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put32(central, 0);
        put32(central, offset);
        central += name;
    }
    std::string out = body + central;
    put32(out, 0x06054b50);
    put16(out, 0);
    put16(out, 0);
    put16(out, entries.size());
    put16(out, entries.size());
    put32(out, central.size());
    put32(out, body.size());
    put16(out, 0);
    return out;
}

/// UNIT_SCADA records for one day, every 5 minutes, value = hour + minute / 100.
std::string scada_day(DayNumber day, const std::vector<std::string>& duids) {
    std::ostringstream out;
    out << "C,NEMP.WORLD,DISPATCHIS,AEMO,PUBLIC\n";
    out << "I,DISPATCH,UNIT_SCADA,1,SETTLEMENTDATE,DUID,SCADAVALUE,LASTCHANGED\n";
    const CivilDate c = civil_from_days(day);
    char date[16];
    std::snprintf(date, sizeof date, "%04d/%02d/%02d", c.year, c.month, c.day);
    for (int m = 5; m < 1440; m += 5) {
        char ts[32];
        std::snprintf(ts, sizeof ts, "\"%s %02d:%02d:00\"", date, m / 60, m % 60);
        for (std::size_t k = 0; k < duids.size(); ++k) {
            out << "D,DISPATCH,UNIT_SCADA,1," << ts << ',' << duids[k] << ','
                << (m / 60 + (m % 60) / 100.0 + 10.0 * k) << ",x\n";
        }
    }
    out << "D,DISPATCH,UNIT_SCADA,1,\"" << date << " 12:00:00\",OTHER,5,x\n";
    out << "C,\"END OF REPORT\",3\n";
    return out.str();
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("wavecast_fetch_" + name);
    fs::remove_all(dir);
    return dir;
}

/// Local HTTP server answering /f_<yyyymmdd>.zip, optionally failing the
/// first `fail_first` requests with 503.
class TestServer {
public:
    explicit TestServer(int fail_first = 0) : fail_first_(fail_first) {
        server_.Get(R"(/f_(\d{8})\.bin)", [this](const httplib::Request& req, httplib::Response& res) {
            const int n = ++hits_;
            if (n <= fail_first_) {
                res.status = 503;
                return;
            }
            res.set_content("payload " + std::string(req.matches[1]), "application/octet-stream");
        });
        server_.Get("/missing.bin", [this](const httplib::Request&, httplib::Response& res) {
            ++hits_;
            res.status = 404;
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~TestServer() {
        server_.stop();
        thread_.join();
    }
    std::string base() const { return "http://127.0.0.1:" + std::to_string(port_); }
    int hits() const { return hits_.load(); }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    int fail_first_ = 0;
    std::atomic<int> hits_{0};
};

FetchSpec spec_for(const std::string& base, const fs::path& dir, int days = 3) {
    FetchSpec s;
    s.url_template = base + "/f_{date}.bin";
    s.first = *parse_date("2020-02-27");
    s.last = s.first + days - 1;
    s.cache_dir = dir;
    s.backoff = std::chrono::milliseconds(1);
    s.max_backoff = std::chrono::milliseconds(4);
    s.max_in_flight = 2;
    return s;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(Url, ExpandAndValidate) {
    const DayNumber d = *parse_date("2020-02-29");
    EXPECT_EQ(expand_url("https://h/x/{yyyy}/{mm}/{dd}/F_{date}.zip", d), "https://h/x/2020/02/29/F_20200229.zip");
    EXPECT_NO_THROW(validate_url("http://127.0.0.1:8080/a/b.zip"));
    EXPECT_NO_THROW(validate_url("https://example.com/a"));
    EXPECT_THROW(validate_url("ftp://example.com/a"), Error);
    EXPECT_THROW(validate_url("http://exa mple.com/a"), Error);
    EXPECT_THROW(validate_url("http://example.com:99999/a"), Error);
}

TEST(Sha256, KnownDigest) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Fetch, DownloadsThenServesFromCache) {
    TestServer server;
    const auto dir = fresh_dir("warm");
    const auto spec = spec_for(server.base(), dir);
    const auto first = fetch_archive(spec);
    ASSERT_EQ(first.items.size(), 3u);
    EXPECT_EQ(first.network_requests, 3u);
    EXPECT_EQ(slurp(first.items[2].path), "payload 20200229");
    EXPECT_EQ(first.items[1].path.filename(), "f_20200228.bin");
    EXPECT_EQ(slurp(first.items[1].path.string() + ".sha256"), sha256_hex("payload 20200228") + "\n");
    EXPECT_FALSE(first.items[0].from_cache);

    const auto second = fetch_archive(spec);
    EXPECT_EQ(second.network_requests, 0u);
    EXPECT_EQ(server.hits(), 3);
    for (const auto& item : second.items) EXPECT_TRUE(item.from_cache);
    EXPECT_EQ(second.items[0].sha256, first.items[0].sha256);
    for (const auto& e : fs::directory_iterator(dir)) EXPECT_NE(e.path().extension(), ".part");
    fs::remove_all(dir);
}

TEST(Fetch, ChecksumMismatchIsIntegrityError) {
    TestServer server;
    const auto dir = fresh_dir("corrupt");
    const auto spec = spec_for(server.base(), dir, 1);
    const auto r = fetch_archive(spec);
    std::ofstream(r.items[0].path, std::ios::binary) << "tampered";
    try {
        fetch_archive(spec);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::integrity);
    }
    fs::remove_all(dir);
}

TEST(Fetch, InvalidUrlTouchesNothing) {
    const auto dir = fresh_dir("invalid");
    FetchSpec spec = spec_for("http://bad host", dir);
    int calls = 0;
    const HttpGet get = [&](const std::string&) {
        ++calls;
        return HttpResponse{200, "x", ""};
    };
    EXPECT_THROW(fetch_archive(spec, get), Error);
    EXPECT_EQ(calls, 0);
    EXPECT_FALSE(fs::exists(dir));
}

TEST(Fetch, RetriesTransientFailures) {
    TestServer server(2);
    const auto dir = fresh_dir("retry");
    auto spec = spec_for(server.base(), dir, 1);
    const auto r = fetch_archive(spec);
    EXPECT_EQ(r.network_requests, 3u);
    EXPECT_EQ(slurp(r.items[0].path), "payload 20200227");
    fs::remove_all(dir);
}

TEST(Fetch, GivesUpAfterRetries) {
    TestServer server(100);
    const auto dir = fresh_dir("giveup");
    auto spec = spec_for(server.base(), dir, 1);
    spec.max_retries = 2;
    try {
        fetch_archive(spec);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::network);
    }
    EXPECT_EQ(server.hits(), 3);
    EXPECT_FALSE(fs::exists(spec.cache_dir / "f_20200227.bin"));
    fs::remove_all(dir);
}

TEST(Fetch, NotFoundIsNotRetried) {
    TestServer server;
    const auto dir = fresh_dir("notfound");
    auto spec = spec_for(server.base(), dir, 1);
    spec.url_template = server.base() + "/missing.bin";
    EXPECT_THROW(fetch_archive(spec), Error);
    EXPECT_EQ(server.hits(), 1);
    fs::remove_all(dir);
}

TEST(Fetch, CacheNameCollisionRejected) {
    const auto dir = fresh_dir("collide");
    auto spec = spec_for("http://127.0.0.1:1", dir);
    spec.url_template = "http://127.0.0.1:1/{date}/data.zip";
    EXPECT_THROW(fetch_archive(spec, [](const std::string&) { return HttpResponse{}; }), Error);
    EXPECT_FALSE(fs::exists(dir));
}

TEST(Zip, StoredAndDeflatedEntries) {
    const std::string text(5000, 'a');
    for (const bool deflated : {false, true}) {
        const auto bytes = make_zip({{"one.csv", text}, {"two.txt", "hello"}}, deflated);
        ASSERT_TRUE(looks_like_zip(bytes));
        const auto entries = read_zip(bytes);
        ASSERT_EQ(entries.size(), 2u);
        EXPECT_EQ(entries[0].name, "one.csv");
        EXPECT_EQ(entries[0].data, text);
        EXPECT_EQ(entries[1].data, "hello");
    }
    EXPECT_THROW(read_zip("PK\x03\x04garbage"), Error);
}

TEST(Zip, NestedPayloads) {
    const auto inner = make_zip({{"a.CSV", "x,y\n"}, {"readme.txt", "skip"}});
    const auto outer = make_zip({{"inner.zip", inner}, {"b.csv", "z\n"}});
    const auto payloads = extract_csv_payloads(outer);
    ASSERT_EQ(payloads.size(), 2u);
    EXPECT_EQ(payloads[0], "x,y\n");
    EXPECT_EQ(payloads[1], "z\n");
    EXPECT_EQ(extract_csv_payloads("plain"), std::vector<std::string>{"plain"});
}

TEST(Scada, ConvertsToSeriesLayout) {
    const DayNumber d = *parse_date("2019-07-01");
    const auto csv = unit_scada_to_series_csv({scada_day(d, {"SOLAR1", "SOLAR2"})}, {"SOLAR2", "SOLAR1"});
    const auto r = parse_series_csv(csv, [] {
        CsvSchema s;
        s.value_columns = {"SOLAR2", "SOLAR1"};
        return s;
    }());
    EXPECT_TRUE(r.issues.empty());
    ASSERT_EQ(r.sites.size(), 2u);
    ASSERT_EQ(r.sites[0].days(), 1);
    EXPECT_EQ(r.sites[1].values(0, 0), 6.0);
    EXPECT_DOUBLE_EQ(r.sites[1].values(0, 1), 6.3);
    EXPECT_DOUBLE_EQ(r.sites[0].values(0, 26), 29.0);
}

TEST(Scada, FetchedZipsLoadEndToEnd) {
    const std::vector<std::string> duids{"SOLAR1"};
    const auto dir = fresh_dir("scada");
    httplib::Server server;
    server.Get(R"(/PUBLIC_DISPATCHSCADA_(\d{8})\.zip)", [&](const httplib::Request& req, httplib::Response& res) {
        const DayNumber day = *parse_date(std::string(req.matches[1]).insert(6, "-").insert(4, "-"));
        const auto inner = make_zip({{"day.CSV", scada_day(day, duids)}});
        res.set_content(make_zip({{"inner.zip", inner}}), "application/zip");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    FetchSpec spec;
    spec.url_template = "http://127.0.0.1:" + std::to_string(port) + "/PUBLIC_DISPATCHSCADA_{date}.zip";
    spec.first = *parse_date("2019-12-30");
    spec.last = spec.first + 3;
    spec.cache_dir = dir;
    const auto fetched = fetch_archive(spec);
    server.stop();
    t.join();

    const auto r = load_fetched_scada(fetched, duids);
    ASSERT_EQ(r.sites.size(), 1u);
    EXPECT_EQ(r.sites[0].days(), 4);
    EXPECT_EQ(r.sites[0].dates[2], *parse_date("2020-01-01"));
    EXPECT_DOUBLE_EQ(r.sites[0].values(3, 13), 12.3);
    fs::remove_all(dir);
}
