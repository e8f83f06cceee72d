#include "wavecast/zip.hpp"

#include "wavecast/error.hpp"

#include <zlib.h>

#include <cstdint>

namespace wavecast {

namespace {

std::uint32_t u16(std::string_view b, std::size_t at) {
    if (at + 2 > b.size()) throw data_error("zip: truncated archive");
    return static_cast<std::uint8_t>(b[at]) | static_cast<std::uint8_t>(b[at + 1]) << 8;
}

std::uint32_t u32(std::string_view b, std::size_t at) {
    return u16(b, at) | u16(b, at + 2) << 16;
}

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;

} // namespace

bool looks_like_zip(std::string_view bytes) {
    return bytes.size() >= 4 && u32(bytes, 0) == kLocalSig;
}

std::string inflate_raw(std::string_view compressed, std::size_t size) {
    std::string out(size, '\0');
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw data_error("zip: inflate init failed");
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(compressed.data()));
    zs.avail_in = static_cast<uInt>(compressed.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = inflate(&zs, Z_FINISH);
    const auto produced = zs.total_out;
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || produced != size) throw data_error("zip: corrupt deflate stream");
    return out;
}

std::vector<ZipEntry> read_zip(std::string_view b) {
    if (b.size() < 22) throw data_error("zip: archive too short");
    std::size_t end = std::string_view::npos;
    const std::size_t lowest = b.size() > 22 + 65535 ? b.size() - 22 - 65535 : 0;
    for (std::size_t i = b.size() - 22 + 1; i-- > lowest;) {
        if (u32(b, i) == kEndSig) {
            end = i;
            break;
        }
    }
    if (end == std::string_view::npos) throw data_error("zip: end of central directory not found");
    const std::uint32_t count = u16(b, end + 10);
    std::size_t at = u32(b, end + 16);
    if (count == 0xffff || at == 0xffffffff) throw data_error("zip: ZIP64 archives are not supported");

    std::vector<ZipEntry> entries;
    for (std::uint32_t i = 0; i < count; ++i) {
        if (u32(b, at) != kCentralSig) throw data_error("zip: bad central directory entry");
        const std::uint32_t flags = u16(b, at + 8);
        const std::uint32_t method = u16(b, at + 10);
        const std::size_t csize = u32(b, at + 20);
        const std::size_t usize = u32(b, at + 24);
        const std::size_t name_len = u16(b, at + 28);
        const std::size_t extra_len = u16(b, at + 30);
        const std::size_t comment_len = u16(b, at + 32);
        const std::size_t local = u32(b, at + 42);
        if (at + 46 + name_len > b.size()) throw data_error("zip: truncated central directory");
        std::string name(b.substr(at + 46, name_len));
        at += 46 + name_len + extra_len + comment_len;

        if (flags & 1) throw data_error("zip: encrypted entry '" + name + "'");
        if (!name.empty() && name.back() == '/') continue;
        if (u32(b, local) != kLocalSig) throw data_error("zip: bad local header for '" + name + "'");
        const std::size_t data_at = local + 30 + u16(b, local + 26) + u16(b, local + 28);
        if (data_at + csize > b.size()) throw data_error("zip: truncated data for '" + name + "'");
        const std::string_view payload = b.substr(data_at, csize);
        ZipEntry e{std::move(name), {}};
        if (method == 0) {
            e.data.assign(payload);
        } else if (method == 8) {
            e.data = inflate_raw(payload, usize);
        } else {
            throw data_error("zip: unsupported compression method " + std::to_string(method));
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

} // namespace wavecast
