#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace wavecast {

struct ZipEntry {
    std::string name;
    std::string data;
};

/// Reads every file entry of an in-memory ZIP archive (stored or deflated,
/// no ZIP64, no encryption). Throws ErrorKind::data on a corrupt archive.
std::vector<ZipEntry> read_zip(std::string_view bytes);

bool looks_like_zip(std::string_view bytes);

/// Raw-deflate decompression of `size` output bytes.
std::string inflate_raw(std::string_view compressed, std::size_t size);

} // namespace wavecast
