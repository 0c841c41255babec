#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace cscope {

using ordered_json = nlohmann::ordered_json;

std::string sha256_hex(std::string_view bytes);

// Line-delimited JSON with a trailing checksum record:
//   {"kind":"checksum","sha256":"<hex of every preceding byte>"}
// Each record must carry "kind" as its first field. LF line endings.
std::string encode_checked_jsonl(const std::vector<ordered_json>& records);

// Throws CorruptSnapshot on a missing/mismatched checksum or a bad line.
std::vector<ordered_json> decode_checked_jsonl(std::string_view bytes);

// Writes through a temporary file and renames, so readers never see a
// partially written file. Throws IoFailure.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

void write_checked_jsonl(const std::filesystem::path& path,
                         const std::vector<ordered_json>& records);
std::vector<ordered_json> read_checked_jsonl(const std::filesystem::path& path);

}  // namespace cscope
