#include "cscope/jsonl.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>
#include <sstream>

#include "cscope/error.hpp"

namespace cscope {

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length,
                 EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoFailure, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0x0F]);
  }
  return hex;
}

std::string encode_checked_jsonl(const std::vector<ordered_json>& records) {
  std::string body;
  for (const auto& record : records) {
    body += record.dump();
    body.push_back('\n');
  }
  ordered_json checksum;
  checksum["kind"] = "checksum";
  checksum["sha256"] = sha256_hex(body);
  body += checksum.dump();
  body.push_back('\n');
  return body;
}

std::vector<ordered_json> decode_checked_jsonl(std::string_view bytes) {
  if (bytes.empty() || bytes.back() != '\n') {
    throw Error(ErrorCode::CorruptSnapshot, "snapshot is truncated");
  }
  const auto last_start = bytes.rfind('\n', bytes.size() - 2);
  const std::size_t body_size =
      last_start == std::string_view::npos ? 0 : last_start + 1;
  const auto body = bytes.substr(0, body_size);
  const auto tail = bytes.substr(body_size, bytes.size() - body_size - 1);

  ordered_json checksum;
  try {
    checksum = ordered_json::parse(tail);
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::CorruptSnapshot, "checksum record unreadable");
  }
  if (!checksum.is_object() || checksum.value("kind", "") != "checksum" ||
      !checksum.contains("sha256")) {
    throw Error(ErrorCode::CorruptSnapshot, "checksum record missing");
  }
  if (checksum["sha256"] != sha256_hex(body)) {
    throw Error(ErrorCode::CorruptSnapshot, "checksum mismatch");
  }

  std::vector<ordered_json> records;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const auto nl = body.find('\n', pos);
    try {
      records.push_back(ordered_json::parse(body.substr(pos, nl - pos)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::CorruptSnapshot,
                  std::string("bad record: ") + e.what());
    }
    if (!records.back().is_object() || !records.back().contains("kind")) {
      throw Error(ErrorCode::CorruptSnapshot, "record without kind");
    }
    pos = nl + 1;
  }
  return records;
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoFailure, "short write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::IoFailure,
                "cannot rename " + tmp.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_checked_jsonl(const std::filesystem::path& path,
                         const std::vector<ordered_json>& records) {
  write_file_atomic(path, encode_checked_jsonl(records));
}

std::vector<ordered_json> read_checked_jsonl(const std::filesystem::path& path) {
  return decode_checked_jsonl(read_file(path));
}

}  // namespace cscope
