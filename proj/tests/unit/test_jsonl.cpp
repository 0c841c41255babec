#include "cscope/jsonl.hpp"
#include "test_support.hpp"

using namespace cscope;
using cscope::testing::TempDir;

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(CheckedJsonl, RoundTrip) {
  std::vector<ordered_json> records;
  records.push_back({{"kind", "concept"}, {"id", 1}, {"label", "copd"}});
  records.push_back({{"kind", "relation"}, {"src", 1}, {"dst", 2}, {"weight", 0.5}});
  const auto bytes = encode_checked_jsonl(records);
  EXPECT_EQ(decode_checked_jsonl(bytes), records);
  EXPECT_EQ(bytes.back(), '\n');
  EXPECT_NE(bytes.find("{\"kind\":\"checksum\",\"sha256\":\""), std::string::npos);
}

TEST(CheckedJsonl, EmptyStore) {
  const auto bytes = encode_checked_jsonl({});
  EXPECT_TRUE(decode_checked_jsonl(bytes).empty());
}

TEST(CheckedJsonl, DetectsTamperingAndTruncation) {
  std::vector<ordered_json> records{{{"kind", "concept"}, {"label", "copd"}}};
  auto bytes = encode_checked_jsonl(records);
  auto tampered = bytes;
  tampered[tampered.find("copd")] = 'C';
  EXPECT_CSCOPE_ERROR(decode_checked_jsonl(tampered), ErrorCode::CorruptSnapshot);
  EXPECT_CSCOPE_ERROR(decode_checked_jsonl(bytes.substr(0, bytes.size() / 2)),
                      ErrorCode::CorruptSnapshot);
  EXPECT_CSCOPE_ERROR(decode_checked_jsonl(""), ErrorCode::CorruptSnapshot);
}

TEST(CheckedJsonl, KindMustComeFirst) {
  // Hand-built store whose checksum is valid but whose record lacks "kind".
  const std::string body = "{\"label\":\"copd\"}\n";
  const auto bytes = body + "{\"kind\":\"checksum\",\"sha256\":\"" + sha256_hex(body) + "\"}\n";
  EXPECT_CSCOPE_ERROR(decode_checked_jsonl(bytes), ErrorCode::CorruptSnapshot);
}

TEST(AtomicWrite, ReplacesFile) {
  TempDir dir;
  const auto path = dir.path() / "x.jsonl";
  write_file_atomic(path, "one");
  write_file_atomic(path, "two");
  EXPECT_EQ(read_file(path), "two");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++entries;
  EXPECT_EQ(entries, 1u);
}

TEST(AtomicWrite, MissingFileIsIoFailure) {
  TempDir dir;
  EXPECT_CSCOPE_ERROR(read_file(dir.path() / "absent"), ErrorCode::IoFailure);
  EXPECT_CSCOPE_ERROR(write_file_atomic(dir.path() / "no" / "such" / "dir", "x"),
                      ErrorCode::IoFailure);
}
