#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sta {

/// One raw check-in: a user visited a POI at a time and place, optionally
/// with content tokens describing the POI.
struct CheckIn {
  std::string user;
  std::string poi;
  std::int64_t timestamp = 0;  // UTC epoch seconds
  double lat = 0.0;
  double lon = 0.0;
  std::vector<std::string> words;

  bool operator==(const CheckIn&) const = default;
};

enum class Field { kUser, kPoi, kLat, kLon, kTimestamp, kWords, kIgnore };

/// Column layout of a check-in file. The words column, when present, is
/// optional per line.
struct FieldOrder {
  std::vector<Field> fields = {Field::kUser, Field::kPoi, Field::kLat,
                               Field::kLon, Field::kTimestamp, Field::kWords};

  /// Parses a comma-separated descriptor such as "user,poi,lat,lon,timestamp".
  /// Unknown names map to kIgnore only when spelled "_" or "skip".
  static FieldOrder parse(std::string_view descriptor);
};

struct ParseOptions {
  FieldOrder format;
  char delimiter = ',';
  char word_separator = '|';
};

struct ParseResult {
  std::vector<CheckIn> checkins;
  std::size_t skipped = 0;
  /// One entry per skipped line: "line N: reason".
  std::vector<std::string> warnings;
};

/// Parses delimiter-separated check-in records, one per line. Malformed
/// lines are skipped and reported; blank lines are ignored. Throws DataError
/// when more than half of the non-blank lines are malformed.
ParseResult parse_checkins(std::istream& source, const ParseOptions& options = {});

/// Opens `path` and parses it. Throws MissingInputError if it cannot be read.
ParseResult read_checkins(const std::filesystem::path& path,
                          const ParseOptions& options = {});

/// Reads a POI-content TSV (poi-key, pipe-separated tokens) and merges its
/// tokens into every check-in of the matching POI.
void merge_poi_content(std::vector<CheckIn>& checkins,
                       const std::filesystem::path& content_tsv);

/// Lowercases ASCII letters; other bytes pass through untouched.
std::string lowercase(std::string_view token);

}  // namespace sta
