#include "sta/checkin.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <unordered_map>

#include "sta/error.hpp"

namespace sta {
namespace {

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

std::vector<std::string> parse_words(std::string_view s, char sep) {
  std::vector<std::string> words;
  for (auto token : split(s, sep)) {
    token = trim(token);
    if (!token.empty()) words.push_back(lowercase(token));
  }
  return words;
}

}  // namespace

std::string lowercase(std::string_view token) {
  std::string out(token);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
  });
  return out;
}

FieldOrder FieldOrder::parse(std::string_view descriptor) {
  static const std::unordered_map<std::string, Field> names = {
      {"user", Field::kUser},   {"poi", Field::kPoi},
      {"lat", Field::kLat},     {"lon", Field::kLon},
      {"timestamp", Field::kTimestamp}, {"words", Field::kWords},
      {"_", Field::kIgnore},    {"skip", Field::kIgnore}};
  FieldOrder order;
  order.fields.clear();
  for (auto name : split(descriptor, ',')) {
    const auto it = names.find(lowercase(trim(name)));
    if (it == names.end()) {
      throw ConfigError("unknown field name in format descriptor: '" + std::string(name) + "'");
    }
    order.fields.push_back(it->second);
  }
  for (Field required : {Field::kUser, Field::kPoi, Field::kLat, Field::kLon, Field::kTimestamp}) {
    if (std::count(order.fields.begin(), order.fields.end(), required) != 1) {
      throw ConfigError("format descriptor must name user, poi, lat, lon and timestamp exactly once");
    }
  }
  return order;
}

ParseResult parse_checkins(std::istream& source, const ParseOptions& options) {
  if (!source) throw DataError("check-in source is not readable");
  const auto& fields = options.format.fields;
  // The words column may be missing entirely when it is the last one.
  std::size_t required = fields.size();
  if (!fields.empty() && fields.back() == Field::kWords) --required;

  ParseResult result;
  std::size_t lineno = 0;
  std::size_t nonblank = 0;
  std::string line;
  while (std::getline(source, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++nonblank;

    auto reject = [&](const std::string& why) {
      ++result.skipped;
      result.warnings.push_back("line " + std::to_string(lineno) + ": " + why);
    };

    const auto cols = split(line, options.delimiter);
    if (cols.size() < required || cols.size() > fields.size()) {
      reject("expected " + std::to_string(fields.size()) + " fields, got " +
             std::to_string(cols.size()));
      continue;
    }
    CheckIn c;
    bool ok = true;
    for (std::size_t i = 0; i < cols.size() && ok; ++i) {
      const auto col = cols[i];
      switch (fields[i]) {
        case Field::kUser:
          c.user = std::string(trim(col));
          ok = !c.user.empty();
          if (!ok) reject("empty user key");
          break;
        case Field::kPoi:
          c.poi = std::string(trim(col));
          ok = !c.poi.empty();
          if (!ok) reject("empty poi key");
          break;
        case Field::kLat: {
          const auto v = parse_number<double>(col);
          ok = v && *v >= -90.0 && *v <= 90.0;
          if (ok) c.lat = *v; else reject("latitude missing or outside [-90, 90]");
          break;
        }
        case Field::kLon: {
          const auto v = parse_number<double>(col);
          ok = v && *v >= -180.0 && *v <= 180.0;
          if (ok) c.lon = *v; else reject("longitude missing or outside [-180, 180]");
          break;
        }
        case Field::kTimestamp: {
          const auto v = parse_number<std::int64_t>(col);
          ok = v && *v >= 0;
          if (ok) c.timestamp = *v; else reject("timestamp missing or negative");
          break;
        }
        case Field::kWords:
          c.words = parse_words(col, options.word_separator);
          break;
        case Field::kIgnore:
          break;
      }
    }
    if (ok) result.checkins.push_back(std::move(c));
  }
  if (source.bad()) throw DataError("I/O error while reading check-ins");
  if (nonblank > 0 && 2 * result.skipped > nonblank) {
    throw DataError(std::to_string(result.skipped) + " of " + std::to_string(nonblank) +
                    " lines are malformed; the format descriptor or delimiter is probably wrong");
  }
  return result;
}

ParseResult read_checkins(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw MissingInputError(path.string());
  return parse_checkins(in, options);
}

void merge_poi_content(std::vector<CheckIn>& checkins, const std::filesystem::path& content_tsv) {
  std::ifstream in(content_tsv);
  if (!in) throw MissingInputError(content_tsv.string());
  std::unordered_map<std::string, std::vector<std::string>> content;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto cols = split(line, '\t');
    if (cols.size() != 2) continue;
    auto& words = content[std::string(trim(cols[0]))];
    for (auto& w : parse_words(cols[1], '|')) words.push_back(std::move(w));
  }
  for (auto& c : checkins) {
    const auto it = content.find(c.poi);
    if (it == content.end()) continue;
    for (const auto& w : it->second) {
      if (std::find(c.words.begin(), c.words.end(), w) == c.words.end()) c.words.push_back(w);
    }
  }
}

}  // namespace sta
