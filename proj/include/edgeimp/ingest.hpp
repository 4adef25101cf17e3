#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "edgeimp/graph.hpp"

namespace edgeimp {

/// One timestamped interaction (i, j, t) with a weight.
struct ContactRecord {
  std::string source;
  std::string target;
  std::int64_t t = 0;
  double weight = 1.0;
  std::size_t line = 0;  ///< 1-based line in the source file
};

/// int: integer ticks; year: calendar year; date: YYYY-MM-DD as days since
/// 1970-01-01; unix: integer seconds.
enum class TimeFormat { integer, year, date, unix_seconds };

TimeFormat parse_time_format(const std::string& name);
std::string to_string(TimeFormat f);

struct ParseOptions {
  char delimiter = ',';
  bool whitespace = false;  ///< split on runs of blanks instead of `delimiter`
  bool header = false;
  /// Zero-based column index or, with a header, a column name.
  std::string source_column = "0";
  std::string target_column = "1";
  std::string time_column = "2";
  std::optional<std::string> weight_column;
  double default_weight = 1.0;
  TimeFormat time_format = TimeFormat::integer;
  std::optional<std::string> missing_value;  ///< rows whose weight equals this are skipped
  bool allow_self_loops = false;             ///< otherwise self-loop rows are skipped
};

struct ParsedEdgeList {
  std::vector<ContactRecord> records;  ///< file order
  std::size_t skipped_missing = 0;
  std::size_t skipped_self_loops = 0;
};

/// Throws DataError for an unreadable file, ParseError (with the line) for a
/// malformed row, ConfigError for a column mapping that names no column.
ParsedEdgeList parse_edge_list(const std::filesystem::path& path, const ParseOptions& opts);
ParsedEdgeList parse_edge_list(std::istream& in, const ParseOptions& opts);

/// Parses a timestamp field in the given format; std::nullopt if malformed.
std::optional<std::int64_t> parse_time(const std::string& field, TimeFormat f);

enum class WeightMode { sum, count, last };

WeightMode parse_weight_mode(const std::string& name);
std::string to_string(WeightMode m);

struct AggregateOptions {
  std::int64_t window = 1;  ///< in units of the time format
  WeightMode mode = WeightMode::sum;
  bool undirected = false;  ///< merge (i, j) and (j, i)
  bool drop_empty = false;  ///< omit windows without records
  TimeFormat time_format = TimeFormat::integer;
};

/// One snapshot per window from the earliest record to the latest; snapshot
/// timestamps are window ordinals. Labels are sorted so the result does not
/// depend on record order. "last" keeps the record with the latest timestamp
/// (ties: the largest weight).
TemporalNetwork aggregate(const std::vector<ContactRecord>& records, const AggregateOptions& opts);

inline constexpr const char* kNetworkFormat = "edgeimp-temporal-network";
inline constexpr int kNetworkVersion = 1;

std::string network_to_json(const TemporalNetwork& net);
TemporalNetwork network_from_json(const std::string& text);

/// Versioned JSON file (see docs/network-format.md). Throws DataError on
/// I/O failure, version mismatch or a corrupted payload.
void save_network(const TemporalNetwork& net, const std::filesystem::path& path);
TemporalNetwork load_network(const std::filesystem::path& path);

}  // namespace edgeimp
