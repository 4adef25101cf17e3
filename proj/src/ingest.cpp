#include "edgeimp/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "edgeimp/error.hpp"
#include "json.hpp"

namespace edgeimp {

using nlohmann::json;

TimeFormat parse_time_format(const std::string& name) {
  if (name == "int") return TimeFormat::integer;
  if (name == "year") return TimeFormat::year;
  if (name == "date") return TimeFormat::date;
  if (name == "unix") return TimeFormat::unix_seconds;
  throw ConfigError("unknown time format '" + name + "' (expected int, year, date or unix)");
}

std::string to_string(TimeFormat f) {
  switch (f) {
    case TimeFormat::integer: return "int";
    case TimeFormat::year: return "year";
    case TimeFormat::date: return "date";
    case TimeFormat::unix_seconds: return "unix";
  }
  return "int";
}

WeightMode parse_weight_mode(const std::string& name) {
  if (name == "sum") return WeightMode::sum;
  if (name == "count") return WeightMode::count;
  if (name == "last") return WeightMode::last;
  throw ConfigError("unknown weight mode '" + name + "' (expected sum, count or last)");
}

std::string to_string(WeightMode m) {
  switch (m) {
    case WeightMode::sum: return "sum";
    case WeightMode::count: return "count";
    case WeightMode::last: return "last";
  }
  return "sum";
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<std::int64_t> parse_int(const std::string& s) {
  std::int64_t v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::vector<std::string> split_row(const std::string& line, const ParseOptions& opts) {
  std::vector<std::string> fields;
  if (opts.whitespace) {
    std::istringstream ss(line);
    std::string f;
    while (ss >> f) fields.push_back(f);
    return fields;
  }
  std::string cur;
  for (char c : line) {
    if (c == opts.delimiter) {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

std::size_t resolve_column(const std::string& ref, const std::vector<std::string>& header, const char* role) {
  if (auto idx = parse_int(ref); idx && *idx >= 0) return static_cast<std::size_t>(*idx);
  if (header.empty())
    throw ConfigError(std::string(role) + " column '" + ref + "' is a name but the file has no header");
  auto it = std::find(header.begin(), header.end(), ref);
  if (it == header.end()) throw ConfigError(std::string(role) + " column '" + ref + "' not found in header");
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

std::optional<std::int64_t> parse_time(const std::string& field, TimeFormat f) {
  switch (f) {
    case TimeFormat::integer:
    case TimeFormat::year:
    case TimeFormat::unix_seconds:
      return parse_int(field);
    case TimeFormat::date: {
      if (field.size() != 10 || field[4] != '-' || field[7] != '-') return std::nullopt;
      const auto y = parse_int(field.substr(0, 4));
      const auto m = parse_int(field.substr(5, 2));
      const auto d = parse_int(field.substr(8, 2));
      if (!y || !m || !d || *m < 1 || *m > 12 || *d < 1 || *d > 31) return std::nullopt;
      const std::chrono::year_month_day ymd{std::chrono::year{static_cast<int>(*y)},
                                            std::chrono::month{static_cast<unsigned>(*m)},
                                            std::chrono::day{static_cast<unsigned>(*d)}};
      if (!ymd.ok()) return std::nullopt;
      return std::chrono::sys_days{ymd}.time_since_epoch().count();
    }
  }
  return std::nullopt;
}

ParsedEdgeList parse_edge_list(const std::filesystem::path& path, const ParseOptions& opts) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  return parse_edge_list(in, opts);
}

ParsedEdgeList parse_edge_list(std::istream& in, const ParseOptions& opts) {
  if (!(opts.default_weight >= 0.0)) throw ConfigError("default weight must be non-negative");
  ParsedEdgeList out;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  bool resolved = false;
  std::size_t cs = 0, ct = 0, ctime = 0;
  std::optional<std::size_t> cw;
  auto resolve = [&] {
    cs = resolve_column(opts.source_column, header, "source");
    ct = resolve_column(opts.target_column, header, "target");
    ctime = resolve_column(opts.time_column, header, "time");
    if (opts.weight_column) cw = resolve_column(*opts.weight_column, header, "weight");
    if (!header.empty()) {
      for (std::size_t c : {cs, ct, ctime})
        if (c >= header.size()) throw ConfigError("column index " + std::to_string(c) + " beyond header width");
      if (cw && *cw >= header.size()) throw ConfigError("weight column beyond header width");
    }
    resolved = true;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    if (opts.header && header.empty()) {
      header = split_row(line, opts);
      continue;
    }
    if (!resolved) resolve();
    const auto fields = split_row(line, opts);
    // A trailing weight column may be absent; the default weight applies.
    const std::size_t need = std::max({cs, ct, ctime}) + 1;
    if (fields.size() < need)
      throw ParseError(line_no, "expected at least " + std::to_string(need) + " columns, found " +
                                    std::to_string(fields.size()));
    ContactRecord r;
    r.line = line_no;
    r.source = fields[cs];
    r.target = fields[ct];
    if (r.source.empty() || r.target.empty()) throw ParseError(line_no, "empty node label");
    const std::string wfield = cw && *cw < fields.size() ? fields[*cw] : std::string();
    if (opts.missing_value && cw && wfield == *opts.missing_value) {
      ++out.skipped_missing;
      continue;
    }
    const auto t = parse_time(fields[ctime], opts.time_format);
    if (!t)
      throw ParseError(line_no, "unparseable timestamp '" + fields[ctime] + "' for format " +
                                    to_string(opts.time_format));
    r.t = *t;
    if (wfield.empty()) {
      r.weight = opts.default_weight;
    } else {
      const auto w = parse_double(wfield);
      if (!w || !std::isfinite(*w)) throw ParseError(line_no, "unparseable weight '" + wfield + "'");
      if (*w < 0.0) throw ParseError(line_no, "negative weight " + wfield);
      r.weight = *w;
    }
    if (r.source == r.target && !opts.allow_self_loops) {
      ++out.skipped_self_loops;
      continue;
    }
    out.records.push_back(std::move(r));
  }
  if (!resolved && !opts.header) resolve();
  return out;
}

TemporalNetwork aggregate(const std::vector<ContactRecord>& records, const AggregateOptions& opts) {
  if (records.empty()) throw DataError("aggregate needs at least one record");
  if (opts.window <= 0) throw DataError("aggregation window must be positive");

  std::vector<std::string> labels;
  for (const auto& r : records) {
    labels.push_back(r.source);
    labels.push_back(r.target);
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  auto index_of = [&](const std::string& s) {
    return static_cast<NodeIndex>(std::lower_bound(labels.begin(), labels.end(), s) - labels.begin());
  };

  std::int64_t t_min = records.front().t, t_max = records.front().t;
  for (const auto& r : records) {
    t_min = std::min(t_min, r.t);
    t_max = std::max(t_max, r.t);
  }
  auto ordinal = [&](std::int64_t t) { return (t - t_min) / opts.window; };

  struct Item {
    std::int64_t window;
    EdgeKey key;
    std::int64_t t;
    double weight;
    auto operator<=>(const Item&) const = default;
  };
  std::vector<Item> items;
  items.reserve(records.size());
  for (const auto& r : records) {
    NodeIndex i = index_of(r.source), j = index_of(r.target);
    if (opts.undirected && j < i) std::swap(i, j);
    items.push_back({ordinal(r.t), {i, j}, r.t, r.weight});
  }
  // Canonical order makes floating-point sums independent of input order.
  std::sort(items.begin(), items.end());

  std::map<std::int64_t, std::vector<Edge>> windows;
  for (std::size_t k = 0; k < items.size();) {
    std::size_t end = k;
    double value = 0.0;
    while (end < items.size() && items[end].window == items[k].window && items[end].key == items[k].key) {
      switch (opts.mode) {
        case WeightMode::sum: value += items[end].weight; break;
        case WeightMode::count: value += 1.0; break;
        case WeightMode::last: value = items[end].weight; break;  // sorted by (t, weight)
      }
      ++end;
    }
    windows[items[k].window].push_back({items[k].key, value});
    k = end;
  }

  std::vector<Snapshot> snaps;
  const std::int64_t last = ordinal(t_max);
  for (std::int64_t w = 0; w <= last; ++w) {
    auto it = windows.find(w);
    if (it == windows.end() && opts.drop_empty) continue;
    snaps.emplace_back(labels.size(), !opts.undirected, w, it == windows.end() ? std::vector<Edge>{} : it->second);
  }
  NetworkMetadata meta;
  meta.time_format = to_string(opts.time_format);
  meta.time_origin = t_min;
  meta.window = opts.window;
  meta.weight_mode = to_string(opts.mode);
  return TemporalNetwork(std::move(labels), !opts.undirected, std::move(snaps), std::move(meta));
}

std::string network_to_json(const TemporalNetwork& net) {
  json j;
  j["format"] = kNetworkFormat;
  j["version"] = kNetworkVersion;
  j["directed"] = net.directed();
  j["labels"] = std::vector<std::string>(net.labels().begin(), net.labels().end());
  const auto& m = net.metadata();
  j["metadata"] = {{"time_format", m.time_format},
                   {"time_origin", m.time_origin},
                   {"window", m.window},
                   {"weight_mode", m.weight_mode},
                   {"extra", m.extra}};
  json snaps = json::array();
  for (const auto& s : net.snapshots()) {
    json edges = json::array();
    for (const auto& e : s.edges()) edges.push_back(json::array({e.key.i, e.key.j, e.weight}));
    snaps.push_back({{"timestamp", s.timestamp()}, {"edges", std::move(edges)}});
  }
  j["snapshots"] = std::move(snaps);
  return j.dump(1) + "\n";
}

TemporalNetwork network_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("corrupted network file: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", std::string()) != kNetworkFormat)
      throw DataError("not an edgeimp network file");
    const int version = j.at("version").get<int>();
    if (version != kNetworkVersion)
      throw DataError("unsupported network file version " + std::to_string(version) + " (expected " +
                      std::to_string(kNetworkVersion) + ")");
    const bool directed = j.at("directed").get<bool>();
    auto labels = j.at("labels").get<std::vector<std::string>>();
    NetworkMetadata meta;
    const auto& jm = j.at("metadata");
    meta.time_format = jm.at("time_format").get<std::string>();
    meta.time_origin = jm.at("time_origin").get<std::int64_t>();
    meta.window = jm.at("window").get<std::int64_t>();
    meta.weight_mode = jm.at("weight_mode").get<std::string>();
    meta.extra = jm.at("extra").get<std::map<std::string, std::string>>();
    std::vector<Snapshot> snaps;
    for (const auto& js : j.at("snapshots")) {
      std::vector<Edge> edges;
      for (const auto& je : js.at("edges")) {
        if (!je.is_array() || je.size() != 3) throw DataError("corrupted network file: malformed edge");
        edges.push_back({{je[0].get<NodeIndex>(), je[1].get<NodeIndex>()}, je[2].get<double>()});
      }
      snaps.emplace_back(labels.size(), directed, js.at("timestamp").get<std::int64_t>(), std::move(edges));
    }
    return TemporalNetwork(std::move(labels), directed, std::move(snaps), std::move(meta));
  } catch (const json::exception& e) {
    throw DataError(std::string("corrupted network file: ") + e.what());
  }
}

void save_network(const TemporalNetwork& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << network_to_json(net);
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

TemporalNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return network_from_json(ss.str());
}

}  // namespace edgeimp
