#include "ctdg/events.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ctdg {

void EventLog::validate() const {
  double prev_time = -1.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const EventRecord& e = events[i];
    const std::string where = "event " + std::to_string(i) + ": ";
    if (!(e.time >= 0.0) || !std::isfinite(e.time))
      throw std::invalid_argument(where + "time must be finite and >= 0");
    if (e.src == e.dst)
      throw std::invalid_argument(where + "self-events are rejected");
    if (e.src >= node_count || e.dst >= node_count)
      throw std::invalid_argument(where + "node index out of range");
    if (e.sign != 1 && e.sign != -1)
      throw std::invalid_argument(where + "sign must be +1 or -1");
    if (e.features.size() != feature_dim)
      throw std::invalid_argument(where + "feature dimension mismatch");
    for (double f : e.features)
      if (!std::isfinite(f))
        throw std::invalid_argument(where + "non-finite feature");
    if (i > 0 && e.time < prev_time)
      throw std::invalid_argument("unsorted log: first inversion at event " +
                                  std::to_string(i));
    prev_time = e.time;
  }
}

std::vector<double> EventLog::effective_features(std::size_t event_index) const {
  const EventRecord& e = events.at(event_index);
  std::vector<double> out = e.features;
  if (e.sign < 0)
    for (double& f : out) f = -f;
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

[[noreturn]] void csv_fail(const std::filesystem::path& path, std::size_t line,
                           const std::string& msg) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " +
                           msg);
}

double parse_double(const std::string& s, const std::filesystem::path& path,
                    std::size_t line) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) csv_fail(path, line, "trailing characters in '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    csv_fail(path, line, "not a number: '" + s + "'");
  } catch (const std::out_of_range&) {
    csv_fail(path, line, "number out of range: '" + s + "'");
  }
}

long long parse_int(const std::string& s, const std::filesystem::path& path,
                    std::size_t line) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) csv_fail(path, line, "trailing characters in '" + s + "'");
    return v;
  } catch (const std::exception&) {
    csv_fail(path, line, "not an integer: '" + s + "'");
  }
}

}  // namespace

EventLog EventLog::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "src" || header[1] != "dst" ||
      header[2] != "time" || header[3] != "sign")
    csv_fail(path, 1, "header must start with src,dst,time,sign");
  const std::size_t feature_dim = header.size() - 4;
  for (std::size_t i = 0; i < feature_dim; ++i)
    if (header[4 + i] != "f" + std::to_string(i))
      csv_fail(path, 1, "feature column " + std::to_string(i) + " must be named f" +
                            std::to_string(i));

  EventLog log;
  log.feature_dim = feature_dim;
  NodeId max_node = 0;
  std::size_t lineno = 1;
  double prev_time = -1.0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 4 + feature_dim)
      csv_fail(path, lineno, "expected " + std::to_string(4 + feature_dim) +
                                 " fields, got " + std::to_string(f.size()));
    EventRecord e;
    const long long src = parse_int(f[0], path, lineno);
    const long long dst = parse_int(f[1], path, lineno);
    if (src < 0 || dst < 0) csv_fail(path, lineno, "negative node index");
    e.src = static_cast<NodeId>(src);
    e.dst = static_cast<NodeId>(dst);
    e.time = parse_double(f[2], path, lineno);
    if (!(e.time >= 0.0)) csv_fail(path, lineno, "time must be >= 0");
    if (e.time < prev_time) csv_fail(path, lineno, "rows must be time-sorted");
    prev_time = e.time;
    const long long sign = parse_int(f[3], path, lineno);
    if (sign != 1 && sign != -1) csv_fail(path, lineno, "sign must be 1 or -1");
    e.sign = static_cast<int>(sign);
    if (e.src == e.dst) csv_fail(path, lineno, "self-event");
    e.features.reserve(feature_dim);
    for (std::size_t i = 0; i < feature_dim; ++i)
      e.features.push_back(parse_double(f[4 + i], path, lineno));
    max_node = std::max({max_node, e.src, e.dst});
    log.events.push_back(std::move(e));
  }
  log.node_count = log.events.empty() ? 0 : max_node + 1;
  log.validate();
  return log;
}

void EventLog::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "src,dst,time,sign";
  for (std::size_t i = 0; i < feature_dim; ++i) out << ",f" << i;
  out << "\n";
  char buf[64];
  for (const EventRecord& e : events) {
    out << e.src << ',' << e.dst << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", e.time);
    out << buf << ',' << e.sign;
    for (double f : e.features) {
      std::snprintf(buf, sizeof(buf), "%.17g", f);
      out << ',' << buf;
    }
    out << "\n";
  }
}

double time_scale_p95(const EventLog& log) {
  std::vector<double> gaps;
  gaps.reserve(log.events.size());
  for (std::size_t i = 1; i < log.events.size(); ++i)
    gaps.push_back(log.events[i].time - log.events[i - 1].time);
  if (gaps.empty()) return 1.0;
  std::sort(gaps.begin(), gaps.end());
  // nearest-rank percentile
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(gaps.size())));
  if (rank == 0) rank = 1;
  const double p95 = gaps[std::min(rank - 1, gaps.size() - 1)];
  if (p95 > 0.0) return p95;
  const double hi = gaps.back();
  return hi > 0.0 ? hi : 1.0;
}

}  // namespace ctdg
