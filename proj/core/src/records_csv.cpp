#include "pulab/records_csv.hpp"

#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace pulab {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <class Int>
Int parse_integer(const std::string& text) {
  Int value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("malformed integer '" + text + "'");
  return value;
}

bool parse_flag(const std::string& text) {
  if (text == "0") return false;
  if (text == "1") return true;
  throw std::invalid_argument("malformed flag '" + text + "'");
}

void expect_header(std::istream& in, const std::string& header) {
  std::string line;
  if (!std::getline(in, line) || line != header)
    throw std::invalid_argument("expected CSV header '" + header + "'");
}

using CurveKey = std::tuple<std::uint64_t, std::string, double>;

}  // namespace

std::string format_double(double x) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, x);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buffer, ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("malformed number '" + text + "'");
  return value;
}

void write_runs_csv(std::ostream& out, std::span<const RunRecord> records) {
  out << "seed,rule,eta,setting,env,steps,censored\n";
  for (const auto& r : records) {
    out << r.seed << ',' << r.rule << ',' << format_double(r.eta) << ',' << r.setting << ',' << r.env << ','
        << r.steps << ',' << (r.censored ? 1 : 0) << '\n';
  }
}

void write_curves_csv(std::ostream& out, std::span<const RunRecord> records) {
  out << "seed,rule,eta,step,jbar\n";
  for (const auto& r : records) {
    for (const auto& p : r.curve)
      out << r.seed << ',' << r.rule << ',' << format_double(r.eta) << ',' << p.step << ',' << format_double(p.jbar)
          << '\n';
  }
}

std::vector<RunRecord> read_runs_csv(std::istream& in) {
  expect_header(in, "seed,rule,eta,setting,env,steps,censored");
  std::vector<RunRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_line(line);
    if (f.size() != 7) throw std::invalid_argument("runs.csv: expected 7 fields in '" + line + "'");
    RunRecord r;
    r.seed = parse_integer<std::uint64_t>(f[0]);
    r.rule = f[1];
    r.eta = parse_double(f[2]);
    r.setting = f[3];
    r.env = f[4];
    r.steps = parse_integer<std::int64_t>(f[5]);
    r.censored = parse_flag(f[6]);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<RunRecord> read_records(std::istream& runs, std::istream& curves) {
  auto records = read_runs_csv(runs);
  std::map<CurveKey, std::size_t> index;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const CurveKey key{records[i].seed, records[i].rule, records[i].eta};
    if (!index.emplace(key, i).second) throw std::invalid_argument("runs.csv: duplicate (seed, rule, eta)");
  }
  expect_header(curves, "seed,rule,eta,step,jbar");
  std::string line;
  while (std::getline(curves, line)) {
    if (line.empty()) continue;
    const auto f = split_line(line);
    if (f.size() != 5) throw std::invalid_argument("curves.csv: expected 5 fields in '" + line + "'");
    const CurveKey key{parse_integer<std::uint64_t>(f[0]), f[1], parse_double(f[2])};
    const auto it = index.find(key);
    if (it == index.end()) throw std::invalid_argument("curves.csv: row without a matching run: '" + line + "'");
    records[it->second].curve.push_back({parse_integer<std::int64_t>(f[3]), parse_double(f[4])});
  }
  return records;
}

}  // namespace pulab
