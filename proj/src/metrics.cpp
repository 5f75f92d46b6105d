// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fovdiff/metrics.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "fovdiff/dataset.hpp"
#include "fovdiff/error.hpp"
#include "fovdiff/grid_io.hpp"

namespace fovdiff {

using nlohmann::json;

void SatOptions::validate() const {
  if (!(band.low < band.high)) throw ValidationError("SAT band needs low < high");
}

double sat_area(const Grid& image, const SatOptions& options) {
  options.validate();
  const std::size_t rows = image.rows();
  const std::size_t cols = image.ndim() == 2 ? image.cols() : 1;
  const std::size_t n = image.size();
  std::vector<std::uint8_t> body(n);
  std::vector<std::uint8_t> fat(n);
  for (std::size_t i = 0; i < n; ++i) {
    body[i] = image[i] > options.body_threshold;
    fat[i] = body[i] && options.band.contains(image[i]);
  }
  auto is_body = [&](std::ptrdiff_t r, std::ptrdiff_t c) {
    if (r < 0 || c < 0 || r >= static_cast<std::ptrdiff_t>(rows) ||
        c >= static_cast<std::ptrdiff_t>(cols)) {
      return false;
    }
    return body[static_cast<std::size_t>(r) * cols + static_cast<std::size_t>(c)] != 0;
  };
  constexpr std::ptrdiff_t kDr[4] = {-1, 1, 0, 0};
  constexpr std::ptrdiff_t kDc[4] = {0, 0, -1, 1};

  std::vector<std::uint8_t> seen(n, 0);
  std::vector<std::size_t> stack;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t i = r * cols + c;
      if (!fat[i]) continue;
      bool ring = false;
      for (int k = 0; k < 4 && !ring; ++k) {
        ring = !is_body(static_cast<std::ptrdiff_t>(r) + kDr[k], static_cast<std::ptrdiff_t>(c) + kDc[k]);
      }
      if (ring && !seen[i]) {
        seen[i] = 1;
        stack.push_back(i);
      }
    }
  }
  std::size_t area = 0;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    ++area;
    const auto r = static_cast<std::ptrdiff_t>(i / cols);
    const auto c = static_cast<std::ptrdiff_t>(i % cols);
    for (int k = 0; k < 4; ++k) {
      const std::ptrdiff_t nr = r + kDr[k];
      const std::ptrdiff_t nc = c + kDc[k];
      if (nr < 0 || nc < 0 || nr >= static_cast<std::ptrdiff_t>(rows) ||
          nc >= static_cast<std::ptrdiff_t>(cols)) {
        continue;
      }
      const std::size_t j = static_cast<std::size_t>(nr) * cols + static_cast<std::size_t>(nc);
      if (fat[j] && !seen[j]) {
        seen[j] = 1;
        stack.push_back(j);
      }
    }
  }
  return static_cast<double>(area);
}

RegionError region_error(const Grid& a, const Grid& b, const Grid& region) {
  require_same_shape(a, b, "region_error");
  require_same_shape(a, region, "region_error region");
  double sq = 0.0;
  double abs = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (region[i] == 0.0) continue;
    const double d = a[i] - b[i];
    sq += d * d;
    abs += std::abs(d);
    ++count;
  }
  if (count == 0) throw ValidationError("region_error: region is empty");
  return {std::sqrt(sq / static_cast<double>(count)), abs / static_cast<double>(count)};
}

Moments sample_moments(std::span<const Grid> samples) {
  if (samples.size() < 2) throw ValidationError("sample_moments needs at least 2 samples");
  const Grid::Shape shape = samples.front().shape();
  for (const auto& s : samples) {
    if (s.shape() != shape) throw ShapeError("sample_moments: samples differ in shape");
  }
  const double n = static_cast<double>(samples.size());
  Moments m{Grid(shape), Grid(shape), std::nullopt};
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < s.size(); ++i) m.mean[i] += s[i];
  }
  for (double& v : m.mean.values()) v /= n;
  std::array<double, 4> cov{0.0, 0.0, 0.0, 0.0};
  const bool pair = shape.size() == 2;
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double d = s[i] - m.mean[i];
      m.variance[i] += d * d;
    }
    if (pair) cov[1] += (s[0] - m.mean[0]) * (s[1] - m.mean[1]);
  }
  for (double& v : m.variance.values()) v /= n - 1.0;
  if (pair) {
    m.covariance = std::array<double, 4>{m.variance[0], cov[1] / (n - 1.0), cov[1] / (n - 1.0),
                                         m.variance[1]};
  }
  return m;
}

namespace {

void validate_edges(const std::vector<double>& edges) {
  if (edges.empty() || edges.front() != 0.0) {
    throw ValidationError("TCI bin edges must start at 0");
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw ValidationError("TCI bin edges must increase");
  }
  if (!(edges.back() < 1.0)) throw ValidationError("TCI bin edges must be below 1");
}

AgreementAggregate aggregate(const std::vector<const AgreementRecord*>& members, double low,
                             double high) {
  AgreementAggregate a{low, high, members.size(), 0.0, 0.0, 0.0, 0.0};
  if (members.empty()) return a;
  for (const AgreementRecord* r : members) {
    const double trunc = r->sat_truncated - r->sat_true;
    const double comp = r->sat_completed - r->sat_true;
    a.truncated_mae += std::abs(trunc);
    a.truncated_mean_error += trunc;
    a.completed_mae += std::abs(comp);
    a.completed_mean_error += comp;
  }
  const double n = static_cast<double>(members.size());
  a.truncated_mae /= n;
  a.truncated_mean_error /= n;
  a.completed_mae /= n;
  a.completed_mean_error /= n;
  return a;
}

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool same_bits(const AgreementAggregate& a, const AgreementAggregate& b) {
  return same_bits(a.tci_low, b.tci_low) && same_bits(a.tci_high, b.tci_high) &&
         a.count == b.count && same_bits(a.truncated_mae, b.truncated_mae) &&
         same_bits(a.truncated_mean_error, b.truncated_mean_error) &&
         same_bits(a.completed_mae, b.completed_mae) &&
         same_bits(a.completed_mean_error, b.completed_mean_error);
}

json aggregate_json(const AgreementAggregate& a) {
  return {{"tci_low", a.tci_low},
          {"tci_high", a.tci_high},
          {"count", a.count},
          {"truncated_mae", a.truncated_mae},
          {"truncated_mean_error", a.truncated_mean_error},
          {"completed_mae", a.completed_mae},
          {"completed_mean_error", a.completed_mean_error}};
}

AgreementAggregate aggregate_from_json(const json& j) {
  return {j.at("tci_low").get<double>(),       j.at("tci_high").get<double>(),
          j.at("count").get<std::size_t>(),    j.at("truncated_mae").get<double>(),
          j.at("truncated_mean_error").get<double>(), j.at("completed_mae").get<double>(),
          j.at("completed_mean_error").get<double>()};
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError("csv line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

constexpr std::string_view kCsvHeader = "id,tci,sat_true,sat_truncated,sat_completed";

}  // namespace

AgreementReport build_report(std::vector<AgreementRecord> records, std::vector<double> bin_edges) {
  validate_edges(bin_edges);
  std::sort(records.begin(), records.end(),
            [](const AgreementRecord& a, const AgreementRecord& b) { return a.id < b.id; });
  AgreementReport report;
  report.bin_edges = std::move(bin_edges);
  report.records = std::move(records);
  const std::size_t n_bins = report.bin_edges.size();
  std::vector<std::vector<const AgreementRecord*>> members(n_bins);
  std::vector<const AgreementRecord*> all;
  for (const auto& r : report.records) {
    if (!(r.tci >= 0.0 && r.tci <= 1.0)) throw ValidationError("record " + r.id + ": TCI outside [0, 1]");
    const auto it = std::upper_bound(report.bin_edges.begin(), report.bin_edges.end(), r.tci);
    members[static_cast<std::size_t>(it - report.bin_edges.begin()) - 1].push_back(&r);
    all.push_back(&r);
  }
  for (std::size_t b = 0; b < n_bins; ++b) {
    const double high = b + 1 < n_bins ? report.bin_edges[b + 1] : 1.0;
    report.bins.push_back(aggregate(members[b], report.bin_edges[b], high));
  }
  report.overall = aggregate(all, 0.0, 1.0);
  return report;
}

EvaluationResult evaluate_dataset(const std::string& dataset_dir, const std::string& completed_dir,
                                  const SatOptions& options, std::vector<double> bin_edges) {
  options.validate();
  const DatasetManifest manifest = read_manifest(dataset_dir);
  EvaluationResult result;
  std::vector<AgreementRecord> records;
  for (const auto& s : manifest.samples) {
    const std::string completed_path = sample_path(completed_dir, s.id, "completed");
    if (!std::filesystem::exists(completed_path)) {
      result.missing.push_back(s.id);
      continue;
    }
    const Grid completed = read_grid(completed_path);
    const Grid image = read_grid(sample_path(dataset_dir, s.id, "image"));
    const Grid truncated = read_grid(sample_path(dataset_dir, s.id, "truncated"));
    require_same_shape(image, completed, ("completed image " + s.id).c_str());
    records.push_back({s.id, s.tci, sat_area(image, options), sat_area(truncated, options),
                       sat_area(completed, options)});
  }
  result.report = build_report(std::move(records), std::move(bin_edges));
  return result;
}

std::string report_to_json(const AgreementReport& report) {
  json records = json::array();
  for (const auto& r : report.records) {
    records.push_back({{"id", r.id},
                       {"tci", r.tci},
                       {"sat_true", r.sat_true},
                       {"sat_truncated", r.sat_truncated},
                       {"sat_completed", r.sat_completed}});
  }
  json bins = json::array();
  for (const auto& b : report.bins) bins.push_back(aggregate_json(b));
  const json doc = {{"bin_edges", report.bin_edges},
                    {"bins", bins},
                    {"overall", aggregate_json(report.overall)},
                    {"records", records}};
  return doc.dump(2) + "\n";
}

AgreementReport report_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    AgreementReport report;
    report.bin_edges = doc.at("bin_edges").get<std::vector<double>>();
    for (const auto& r : doc.at("records")) {
      report.records.push_back({r.at("id").get<std::string>(), r.at("tci").get<double>(),
                                r.at("sat_true").get<double>(), r.at("sat_truncated").get<double>(),
                                r.at("sat_completed").get<double>()});
    }
    for (const auto& b : doc.at("bins")) report.bins.push_back(aggregate_from_json(b));
    report.overall = aggregate_from_json(doc.at("overall"));
    return report;
  } catch (const json::exception& e) {
    throw FormatError(std::string("agreement report: ") + e.what());
  }
}

std::string records_to_csv(const std::vector<AgreementRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    if (r.id.find_first_of(",\n\"") != std::string::npos) {
      throw ValidationError("record id cannot contain commas, quotes or newlines: " + r.id);
    }
    out += r.id + ',' + format_double(r.tci) + ',' + format_double(r.sat_true) + ',' +
           format_double(r.sat_truncated) + ',' + format_double(r.sat_completed) + '\n';
  }
  return out;
}

std::vector<AgreementRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw FormatError("csv: bad header");
  std::vector<AgreementRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 5) {
      throw FormatError("csv line " + std::to_string(line_no) + ": expected 5 fields");
    }
    records.push_back({std::string(fields[0]), parse_double(fields[1], line_no),
                       parse_double(fields[2], line_no), parse_double(fields[3], line_no),
                       parse_double(fields[4], line_no)});
  }
  return records;
}

bool operator==(const AgreementRecord& a, const AgreementRecord& b) {
  return a.id == b.id && same_bits(a.tci, b.tci) && same_bits(a.sat_true, b.sat_true) &&
         same_bits(a.sat_truncated, b.sat_truncated) && same_bits(a.sat_completed, b.sat_completed);
}

bool operator==(const AgreementReport& a, const AgreementReport& b) {
  if (a.bin_edges.size() != b.bin_edges.size() || a.records != b.records ||
      a.bins.size() != b.bins.size() || !same_bits(a.overall, b.overall)) {
    return false;
  }
  for (std::size_t i = 0; i < a.bin_edges.size(); ++i) {
    if (!same_bits(a.bin_edges[i], b.bin_edges[i])) return false;
  }
  for (std::size_t i = 0; i < a.bins.size(); ++i) {
    if (!same_bits(a.bins[i], b.bins[i])) return false;
  }
  return true;
}

}  // namespace fovdiff
