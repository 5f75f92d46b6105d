// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fovdiff/config.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>

#include "binary_io.hpp"
#include "fovdiff/schedule.hpp"

namespace fovdiff {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  for (;;) {
    const auto pos = s.find(sep);
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
  return out;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split(v, ',')) out.push_back(to_double(key, item));
  return out;
}

std::vector<std::vector<double>> to_vectors(const std::string& key, const std::string& v) {
  std::vector<std::vector<double>> out;
  for (const auto& item : split(v, ';')) out.push_back(to_doubles(key, item));
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
std::string fmt_int(T v) {
  return std::to_string(v);
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt(v[i]);
  return out;
}

std::string fmt_vectors(const std::vector<std::vector<double>>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + fmt_list(v[i]);
  return out;
}

struct Field {
  std::function<void(RunConfig&, const std::string& key, const std::string& value)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define FOVDIFF_DOUBLE(path)                                                            \
  Field {                                                                               \
    [](RunConfig& c, const std::string& k, const std::string& v) { c.path = to_double(k, v); }, \
        [](const RunConfig& c) { return fmt(c.path); }                                  \
  }
#define FOVDIFF_INT(type, path)                                                         \
  Field {                                                                               \
    [](RunConfig& c, const std::string& k, const std::string& v) { c.path = to_int<type>(k, v); }, \
        [](const RunConfig& c) { return fmt_int(c.path); }                              \
  }

// Ordered by key so serialisation is stable.
const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      {"schedule.T", FOVDIFF_INT(int, schedule.steps)},
      {"schedule.beta_start", FOVDIFF_DOUBLE(schedule.beta_start)},
      {"schedule.beta_end", FOVDIFF_DOUBLE(schedule.beta_end)},

      {"sampler.variant",
       Field{[](RunConfig& c, const std::string& k, const std::string& v) {
               if (v == "ddim") {
                 c.sampler.variant = SamplerVariant::kDdim;
               } else if (v == "ddpm") {
                 c.sampler.variant = SamplerVariant::kDdpm;
               } else {
                 throw ConfigError(k, "expected ddim or ddpm, got '" + v + "'");
               }
             },
             [](const RunConfig& c) { return std::string(to_string(c.sampler.variant)); }}},
      {"sampler.n_steps", FOVDIFF_INT(int, sampler.n_steps)},
      {"sampler.U", FOVDIFF_INT(int, sampler.resample_count)},
      {"sampler.seed", FOVDIFF_INT(std::uint64_t, sampler.seed)},
      {"sampler.count", FOVDIFF_INT(std::size_t, sampler.count)},
      {"sampler.reuse_eps",
       Field{[](RunConfig& c, const std::string& k, const std::string& v) {
               c.sampler.reuse_eps = to_bool(k, v);
             },
             [](const RunConfig& c) { return std::string(c.sampler.reuse_eps ? "true" : "false"); }}},
      {"sampler.clip_x0",
       Field{[](RunConfig& c, const std::string& k, const std::string& v) {
               c.sampler.clip_x0 = to_bool(k, v);
             },
             [](const RunConfig& c) { return std::string(c.sampler.clip_x0 ? "true" : "false"); }}},

      {"denoiser.kind",
       Field{[](RunConfig& c, const std::string& k, const std::string& v) {
               if (v == "gmm") {
                 c.denoiser.kind = DenoiserKind::kGmm;
               } else if (v == "mlp") {
                 c.denoiser.kind = DenoiserKind::kMlp;
               } else {
                 throw ConfigError(k, "expected gmm or mlp, got '" + v + "'");
               }
             },
             [](const RunConfig& c) {
               return std::string(c.denoiser.kind == DenoiserKind::kGmm ? "gmm" : "mlp");
             }}},
      {"denoiser.checkpoint",
       Field{[](RunConfig& c, const std::string&, const std::string& v) { c.denoiser.checkpoint = v; },
             [](const RunConfig& c) { return c.denoiser.checkpoint; }}},
      {"denoiser.gmm.weights",
       Field{[](RunConfig& c, const std::string& k, const std::string& v) {
               c.denoiser.gmm.weights = to_doubles(k, v);
             },
             [](const RunConfig& c) { return fmt_list(c.denoiser.gmm.weights); }}},
      {"denoiser.gmm.means",
       Field{[](RunConfig& c, const std::string& k, const std::string& v) {
               c.denoiser.gmm.means = to_vectors(k, v);
             },
             [](const RunConfig& c) { return fmt_vectors(c.denoiser.gmm.means); }}},
      {"denoiser.gmm.variances",
       Field{[](RunConfig& c, const std::string& k, const std::string& v) {
               c.denoiser.gmm.variances = to_vectors(k, v);
             },
             [](const RunConfig& c) { return fmt_vectors(c.denoiser.gmm.variances); }}},

      {"train.learning_rate", FOVDIFF_DOUBLE(train.learning_rate)},
      {"train.batch_size", FOVDIFF_INT(std::size_t, train.batch_size)},
      {"train.iterations", FOVDIFF_INT(std::size_t, train.iterations)},
      {"train.seed", FOVDIFF_INT(std::uint64_t, train.seed)},
      {"train.embed_dim", FOVDIFF_INT(std::size_t, train.embed_dim)},
      {"train.log_every", FOVDIFF_INT(std::size_t, train.log_every)},
      {"train.count", FOVDIFF_INT(std::size_t, train_count)},
      {"train.hidden",
       Field{[](RunConfig& c, const std::string& k, const std::string& v) {
               c.train.hidden.clear();
               for (const auto& item : split(v, ',')) {
                 c.train.hidden.push_back(to_int<std::size_t>(k, item));
               }
             },
             [](const RunConfig& c) {
               std::string out;
               for (std::size_t i = 0; i < c.train.hidden.size(); ++i) {
                 out += (i ? "," : "") + std::to_string(c.train.hidden[i]);
               }
               return out;
             }}},

      {"data.rows", FOVDIFF_INT(std::size_t, data.phantom.rows)},
      {"data.cols", FOVDIFF_INT(std::size_t, data.phantom.cols)},
      {"data.count", FOVDIFF_INT(std::size_t, data.count)},
      {"data.seed", FOVDIFF_INT(std::uint64_t, data.seed)},
      {"data.hu_low", FOVDIFF_DOUBLE(data.hu_low)},
      {"data.hu_high", FOVDIFF_DOUBLE(data.hu_high)},
      {"data.phantom.axis_row_min", FOVDIFF_DOUBLE(data.phantom.axis_row_min)},
      {"data.phantom.axis_row_max", FOVDIFF_DOUBLE(data.phantom.axis_row_max)},
      {"data.phantom.axis_col_min", FOVDIFF_DOUBLE(data.phantom.axis_col_min)},
      {"data.phantom.axis_col_max", FOVDIFF_DOUBLE(data.phantom.axis_col_max)},
      {"data.phantom.center_jitter", FOVDIFF_DOUBLE(data.phantom.center_jitter)},
      {"data.phantom.fat_min", FOVDIFF_DOUBLE(data.phantom.fat_min)},
      {"data.phantom.fat_max", FOVDIFF_DOUBLE(data.phantom.fat_max)},
      {"data.phantom.background", FOVDIFF_DOUBLE(data.phantom.background)},
      {"data.phantom.fat_low", FOVDIFF_DOUBLE(data.phantom.fat.low)},
      {"data.phantom.fat_high", FOVDIFF_DOUBLE(data.phantom.fat.high)},
      {"data.phantom.soft_low", FOVDIFF_DOUBLE(data.phantom.soft_tissue.low)},
      {"data.phantom.soft_high", FOVDIFF_DOUBLE(data.phantom.soft_tissue.high)},
      {"data.phantom.texture_sigma", FOVDIFF_DOUBLE(data.phantom.texture_sigma)},
      {"data.truncation.radius_min", FOVDIFF_DOUBLE(data.truncation.radius_min)},
      {"data.truncation.radius_max", FOVDIFF_DOUBLE(data.truncation.radius_max)},
      {"data.truncation.center_jitter", FOVDIFF_DOUBLE(data.truncation.center_jitter)},
      {"data.truncation.tci_min", FOVDIFF_DOUBLE(data.truncation.tci_min)},
      {"data.truncation.tci_max", FOVDIFF_DOUBLE(data.truncation.tci_max)},
      {"data.truncation.max_attempts", FOVDIFF_INT(int, data.truncation.max_attempts)},
      {"data.truncation.fill", FOVDIFF_DOUBLE(data.truncation.fill)},

      {"metrics.band_low", FOVDIFF_DOUBLE(metrics.sat.band.low)},
      {"metrics.band_high", FOVDIFF_DOUBLE(metrics.sat.band.high)},
      {"metrics.body_threshold", FOVDIFF_DOUBLE(metrics.sat.body_threshold)},
      {"metrics.tci_bins",
       Field{[](RunConfig& c, const std::string& k, const std::string& v) {
               c.metrics.tci_bins = to_doubles(k, v);
             },
             [](const RunConfig& c) { return fmt_list(c.metrics.tci_bins); }}},

      {"output.dir",
       Field{[](RunConfig& c, const std::string&, const std::string& v) { c.output.dir = v; },
             [](const RunConfig& c) { return c.output.dir; }}},
      {"output.dump_every", FOVDIFF_INT(int, output.dump_every)},
  };
  return table;
}

#undef FOVDIFF_DOUBLE
#undef FOVDIFF_INT

// Re-raises validation failures of owning modules against a config key.
template <typename Fn>
void check_with(const char* key, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace

const char* to_string(SamplerVariant variant) {
  return variant == SamplerVariant::kDdim ? "ddim" : "ddpm";
}

void RunConfig::validate() const {
  if (schedule.steps < 1) throw ConfigError("schedule.T", "must be >= 1");
  check_with("schedule.beta_start", [&] {
    linear_beta_schedule(schedule.steps, schedule.beta_start, schedule.beta_end);
  });
  if (sampler.n_steps < 1) throw ConfigError("sampler.n_steps", "must be >= 1");
  if (sampler.n_steps > schedule.steps) throw ConfigError("sampler.n_steps", "must not exceed schedule.T");
  if (sampler.resample_count < 1) throw ConfigError("sampler.U", "must be >= 1");
  if (sampler.count < 1) throw ConfigError("sampler.count", "must be >= 1");

  if (denoiser.kind == DenoiserKind::kGmm) {
    check_with("denoiser.gmm.weights", [&] { denoiser.gmm.validate(); });
  }
  if (!denoiser.checkpoint.empty() && !std::filesystem::exists(denoiser.checkpoint)) {
    throw ConfigError("denoiser.checkpoint", "file not found: " + denoiser.checkpoint);
  }

  check_with("train.learning_rate", [&] { train.validate(); });
  if (train_count < 1) throw ConfigError("train.count", "must be >= 1");

  check_with("data.phantom", [&] { data.phantom.validate(); });
  check_with("data.truncation", [&] { data.truncation.validate(); });
  if (data.count < 1) throw ConfigError("data.count", "must be >= 1");
  if (!(data.hu_low < data.hu_high)) throw ConfigError("data.hu_low", "must be below data.hu_high");

  check_with("metrics.band_low", [&] { metrics.sat.validate(); });
  check_with("metrics.tci_bins", [&] { build_report({}, metrics.tci_bins); });

  if (output.dir.empty()) throw ConfigError("output.dir", "must not be empty");
  if (output.dump_every < 0) throw ConfigError("output.dump_every", "must be >= 0");
}

RunConfig parse_config_text(std::string_view text, const std::string& source) {
  RunConfig config;
  std::map<std::string, std::size_t> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("<parse>", where + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto field = fields().find(key);
    if (field == fields().end()) throw ConfigError(key, where + ": unknown key");
    if (const auto prev = seen.find(key); prev != seen.end()) {
      throw ConfigError(key, where + ": repeated (first set on line " +
                                 std::to_string(prev->second) + ")");
    }
    seen.emplace(key, line_no);
    try {
      field->second.set(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(key, where + ": " + std::string(e.what()).substr(key.size() + 2));
    }
  }
  config.validate();
  return config;
}

RunConfig parse_config(const std::string& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("<file>", "config not found: " + path);
  return parse_config_text(detail::read_file_bytes(path), path);
}

std::string config_to_text(const RunConfig& config) {
  std::string out;
  for (const auto& [key, field] : fields()) out += key + " = " + field.get(config) + "\n";
  return out;
}

void apply_env_overrides(RunConfig& config) {
  const char* env = std::getenv("DIFG_SEED");
  if (env == nullptr || *env == '\0') return;
  const auto seed = to_int<std::uint64_t>("DIFG_SEED", env);
  config.sampler.seed = seed;
  config.data.seed = seed;
  config.train.seed = seed;
}

}  // namespace fovdiff
