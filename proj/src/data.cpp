// Copyright 2026 The fic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fic/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "fic/binary_io.hpp"
#include "fic/error.hpp"

namespace fic {

namespace {

constexpr std::uint16_t kFeatureVersion = 1;
constexpr std::uint8_t kHasLabels = 0x01;

std::string read_text(const std::filesystem::path& path) {
  auto bytes = read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> lines_of(const std::string& text) {
  std::vector<std::string_view> out;
  for (auto line : split(text, '\n')) {
    line = trim(line);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

FeatureSet FeatureSet::from_columns(const Eigen::MatrixXd& cols, std::vector<std::uint32_t> labels,
                                    std::string source) {
  FeatureSet set;
  set.dim = static_cast<std::size_t>(cols.rows());
  set.count = static_cast<std::size_t>(cols.cols());
  set.values.assign(cols.data(), cols.data() + cols.size());
  set.labels = std::move(labels);
  set.source = std::move(source);
  return set;
}

FeatureSet FeatureSet::slice(std::size_t first, std::size_t n) const {
  if (first + n > count) throw ShapeError("slice out of range");
  FeatureSet out;
  out.dim = dim;
  out.count = n;
  out.values.assign(values.begin() + static_cast<std::ptrdiff_t>(first * dim),
                    values.begin() + static_cast<std::ptrdiff_t>((first + n) * dim));
  if (has_labels()) {
    out.labels.assign(labels.begin() + static_cast<std::ptrdiff_t>(first),
                      labels.begin() + static_cast<std::ptrdiff_t>(first + n));
  }
  out.source = source;
  return out;
}

FeatureSet FeatureSet::select(std::span<const std::size_t> rows) const {
  FeatureSet out;
  out.dim = dim;
  out.count = rows.size();
  out.source = source;
  out.values.reserve(rows.size() * dim);
  for (auto r : rows) {
    if (r >= count) throw ShapeError("row index out of range");
    auto src = row(r);
    out.values.insert(out.values.end(), src.begin(), src.end());
    if (has_labels()) out.labels.push_back(labels[r]);
  }
  return out;
}

void FeatureSet::validate() const {
  if (count == 0 || dim == 0) throw ShapeError("feature set must have N >= 1 and D >= 1");
  if (values.size() != count * dim) throw ShapeError("feature data length is not N*D");
  if (has_labels() && labels.size() != count) throw ShapeError("label count does not match N");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error("non-finite feature value at row " + std::to_string(i / dim) + ", column " +
                  std::to_string(i % dim));
    }
  }
}

std::vector<std::uint8_t> encode_features(const FeatureSet& set) {
  set.validate();
  if (set.count > UINT32_MAX || set.dim > UINT16_MAX) throw ConfigError("feature set too large for FEA1");
  ByteWriter w;
  w.magic("FEA1");
  w.u16(kFeatureVersion);
  w.u32(static_cast<std::uint32_t>(set.count));
  w.u16(static_cast<std::uint16_t>(set.dim));
  w.u8(set.has_labels() ? kHasLabels : 0);
  for (double v : set.values) w.f32(static_cast<float>(v));
  for (auto l : set.labels) w.u32(l);
  return w.take();
}

FeatureSet decode_features(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic("FEA1");
  const std::size_t version_at = r.offset();
  if (const auto version = r.u16(); version != kFeatureVersion) {
    throw FormatError(version_at, "unsupported feature file version " + std::to_string(version));
  }
  FeatureSet set;
  set.count = r.u32();
  const std::size_t dim_at = r.offset();
  set.dim = r.u16();
  if (set.count == 0 || set.dim == 0) throw FormatError(dim_at, "feature file declares N or D = 0");
  const std::size_t flags_at = r.offset();
  const auto flags = r.u8();
  if ((flags & ~kHasLabels) != 0) throw FormatError(flags_at, "unknown flag bits");
  set.values.resize(set.count * set.dim);
  for (std::size_t i = 0; i < set.values.size(); ++i) {
    const std::size_t at = r.offset();
    const float v = r.f32();
    if (!std::isfinite(v)) {
      throw FormatError(at, "non-finite value at row " + std::to_string(i / set.dim) + ", column " +
                                std::to_string(i % set.dim));
    }
    set.values[i] = v;
  }
  if (flags & kHasLabels) {
    set.labels.resize(set.count);
    for (auto& l : set.labels) l = r.u32();
  }
  r.expect_end();
  return set;
}

std::string features_to_csv(const FeatureSet& set) {
  std::string out;
  for (std::size_t j = 0; j < set.dim; ++j) {
    if (j) out += ',';
    out += "f" + std::to_string(j);
  }
  if (set.has_labels()) out += ",label";
  out += '\n';
  for (std::size_t i = 0; i < set.count; ++i) {
    auto row = set.row(i);
    for (std::size_t j = 0; j < set.dim; ++j) {
      if (j) out += ',';
      out += format_double(row[j]);
    }
    if (set.has_labels()) out += "," + std::to_string(set.labels[i]);
    out += '\n';
  }
  return out;
}

FeatureSet features_from_csv(const std::string& text) {
  auto lines = lines_of(text);
  auto offset_of = [&](std::string_view l) { return static_cast<std::size_t>(l.data() - text.data()); };
  if (lines.empty()) throw FormatError(0, "empty feature CSV");
  bool labelled = false;
  std::size_t first = 0;
  {
    auto cells = split(lines[0], ',');
    double probe;
    if (!parse_number(cells[0], probe)) {
      labelled = trim(cells.back()) == "label";
      first = 1;
    }
  }
  FeatureSet set;
  for (std::size_t li = first; li < lines.size(); ++li) {
    auto cells = split(lines[li], ',');
    const std::size_t row = li - first;
    const std::size_t width = cells.size() - (labelled ? 1 : 0);
    if (set.dim == 0) set.dim = width;
    if (width != set.dim || width == 0) {
      throw FormatError(offset_of(lines[li]), "CSV line " + std::to_string(li + 1) + " has " + std::to_string(width) +
                                " feature columns, expected " + std::to_string(set.dim));
    }
    for (std::size_t j = 0; j < width; ++j) {
      double v;
      if (!parse_number(cells[j], v) || !std::isfinite(v)) {
        throw FormatError(offset_of(lines[li]), "bad or non-finite value at row " + std::to_string(row) + ", column " +
                                  std::to_string(j));
      }
      set.values.push_back(v);
    }
    if (labelled) {
      std::uint32_t l;
      if (!parse_number(cells.back(), l)) throw FormatError(offset_of(lines[li]), "bad label at row " + std::to_string(row));
      set.labels.push_back(l);
    }
    ++set.count;
  }
  if (set.count == 0) throw FormatError(0, "feature CSV has no rows");
  return set;
}

FeatureSet read_features(const std::filesystem::path& path) {
  FeatureSet set = path.extension() == ".csv" ? features_from_csv(read_text(path))
                                               : decode_features(read_file(path));
  set.source = path.filename().string();
  return set;
}

void write_features(const std::filesystem::path& path, const FeatureSet& set) {
  if (path.extension() == ".csv") {
    set.validate();
    write_text_atomic(path, features_to_csv(set));
  } else {
    write_file_atomic(path, encode_features(set));
  }
}

std::string pairs_to_csv(const VerificationPairs& pairs) {
  std::string out = "index_a,index_b,same\n";
  for (const auto& p : pairs) {
    out += std::to_string(p.a) + "," + std::to_string(p.b) + "," + (p.same ? "1" : "0") + "\n";
  }
  return out;
}

VerificationPairs pairs_from_csv(const std::string& text) {
  auto lines = lines_of(text);
  auto offset_of = [&](std::string_view l) { return static_cast<std::size_t>(l.data() - text.data()); };
  VerificationPairs pairs;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    if (li == 0 && lines[0].starts_with("index_a")) continue;
    auto cells = split(lines[li], ',');
    VerificationPair p;
    int same = 0;
    if (cells.size() != 3 || !parse_number(cells[0], p.a) || !parse_number(cells[1], p.b) ||
        !parse_number(cells[2], same) || (same != 0 && same != 1)) {
      throw FormatError(offset_of(lines[li]), "malformed pairs line " + std::to_string(li + 1));
    }
    p.same = same == 1;
    pairs.push_back(p);
  }
  return pairs;
}

VerificationPairs read_pairs(const std::filesystem::path& path) { return pairs_from_csv(read_text(path)); }

void write_pairs(const std::filesystem::path& path, const VerificationPairs& pairs) {
  write_text_atomic(path, pairs_to_csv(pairs));
}

void validate_pairs(const VerificationPairs& pairs, std::size_t count) {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    if (p.a >= count || p.b >= count) {
      throw ProtocolError("pair " + std::to_string(i) + " references a row beyond " + std::to_string(count));
    }
    if (p.a == p.b) throw ProtocolError("pair " + std::to_string(i) + " references the same row twice");
  }
}

FeatureSet gen_synthetic(const SyntheticConfig& config) {
  if (config.identities == 0 || config.per_identity == 0 || config.dim == 0) {
    throw InvalidDimension("synthetic set needs identities, per_identity and dim >= 1");
  }
  if (!(config.within_class_sigma >= 0.0)) throw ConfigError("within-class sigma must be >= 0");
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t d = config.dim;

  auto normalize = [](std::span<double> v) {
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    const double inv = 1.0 / std::sqrt(n2);
    for (double& x : v) x *= inv;
  };

  FeatureSet set;
  set.dim = d;
  set.count = config.identities * config.per_identity;
  set.values.resize(set.count * d);
  set.labels.resize(set.count);
  set.source = "synthetic";
  std::vector<double> mean(d);
  for (std::size_t k = 0; k < config.identities; ++k) {
    for (double& x : mean) x = normal(rng);
    normalize(mean);
    for (std::size_t p = 0; p < config.per_identity; ++p) {
      const std::size_t i = k * config.per_identity + p;
      auto row = set.row(i);
      for (std::size_t j = 0; j < d; ++j) row[j] = mean[j] + config.within_class_sigma * normal(rng);
      normalize(row);
      set.labels[i] = static_cast<std::uint32_t>(k);
    }
  }
  return set;
}

namespace {

struct PairKey {
  std::size_t lo, hi;
  bool operator<(const PairKey& o) const { return lo != o.lo ? lo < o.lo : hi < o.hi; }
};

}  // namespace

VerificationPairs gen_pairs(const FeatureSet& features, std::size_t n_pos, std::size_t n_neg,
                            std::uint64_t seed) {
  if (!features.has_labels()) throw ProtocolError("pair generation needs identity labels");
  std::map<std::uint32_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < features.count; ++i) groups[features.labels[i]].push_back(i);

  std::vector<const std::vector<std::size_t>*> multi;
  double max_pos = 0.0;
  for (const auto& [label, rows] : groups) {
    const double n = static_cast<double>(rows.size());
    max_pos += n * (n - 1) / 2;
    if (rows.size() >= 2) multi.push_back(&rows);
  }
  const double total = static_cast<double>(features.count);
  const double max_neg = total * (total - 1) / 2 - max_pos;
  if (static_cast<double>(n_pos) > max_pos) {
    throw ProtocolError("cannot draw " + std::to_string(n_pos) + " positive pairs; at most " +
                        std::to_string(static_cast<std::uint64_t>(max_pos)) + " exist");
  }
  if (static_cast<double>(n_neg) > max_neg) {
    throw ProtocolError("cannot draw " + std::to_string(n_neg) + " negative pairs; at most " +
                        std::to_string(static_cast<std::uint64_t>(max_neg)) + " exist");
  }

  std::mt19937_64 rng(seed);
  VerificationPairs out;
  out.reserve(n_pos + n_neg);

  // Dense requests enumerate all candidates; sparse ones use rejection sampling.
  auto draw = [&](std::size_t wanted, double available, bool same, auto&& sample_one, auto&& enumerate) {
    if (wanted == 0) return;
    if (static_cast<double>(wanted) * 2 > available) {
      std::vector<PairKey> all;
      enumerate(all);
      for (std::size_t i = 0; i < wanted; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, all.size() - 1);
        std::swap(all[i], all[pick(rng)]);
        out.push_back({all[i].lo, all[i].hi, same});
      }
      return;
    }
    std::set<PairKey> seen;
    while (seen.size() < wanted) {
      PairKey key = sample_one();
      if (seen.insert(key).second) out.push_back({key.lo, key.hi, same});
    }
  };

  draw(
      n_pos, max_pos, true,
      [&]() {
        std::uniform_int_distribution<std::size_t> g(0, multi.size() - 1);
        const auto& rows = *multi[g(rng)];
        std::uniform_int_distribution<std::size_t> r(0, rows.size() - 1);
        std::size_t a = rows[r(rng)], b = rows[r(rng)];
        while (a == b) b = rows[r(rng)];
        return PairKey{std::min(a, b), std::max(a, b)};
      },
      [&](std::vector<PairKey>& all) {
        for (const auto* rows : multi) {
          for (std::size_t i = 0; i < rows->size(); ++i) {
            for (std::size_t j = i + 1; j < rows->size(); ++j) all.push_back({(*rows)[i], (*rows)[j]});
          }
        }
      });
  draw(
      n_neg, max_neg, false,
      [&]() {
        std::uniform_int_distribution<std::size_t> r(0, features.count - 1);
        while (true) {
          std::size_t a = r(rng), b = r(rng);
          if (features.labels[a] != features.labels[b]) return PairKey{std::min(a, b), std::max(a, b)};
        }
      },
      [&](std::vector<PairKey>& all) {
        for (std::size_t i = 0; i < features.count; ++i) {
          for (std::size_t j = i + 1; j < features.count; ++j) {
            if (features.labels[i] != features.labels[j]) all.push_back({i, j});
          }
        }
      });
  return out;
}

std::pair<FeatureSet, FeatureSet> split_by_identity(const FeatureSet& features, double fraction) {
  if (!features.has_labels()) throw ProtocolError("identity split needs labels");
  std::set<std::uint32_t> distinct(features.labels.begin(), features.labels.end());
  const auto n_first = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(distinct.size())));
  std::unordered_set<std::uint32_t> first_labels;
  for (auto it = distinct.begin(); first_labels.size() < n_first; ++it) first_labels.insert(*it);
  std::vector<std::size_t> a, b;
  for (std::size_t i = 0; i < features.count; ++i) {
    (first_labels.count(features.labels[i]) ? a : b).push_back(i);
  }
  return {features.select(a), features.select(b)};
}

std::vector<DimStats> dim_stats(const FeatureSet& features, std::span<const std::size_t> dims,
                                std::size_t bins) {
  if (bins < 2) throw ConfigError("histogram needs at least 2 bins");
  std::vector<DimStats> out;
  for (auto d : dims) {
    if (d >= features.dim) {
      throw ShapeError("dimension index " + std::to_string(d) + " out of range (D=" +
                       std::to_string(features.dim) + ")");
    }
    DimStats s;
    s.dim = d;
    double lo = features.values[d], hi = lo, sum = 0.0;
    for (std::size_t i = 0; i < features.count; ++i) {
      const double v = features.row(i)[d];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    const double n = static_cast<double>(features.count);
    s.mean = sum / n;
    double var = 0.0;
    for (std::size_t i = 0; i < features.count; ++i) {
      const double e = features.row(i)[d] - s.mean;
      var += e * e;
    }
    s.stddev = std::sqrt(var / n);
    s.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) {
      s.edges[b] = b == bins ? hi : lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
    }
    s.counts.assign(bins, 0);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i < features.count; ++i) {
      const double v = features.row(i)[d];
      std::size_t b = width > 0.0 ? static_cast<std::size_t>((v - lo) / width) : 0;
      s.counts[std::min(b, bins - 1)] += 1;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string dim_stats_csv(const std::vector<DimStats>& stats) {
  std::ostringstream out;
  out << "dim,mean,stddev,bin,lo,hi,count\n";
  char buf[160];
  for (const auto& s : stats) {
    for (std::size_t b = 0; b < s.counts.size(); ++b) {
      std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%zu,%.6f,%.6f,%zu\n", s.dim, s.mean, s.stddev, b,
                    s.edges[b], s.edges[b + 1], s.counts[b]);
      out << buf;
    }
  }
  return out.str();
}

}  // namespace fic
