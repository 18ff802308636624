#include "otrepair/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "otrepair/divergence.hpp"
#include "otrepair/errors.hpp"
#include "otrepair/metrics.hpp"

namespace otrepair {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

[[noreturn]] void line_error(const std::filesystem::path& path, std::size_t line,
                             const std::string& what) {
  throw ValidationError(path.filename().string() + ":" + std::to_string(line) + ": " + what);
}

std::size_t column_of(const std::vector<std::string>& names, const std::string& name) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ValidationError("unknown column '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

}  // namespace

void from_json(const nlohmann::json& j, DatasetSchema& s) {
  s = DatasetSchema{};
  auto optional_name = [&](const char* key, std::optional<std::string>& field) {
    if (!j.contains(key)) return;
    if (j.at(key).is_null()) {
      field.reset();
    } else {
      field = j.at(key).get<std::string>();
    }
  };
  if (j.contains("adjusted")) s.adjusted = j.at("adjusted").get<std::vector<std::string>>();
  if (j.contains("neutral")) s.neutral = j.at("neutral").get<std::vector<std::string>>();
  optional_name("group", s.group);
  optional_name("label", s.label);
  optional_name("weight", s.weight);
}

void to_json(nlohmann::json& j, const DatasetSchema& s) {
  auto opt = [](const std::optional<std::string>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  j = {{"adjusted", s.adjusted},
       {"neutral", s.neutral},
       {"group", opt(s.group)},
       {"label", opt(s.label)},
       {"weight", opt(s.weight)}};
}

DatasetSchema load_schema(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return nlohmann::json::parse(in).get<DatasetSchema>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("bad dataset descriptor " + path.string() + ": " + e.what());
  }
}

WeightedDataset load_dataset(const std::filesystem::path& path, const DatasetSchema& schema) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path.string() + ": missing header");
  std::vector<std::string> header;
  for (auto f : split_fields(line)) header.emplace_back(f);
  {
    std::set<std::string> unique(header.begin(), header.end());
    if (unique.size() != header.size()) throw ValidationError("duplicate column names in header");
  }

  auto reserved_index = [&](const std::optional<std::string>& name) -> std::optional<std::size_t> {
    if (!name) return std::nullopt;
    const auto it = std::find(header.begin(), header.end(), *name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto group_col = reserved_index(schema.group);
  const auto label_col = reserved_index(schema.label);
  const auto weight_col = reserved_index(schema.weight);
  for (const auto* name : {&schema.group, &schema.label, &schema.weight}) {
    const bool reserved = *name == std::optional<std::string>(kGroupColumn) ||
                          *name == std::optional<std::string>(kLabelColumn) ||
                          *name == std::optional<std::string>(kWeightColumn);
    if (*name && !reserved) column_of(header, **name);
  }

  std::vector<std::string> adjusted = schema.adjusted;
  if (adjusted.empty()) {
    for (const auto& h : header) {
      const bool special = (schema.group && h == *schema.group) ||
                           (schema.label && h == *schema.label) ||
                           (schema.weight && h == *schema.weight);
      const bool neutral =
          std::find(schema.neutral.begin(), schema.neutral.end(), h) != schema.neutral.end();
      if (!special && !neutral) adjusted.push_back(h);
    }
  }
  if (adjusted.empty()) throw ValidationError("dataset has no adjusted feature columns");
  std::vector<std::size_t> adj_cols, neu_cols;
  for (const auto& a : adjusted) adj_cols.push_back(column_of(header, a));
  for (const auto& n : schema.neutral) neu_cols.push_back(column_of(header, n));

  WeightedDataset data;
  data.feature_names = adjusted;
  data.neutral_names = schema.neutral;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      line_error(path, lineno, "expected " + std::to_string(header.size()) + " fields, got " +
                                   std::to_string(fields.size()));
    }
    auto number = [&](std::size_t c) {
      const auto v = parse_double(fields[c]);
      if (!v || !std::isfinite(*v)) {
        line_error(path, lineno, "non-numeric value '" + std::string(fields[c]) +
                                     "' in column '" + header[c] + "'");
      }
      return *v;
    };
    WeightedSample s;
    for (auto c : adj_cols) s.features.push_back(number(c));
    for (auto c : neu_cols) s.neutral.push_back(number(c));
    if (weight_col) {
      s.weight = number(*weight_col);
      if (!(s.weight > 0.0)) line_error(path, lineno, "weight must be positive");
    }
    if (group_col) s.group = static_cast<int>(number(*group_col));
    if (label_col) s.label = static_cast<int>(number(*label_col));
    s.origin = data.samples.size();
    data.samples.push_back(std::move(s));
  }
  return data;
}

void write_dataset(const std::filesystem::path& path, const WeightedDataset& data) {
  auto out = open_output(path);
  const bool groups = std::any_of(data.samples.begin(), data.samples.end(),
                                  [](const auto& s) { return s.group.has_value(); });
  const bool labels = std::any_of(data.samples.begin(), data.samples.end(),
                                  [](const auto& s) { return s.label.has_value(); });
  std::vector<std::string> cols = data.feature_names;
  cols.insert(cols.end(), data.neutral_names.begin(), data.neutral_names.end());
  if (groups) cols.emplace_back(kGroupColumn);
  if (labels) cols.emplace_back(kLabelColumn);
  cols.emplace_back(kWeightColumn);
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << '\n';
  for (const auto& s : data.samples) {
    std::string row;
    auto put = [&](const std::string& v) {
      if (!row.empty()) row += ',';
      row += v;
    };
    for (double x : s.features) put(format_double(x));
    for (double x : s.neutral) put(format_double(x));
    if (groups) put(s.group ? std::to_string(*s.group) : "");
    if (labels) put(s.label ? std::to_string(*s.label) : "");
    put(format_double(s.weight));
    out << row << '\n';
  }
}

SupportPtr build_support(const WeightedDataset& data) {
  if (data.empty()) throw ValidationError("empty dataset");
  const std::size_t d = data.feature_names.empty() ? data.samples.front().features.size()
                                                   : data.feature_names.size();
  std::vector<double> coords;
  coords.reserve(d * data.samples.size());
  for (const auto& s : data.samples) {
    if (s.features.size() != d) throw ValidationError("inconsistent feature dimension");
    coords.insert(coords.end(), s.features.begin(), s.features.end());
  }
  return make_support(Support::canonical(d, std::move(coords)));
}

std::vector<double> discretize_floor(std::span<const double> values) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw ValidationError("discretize_floor: non-finite value");
    out[i] = std::floor(values[i]);
  }
  return out;
}

WeightedDataset select_features(const WeightedDataset& data,
                                const std::vector<std::string>& features) {
  std::vector<std::size_t> idx;
  for (const auto& f : features) idx.push_back(column_of(data.feature_names, f));
  WeightedDataset out;
  out.feature_names = features;
  out.neutral_names = data.neutral_names;
  out.samples.reserve(data.samples.size());
  for (const auto& s : data.samples) {
    WeightedSample t = s;
    t.features.clear();
    for (auto k : idx) t.features.push_back(s.features[k]);
    out.samples.push_back(std::move(t));
  }
  return out;
}

FeatureSelection feature_selection_by_tv(const WeightedDataset& data,
                                         const std::vector<std::string>& candidates,
                                         double threshold) {
  FeatureSelection sel;
  for (const auto& f : candidates) {
    const double tv = s_wise_tv(select_features(data, {f}));
    sel.tv[f] = tv;
    (tv > threshold ? sel.adjusted : sel.neutral).push_back(f);
  }
  return sel;
}

std::vector<double> cost_weights_from_ranges(const WeightedDataset& data,
                                             const std::vector<std::string>& features) {
  if (data.empty()) throw ValidationError("empty dataset");
  std::vector<double> g;
  for (const auto& f : features) {
    const std::size_t k = column_of(data.feature_names, f);
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& s : data.samples) {
      lo = std::min(lo, s.features[k]);
      hi = std::max(hi, s.features[k]);
    }
    if (!(hi > lo)) throw ValidationError("constant feature cannot be adjusted: " + f);
    g.push_back(1.0 / (hi - lo));
  }
  return g;
}

void write_histogram(const std::filesystem::path& path, const Histogram& h) {
  auto out = open_output(path);
  const Support& s = h.support();
  for (std::size_t k = 0; k < s.dim(); ++k) out << "point_" << k << ',';
  out << "mass\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (double x : s.point(i)) out << format_double(x) << ',';
    out << format_double(h[i]) << '\n';
  }
}

Histogram read_histogram(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path.string() + ": missing header");
  const auto header = split_fields(line);
  if (header.size() < 2 || header.back() != "mass") {
    throw ValidationError(path.string() + ": header must be point_0,...,mass");
  }
  const std::size_t d = header.size() - 1;
  for (std::size_t k = 0; k < d; ++k) {
    if (header[k] != "point_" + std::to_string(k)) {
      throw ValidationError(path.string() + ": header must be point_0,...,mass");
    }
  }
  std::vector<double> coords, mass;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != d + 1) line_error(path, lineno, "wrong number of fields");
    for (std::size_t k = 0; k <= d; ++k) {
      const auto v = parse_double(fields[k]);
      if (!v) line_error(path, lineno, "non-numeric value '" + std::string(fields[k]) + "'");
      (k < d ? coords : mass).push_back(*v);
    }
  }
  if (mass.empty()) throw ValidationError(path.string() + ": no rows");
  // Rows must already be canonical; Support rejects anything else.
  return Histogram(make_support(Support(d, std::move(coords))), std::move(mass));
}

void write_coupling(const std::filesystem::path& path, const Matrix& gamma,
                    const std::string& source_file, const std::string& target_file) {
  auto out = open_output(path);
  out << "src_index,tgt_index,mass\n";
  for (std::size_t i = 0; i < gamma.rows(); ++i) {
    for (std::size_t j = 0; j < gamma.cols(); ++j) {
      if (gamma(i, j) != 0.0) out << i << ',' << j << ',' << format_double(gamma(i, j)) << '\n';
    }
  }
  nlohmann::json side = {{"format", "triplet"},
                         {"rows", gamma.rows()},
                         {"cols", gamma.cols()},
                         {"source_support", source_file},
                         {"target_support", target_file}};
  auto js = open_output(path.string() + ".json");
  js << side.dump(2) << '\n';
}

Matrix read_coupling(const std::filesystem::path& path) {
  nlohmann::json side;
  {
    auto js = open_input(path.string() + ".json");
    try {
      side = nlohmann::json::parse(js);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("bad coupling sidecar: " + std::string(e.what()));
    }
  }
  const auto rows = side.at("rows").get<std::size_t>();
  const auto cols = side.at("cols").get<std::size_t>();
  Matrix g(rows, cols);
  auto in = open_input(path);
  std::string line;
  std::getline(in, line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 3) line_error(path, lineno, "expected src_index,tgt_index,mass");
    const auto i = parse_double(f[0]);
    const auto j = parse_double(f[1]);
    const auto m = parse_double(f[2]);
    if (!i || !j || !m || *i < 0 || *j < 0 || *i >= static_cast<double>(rows) ||
        *j >= static_cast<double>(cols) || !(*m >= 0.0)) {
      line_error(path, lineno, "invalid triplet");
    }
    g(static_cast<std::size_t>(*i), static_cast<std::size_t>(*j)) = *m;
  }
  return g;
}

AdultData load_adult(const std::filesystem::path& dir, AdultAttribute attribute) {
  const std::filesystem::path files[] = {dir / "adult.data", dir / "adult.test"};
  for (const auto& f : files) {
    if (!std::filesystem::exists(f)) {
      throw ValidationError("adult dataset not found at " + f.string() +
                            "; run tools/fetch_adult.sh " + dir.string() + " first");
    }
  }
  // Column positions in the published files.
  constexpr std::size_t kAge = 0, kEduNum = 4, kRace = 8, kSex = 9, kGain = 10, kLoss = 11,
                        kHours = 12, kIncome = 14, kFields = 15;
  AdultData out;
  out.data.feature_names = adult_numeric_features();
  for (const auto& f : files) {
    auto in = open_input(f);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (trim(line).empty() || line.front() == '|') continue;
      ++out.rows_read;
      const auto fields = split_fields(line);
      if (fields.size() != kFields) line_error(f, lineno, "expected 15 fields");
      int group = -1;
      if (attribute == AdultAttribute::race) {
        if (fields[kRace] == "Black") group = 0;
        else if (fields[kRace] == "White") group = 1;
      } else {
        if (fields[kSex] == "Female") group = 0;
        else if (fields[kSex] == "Male") group = 1;
      }
      WeightedSample s;
      bool ok = group >= 0;
      for (std::size_t c : {kAge, kEduNum, kGain, kLoss, kHours}) {
        const auto v = parse_double(fields[c]);
        if (!v) {
          ok = false;
          break;
        }
        s.features.push_back(*v);
      }
      if (!ok) {
        ++out.rows_dropped;
        continue;
      }
      std::string_view income = fields[kIncome];
      if (!income.empty() && income.back() == '.') income.remove_suffix(1);
      s.group = group;
      s.label = income == ">50K" ? 1 : 0;
      s.origin = out.data.samples.size();
      out.data.samples.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace otrepair
