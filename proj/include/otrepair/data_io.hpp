#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "otrepair/histogram.hpp"
#include "otrepair/matrix.hpp"
#include "otrepair/repair.hpp"
#include "otrepair/support.hpp"

namespace otrepair {

inline constexpr const char* kGroupColumn = "__group__";
inline constexpr const char* kLabelColumn = "__label__";
inline constexpr const char* kWeightColumn = "__weight__";

// Column roles for a dataset CSV. When `adjusted` is empty every column that is
// not neutral and not one of the reserved columns is adjusted.
struct DatasetSchema {
  std::vector<std::string> adjusted;
  std::vector<std::string> neutral;
  std::optional<std::string> group = kGroupColumn;
  std::optional<std::string> label = kLabelColumn;
  std::optional<std::string> weight = kWeightColumn;
};

// {"adjusted": [...], "neutral": [...], "group": "...", "label": "...", "weight": null}
void from_json(const nlohmann::json& j, DatasetSchema& s);
void to_json(nlohmann::json& j, const DatasetSchema& s);
DatasetSchema load_schema(const std::filesystem::path& path);

// Reads a header-first CSV. Reserved columns named by the schema are optional
// in the file; any other column the schema names must be present. Missing
// weights default to 1. Errors carry the 1-based line number.
WeightedDataset load_dataset(const std::filesystem::path& path, const DatasetSchema& schema = {});
void write_dataset(const std::filesystem::path& path, const WeightedDataset& data);

// Canonical support of the adjusted-feature tuples present in the data.
SupportPtr build_support(const WeightedDataset& data);

std::vector<double> discretize_floor(std::span<const double> values);

// Keeps only the named adjusted features, in the given order.
WeightedDataset select_features(const WeightedDataset& data,
                                const std::vector<std::string>& features);

struct FeatureSelection {
  std::vector<std::string> adjusted;
  std::vector<std::string> neutral;
  std::map<std::string, double> tv;  // per-feature group-wise TV
};

// A feature is adjusted when the TV between its two group-wise marginals
// exceeds `threshold`.
FeatureSelection feature_selection_by_tv(const WeightedDataset& data,
                                         const std::vector<std::string>& candidates,
                                         double threshold);

// g_k = 1 / (max_k - min_k) over the listed adjusted features.
std::vector<double> cost_weights_from_ranges(const WeightedDataset& data,
                                             const std::vector<std::string>& features);

// Histogram CSV: header point_0,...,point_{d-1},mass in canonical order.
void write_histogram(const std::filesystem::path& path, const Histogram& h);
Histogram read_histogram(const std::filesystem::path& path);

// Coupling as `src_index,tgt_index,mass` triplets (nonzero entries only) plus
// a JSON sidecar at `<path>.json` naming the two support files.
void write_coupling(const std::filesystem::path& path, const Matrix& gamma,
                    const std::string& source_file, const std::string& target_file);
Matrix read_coupling(const std::filesystem::path& path);

// Adult census rows. `group` is 0 for the unprivileged value (Black or
// Female) and 1 otherwise; rows outside the two named values are dropped.
enum class AdultAttribute { race, sex };

struct AdultData {
  WeightedDataset data;  // features: the five numeric columns below, label: income > 50K
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
};

inline const std::vector<std::string>& adult_numeric_features() {
  static const std::vector<std::string> names{"age", "education-num", "capital-gain",
                                              "capital-loss", "hours-per-week"};
  return names;
}

// Reads adult.data and adult.test from `dir`. Throws ValidationError with a
// fetch hint when the files are missing.
AdultData load_adult(const std::filesystem::path& dir, AdultAttribute attribute);

}  // namespace otrepair
