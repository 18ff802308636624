#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

namespace otrepair {

// Bagged ensemble of shallow binary classification trees. Scores are the mean
// leaf positive fraction across trees, so they lie in [0, 1].
class TreeEnsemble {
 public:
  struct Options {
    int trees = 20;
    int depth = 6;
    std::size_t min_leaf = 20;
    std::uint64_t seed = 0;
  };

  // `rows` holds n * dim feature values, row-major. Throws ValidationError
  // when all labels are equal.
  static TreeEnsemble train(std::span<const double> rows, std::size_t dim,
                            std::span<const int> labels, const Options& options);

  double score(std::span<const double> x) const;
  std::size_t dim() const { return dim_; }

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };
  using Tree = std::vector<Node>;

  std::size_t dim_ = 0;
  std::vector<Tree> trees_;
};

// Per-feature-tuple scores supplied by an external model: CSV whose last
// column is `score` and whose other columns are the model's feature values.
class ScoreTable {
 public:
  static ScoreTable load(const std::filesystem::path& path, std::size_t dim);
  // Throws ValidationError when the tuple is not in the table.
  double score(std::span<const double> x) const;

 private:
  std::size_t dim_ = 0;
  std::map<std::vector<double>, double> table_;
};

// One score per dataset row, in a single-column CSV with header `score`.
// Throws ValidationError when the row count differs from `expected_rows`.
std::vector<double> load_row_scores(const std::filesystem::path& path, std::size_t expected_rows);

}  // namespace otrepair
