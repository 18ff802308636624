#include "otrepair/classifier.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "otrepair/errors.hpp"

namespace otrepair {
namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;
};

double gini_sum(double pos, double n) {
  if (n <= 0.0) return 0.0;
  const double p = pos / n;
  return n * 2.0 * p * (1.0 - p);
}

class Builder {
 public:
  Builder(std::span<const double> rows, std::size_t dim, std::span<const int> labels,
          std::size_t min_leaf)
      : rows_(rows), dim_(dim), labels_(labels), min_leaf_(min_leaf) {}

  template <class Tree>
  int grow(Tree& tree, std::vector<std::size_t>& idx, int depth) {
    double pos = 0.0;
    for (auto r : idx) pos += labels_[r];
    const double n = static_cast<double>(idx.size());
    const int id = static_cast<int>(tree.size());
    tree.emplace_back();
    tree[id].value = pos / n;
    if (depth == 0 || pos == 0.0 || pos == n || idx.size() < 2 * min_leaf_) return id;

    const Split s = best_split(idx, pos);
    if (s.feature < 0 || s.impurity >= gini_sum(pos, n) - 1e-12) return id;

    std::vector<std::size_t> left, right;
    for (auto r : idx) {
      (rows_[r * dim_ + static_cast<std::size_t>(s.feature)] <= s.threshold ? left : right)
          .push_back(r);
    }
    idx.clear();
    idx.shrink_to_fit();
    tree[id].feature = s.feature;
    tree[id].threshold = s.threshold;
    const int l = grow(tree, left, depth - 1);
    const int rr = grow(tree, right, depth - 1);
    tree[id].left = l;
    tree[id].right = rr;
    return id;
  }

 private:
  Split best_split(const std::vector<std::size_t>& idx, double pos) const {
    Split best;
    best.impurity = INFINITY;
    const double n = static_cast<double>(idx.size());
    std::vector<std::pair<double, int>> col(idx.size());
    for (std::size_t f = 0; f < dim_; ++f) {
      for (std::size_t k = 0; k < idx.size(); ++k) {
        col[k] = {rows_[idx[k] * dim_ + f], labels_[idx[k]]};
      }
      std::sort(col.begin(), col.end());
      double left_pos = 0.0;
      for (std::size_t k = 0; k + 1 < col.size(); ++k) {
        left_pos += col[k].second;
        const std::size_t nl = k + 1;
        if (col[k].first == col[k + 1].first) continue;
        if (nl < min_leaf_ || col.size() - nl < min_leaf_) continue;
        const double dl = static_cast<double>(nl);
        const double imp = gini_sum(left_pos, dl) + gini_sum(pos - left_pos, n - dl);
        if (imp < best.impurity) {
          best.impurity = imp;
          best.feature = static_cast<int>(f);
          best.threshold = 0.5 * (col[k].first + col[k + 1].first);
        }
      }
    }
    return best;
  }

  std::span<const double> rows_;
  std::size_t dim_;
  std::span<const int> labels_;
  std::size_t min_leaf_;
};

}  // namespace

TreeEnsemble TreeEnsemble::train(std::span<const double> rows, std::size_t dim,
                                 std::span<const int> labels, const Options& options) {
  if (dim == 0 || rows.size() != labels.size() * dim) {
    throw ValidationError("classifier: feature matrix does not match label count");
  }
  if (labels.empty()) throw ValidationError("classifier: empty training set");
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0 || static_cast<std::size_t>(positives) == labels.size()) {
    throw ValidationError("classifier: training labels contain a single class");
  }
  if (options.trees < 1 || options.depth < 0) throw ValidationError("classifier: bad options");

  TreeEnsemble model;
  model.dim_ = dim;
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, labels.size() - 1);
  Builder builder(rows, dim, labels, std::max<std::size_t>(options.min_leaf, 1));
  for (int t = 0; t < options.trees; ++t) {
    std::vector<std::size_t> idx(labels.size());
    for (auto& r : idx) r = pick(rng);
    Tree tree;
    builder.grow(tree, idx, options.depth);
    model.trees_.push_back(std::move(tree));
  }
  return model;
}

double TreeEnsemble::score(std::span<const double> x) const {
  if (x.size() != dim_) throw ValidationError("classifier: wrong feature dimension");
  double s = 0.0;
  for (const Tree& tree : trees_) {
    int k = 0;
    while (tree[k].feature >= 0) {
      k = x[static_cast<std::size_t>(tree[k].feature)] <= tree[k].threshold ? tree[k].left
                                                                            : tree[k].right;
    }
    s += tree[k].value;
  }
  return s / static_cast<double>(trees_.size());
}

namespace {

std::vector<double> parse_row(const std::string& line, const std::filesystem::path& path,
                              std::size_t lineno) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t");
    const auto e = cell.find_last_not_of(" \t\r");
    double v = 0.0;
    const char* first = b == std::string::npos ? cell.data() : cell.data() + b;
    const char* last = e == std::string::npos ? cell.data() : cell.data() + e + 1;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last) {
      throw ValidationError(path.filename().string() + ":" + std::to_string(lineno) +
                            ": non-numeric value '" + cell + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

ScoreTable ScoreTable::load(const std::filesystem::path& path, std::size_t dim) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open score file " + path.string());
  std::string line;
  std::getline(in, line);
  ScoreTable t;
  t.dim_ = dim;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto row = parse_row(line, path, lineno);
    if (row.size() != dim + 1) {
      throw ValidationError(path.filename().string() + ":" + std::to_string(lineno) +
                            ": expected " + std::to_string(dim) + " features and a score");
    }
    const double s = row.back();
    row.pop_back();
    t.table_[std::move(row)] = s;
  }
  return t;
}

double ScoreTable::score(std::span<const double> x) const {
  const auto it = table_.find(std::vector<double>(x.begin(), x.end()));
  if (it == table_.end()) throw ValidationError("score table has no entry for a feature tuple");
  return it->second;
}

std::vector<double> load_row_scores(const std::filesystem::path& path, std::size_t expected_rows) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open score file " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<double> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto row = parse_row(line, path, lineno);
    if (row.size() != 1) {
      throw ValidationError(path.filename().string() + ":" + std::to_string(lineno) +
                            ": expected a single score column");
    }
    out.push_back(row[0]);
  }
  if (out.size() != expected_rows) {
    throw ValidationError("score file has " + std::to_string(out.size()) + " rows, dataset has " +
                          std::to_string(expected_rows));
  }
  return out;
}

}  // namespace otrepair
