#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace otrepair {

// Ordered set of d-dimensional feature points. Points are unique and kept in
// lexicographic order so matrices indexed by a support are reproducible.
class Support {
 public:
  // `coords` holds size * dim values, point-major, already strictly increasing
  // in lexicographic order. Throws ValidationError otherwise.
  Support(std::size_t dim, std::vector<double> coords);

  // Sorts and deduplicates arbitrary points.
  static Support canonical(std::size_t dim, std::vector<double> coords);
  static Support canonical(const std::vector<std::vector<double>>& points);

  // {lo, lo+1, ..., hi} in one dimension.
  static Support integer_grid(long lo, long hi);

  std::size_t size() const { return size_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<const double> coords() const { return coords_; }

  std::optional<std::size_t> find(std::span<const double> p) const;

  // Keep only the listed indices (increasing), preserving order.
  Support subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const Support&, const Support&) = default;

 private:
  std::size_t dim_ = 0;
  std::size_t size_ = 0;
  std::vector<double> coords_;
};

using SupportPtr = std::shared_ptr<const Support>;

inline SupportPtr make_support(Support s) {
  return std::make_shared<const Support>(std::move(s));
}

// Lexicographic comparison of two points of equal dimension.
bool lex_less(std::span<const double> a, std::span<const double> b);

}  // namespace otrepair
