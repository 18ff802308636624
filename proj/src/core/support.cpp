#include "otrepair/support.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "otrepair/errors.hpp"

namespace otrepair {

bool lex_less(std::span<const double> a, std::span<const double> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

Support::Support(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) throw ValidationError("support: dimension must be positive");
  if (coords_.empty() || coords_.size() % dim_ != 0) {
    throw ValidationError("support: need at least one point with " + std::to_string(dim_) +
                          " coordinates");
  }
  for (double c : coords_) {
    if (!std::isfinite(c)) throw ValidationError("support: non-finite coordinate");
  }
  size_ = coords_.size() / dim_;
  for (std::size_t i = 1; i < size_; ++i) {
    if (!lex_less(point(i - 1), point(i))) {
      throw ValidationError("support: points must be unique and in lexicographic order");
    }
  }
}

Support Support::canonical(std::size_t dim, std::vector<double> coords) {
  if (dim == 0 || coords.size() % dim != 0) {
    throw ValidationError("support: coordinate count is not a multiple of the dimension");
  }
  const std::size_t n = coords.size() / dim;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto pt = [&](std::size_t i) { return std::span<const double>(coords.data() + i * dim, dim); };
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return lex_less(pt(a), pt(b)); });
  std::vector<double> out;
  out.reserve(coords.size());
  for (std::size_t k = 0; k < n; ++k) {
    const auto p = pt(order[k]);
    if (k > 0 && std::equal(p.begin(), p.end(), pt(order[k - 1]).begin())) continue;
    out.insert(out.end(), p.begin(), p.end());
  }
  return Support(dim, std::move(out));
}

Support Support::canonical(const std::vector<std::vector<double>>& points) {
  if (points.empty()) throw ValidationError("support: no points");
  const std::size_t dim = points.front().size();
  std::vector<double> flat;
  flat.reserve(points.size() * dim);
  for (const auto& p : points) {
    if (p.size() != dim) throw ValidationError("support: points of mixed dimension");
    flat.insert(flat.end(), p.begin(), p.end());
  }
  return canonical(dim, std::move(flat));
}

Support Support::integer_grid(long lo, long hi) {
  if (hi < lo) throw ValidationError("support: empty integer grid");
  std::vector<double> c;
  for (long v = lo; v <= hi; ++v) c.push_back(static_cast<double>(v));
  return Support(1, std::move(c));
}

std::optional<std::size_t> Support::find(std::span<const double> p) const {
  if (p.size() != dim_) return std::nullopt;
  std::size_t lo = 0, hi = size_;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (lex_less(point(mid), p)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < size_ && std::equal(p.begin(), p.end(), point(lo).begin())) return lo;
  return std::nullopt;
}

Support Support::subset(std::span<const std::size_t> indices) const {
  std::vector<double> c;
  c.reserve(indices.size() * dim_);
  for (std::size_t i : indices) {
    if (i >= size_) throw ValidationError("support: subset index out of range");
    const auto p = point(i);
    c.insert(c.end(), p.begin(), p.end());
  }
  return Support(dim_, std::move(c));
}

}  // namespace otrepair
