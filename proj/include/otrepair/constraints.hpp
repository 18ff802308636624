#pragma once

#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "otrepair/disparity.hpp"
#include "otrepair/histogram.hpp"
#include "otrepair/matrix.hpp"

namespace otrepair {

// Convex sets a coupling can be KL-projected onto.
struct RowEq {      // gamma 1 = p
  std::vector<double> p;
};
struct ColEq {      // gamma^T 1 = q
  std::vector<double> q;
};
struct RowLeq {     // gamma 1 <= p
  std::vector<double> p;
};
struct ColLeq {     // gamma^T 1 <= q
  std::vector<double> q;
};
struct TotalMass {  // 1^T gamma 1 = eta
  double eta = 0.0;
};
struct Capacity {   // gamma <= cap entrywise
  Matrix cap;
};
struct ParityBand { // -theta <= gamma^T v <= theta
  std::vector<double> v;
  std::vector<double> theta;
};

using ConstraintSet =
    std::variant<RowEq, ColEq, RowLeq, ColLeq, TotalMass, Capacity, ParityBand>;

ConstraintSet row_eq(const Histogram& p);
ConstraintSet col_eq(const Histogram& q);
ConstraintSet row_leq(std::span<const double> p);
ConstraintSet col_leq(std::span<const double> q);
ConstraintSet total_mass(double eta);
ConstraintSet capacity(Matrix cap);
ConstraintSet parity_band(const DisparityVector& v, const RepairBand& theta);

std::string_view kind_name(const ConstraintSet& c);

// Throws ValidationError if the set's payload does not fit a rows x cols coupling.
void check_shape(const ConstraintSet& c, std::size_t rows, std::size_t cols);

}  // namespace otrepair
