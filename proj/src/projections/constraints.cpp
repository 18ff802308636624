#include "otrepair/constraints.hpp"

#include <cmath>
#include <string>

#include "otrepair/errors.hpp"

namespace otrepair {
namespace {

std::vector<double> nonnegative(std::span<const double> x, const char* what) {
  for (double v : x) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError(std::string(what) + ": entries must be finite and nonnegative");
    }
  }
  return {x.begin(), x.end()};
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

ConstraintSet row_eq(const Histogram& p) { return RowEq{{p.mass().begin(), p.mass().end()}}; }
ConstraintSet col_eq(const Histogram& q) { return ColEq{{q.mass().begin(), q.mass().end()}}; }
ConstraintSet row_leq(std::span<const double> p) { return RowLeq{nonnegative(p, "row_leq")}; }
ConstraintSet col_leq(std::span<const double> q) { return ColLeq{nonnegative(q, "col_leq")}; }

ConstraintSet total_mass(double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw ValidationError("total_mass: eta must be finite and nonnegative");
  }
  return TotalMass{eta};
}

ConstraintSet capacity(Matrix cap) {
  nonnegative(cap.values(), "capacity");
  return Capacity{std::move(cap)};
}

ConstraintSet parity_band(const DisparityVector& v, const RepairBand& theta) {
  return ParityBand{{v.values().begin(), v.values().end()},
                    {theta.values().begin(), theta.values().end()}};
}

std::string_view kind_name(const ConstraintSet& c) {
  return std::visit(overloaded{
                        [](const RowEq&) { return std::string_view("row_eq"); },
                        [](const ColEq&) { return std::string_view("col_eq"); },
                        [](const RowLeq&) { return std::string_view("row_leq"); },
                        [](const ColLeq&) { return std::string_view("col_leq"); },
                        [](const TotalMass&) { return std::string_view("total_mass"); },
                        [](const Capacity&) { return std::string_view("capacity"); },
                        [](const ParityBand&) { return std::string_view("parity_band"); },
                    },
                    c);
}

void check_shape(const ConstraintSet& c, std::size_t rows, std::size_t cols) {
  auto fail = [&](const char* detail) {
    throw ValidationError(std::string(kind_name(c)) + ": " + detail);
  };
  std::visit(overloaded{
                 [&](const RowEq& s) { if (s.p.size() != rows) fail("length != rows"); },
                 [&](const ColEq& s) { if (s.q.size() != cols) fail("length != cols"); },
                 [&](const RowLeq& s) { if (s.p.size() != rows) fail("length != rows"); },
                 [&](const ColLeq& s) { if (s.q.size() != cols) fail("length != cols"); },
                 [&](const TotalMass&) {},
                 [&](const Capacity& s) {
                   if (s.cap.rows() != rows || s.cap.cols() != cols) fail("shape mismatch");
                 },
                 [&](const ParityBand& s) {
                   if (s.v.size() != rows) fail("v length != rows");
                   if (s.theta.size() != cols) fail("theta length != cols");
                 },
             },
             c);
}

}  // namespace otrepair
