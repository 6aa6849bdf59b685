#include "paaconv/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "paaconv/errors.hpp"

namespace paaconv {

Tensor2D::Tensor2D(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) {
    throw InvalidArgumentError("Tensor2D: negative dimensions");
  }
  data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
               0.0);
}

void Tensor2D::fill(double value) {
  std::fill(data_.begin(), data_.end(), value);
}

bool Tensor2D::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

void add_in_place(Tensor2D& into, const Tensor2D& other) {
  if (!into.same_shape(other)) {
    throw ShapeError("add_in_place: shape mismatch");
  }
  const auto& src = other.data();
  auto& dst = into.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

void scale_in_place(Tensor2D& t, double factor) {
  for (double& v : t.data()) v *= factor;
}

double max_abs_diff(const Tensor2D& a, const Tensor2D& b) {
  if (!a.same_shape(b)) {
    throw ShapeError("max_abs_diff: shape mismatch");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  }
  return worst;
}

}  // namespace paaconv
