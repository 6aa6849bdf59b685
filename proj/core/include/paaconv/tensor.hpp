#pragma once

#include <cstddef>
#include <vector>

namespace paaconv {

// Dense row-major matrix of doubles. This is the only tensor type the
// network ops work with; keeping it this small makes the backward passes
// easy to audit.
class Tensor2D {
 public:
  Tensor2D() = default;
  Tensor2D(int rows, int cols);

  static Tensor2D zeros(int rows, int cols) { return Tensor2D(rows, cols); }
  static Tensor2D zeros_like(const Tensor2D& other) {
    return Tensor2D(other.rows_, other.cols_);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(int i, int j) {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }
  double operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }

  double* row(int i) { return data_.data() + static_cast<std::size_t>(i) * cols_; }
  const double* row(int i) const {
    return data_.data() + static_cast<std::size_t>(i) * cols_;
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const Tensor2D& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  void fill(double value);
  bool all_finite() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Elementwise helpers used by gradient accumulation and the optimizer.
// All of them throw ShapeError on mismatched shapes.
void add_in_place(Tensor2D& into, const Tensor2D& other);
void scale_in_place(Tensor2D& t, double factor);
double max_abs_diff(const Tensor2D& a, const Tensor2D& b);

}  // namespace paaconv
