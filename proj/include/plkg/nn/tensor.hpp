#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace plkg::nn {

// Row-major rows x cols array of doubles. Rows index the batch.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  std::vector<std::size_t> shape() const { return {rows_, cols_}; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool all_finite() const;
  bool operator==(const Tensor&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Columns [begin, begin + count) of t.
Tensor slice_cols(const Tensor& t, std::size_t begin, std::size_t count);
// [a | b] along columns; rows must agree.
Tensor concat_cols(const Tensor& a, const Tensor& b);

// Trainable parameter block with gradient and Adam moment buffers.
struct Param {
  Param() = default;
  Param(std::string name, std::size_t rows, std::size_t cols);

  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> value;
  std::vector<double> grad;
  std::vector<double> m;
  std::vector<double> v;

  std::size_t size() const { return value.size(); }
  void zero_grad();
};

using ParamRefs = std::vector<Param*>;

void zero_grads(const ParamRefs& params);

}  // namespace plkg::nn
