#include "plkg/nn/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "plkg/error.hpp"

namespace plkg::nn {

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows * cols) throw ShapeError("Tensor: value count does not match shape");
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

Tensor slice_cols(const Tensor& t, std::size_t begin, std::size_t count) {
  if (begin + count > t.cols()) throw ShapeError("slice_cols: range exceeds columns");
  Tensor out(t.rows(), count);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    auto src = t.row(r).subspan(begin, count);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows()) throw ShapeError("concat_cols: row counts differ");
  Tensor out(a.rows(), a.cols() + b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto dst = out.row(r);
    std::copy(a.row(r).begin(), a.row(r).end(), dst.begin());
    std::copy(b.row(r).begin(), b.row(r).end(), dst.begin() + static_cast<std::ptrdiff_t>(a.cols()));
  }
  return out;
}

Param::Param(std::string name_, std::size_t rows_, std::size_t cols_)
    : name(std::move(name_)),
      rows(rows_),
      cols(cols_),
      value(rows_ * cols_, 0.0),
      grad(rows_ * cols_, 0.0),
      m(rows_ * cols_, 0.0),
      v(rows_ * cols_, 0.0) {}

void Param::zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }

void zero_grads(const ParamRefs& params) {
  for (Param* p : params) p->zero_grad();
}

}  // namespace plkg::nn
