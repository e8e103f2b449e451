#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>

#include "toepcg/error.hpp"
#include "toepcg/numkit.hpp"

namespace toepcg {

/// Type-erased square operator y = Op(x) acting on vectors of a fixed length.
class LinearOperator {
 public:
  using ApplyFn = std::function<void(std::span<const double>, std::span<double>)>;

  LinearOperator(std::size_t size, ApplyFn apply) : size_(size), apply_(std::move(apply)) {}

  std::size_t size() const noexcept { return size_; }

  void apply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != size_ || y.size() != size_)
      throw Error(ErrorCode::kShape, "operator applied to a vector of the wrong length");
    apply_(x, y);
  }

  Vector operator()(std::span<const double> x) const {
    Vector y(size_);
    apply(x, y);
    return y;
  }

  static LinearOperator identity(std::size_t size) {
    return {size, [](std::span<const double> x, std::span<double> y) {
              std::copy(x.begin(), x.end(), y.begin());
            }};
  }

  static LinearOperator dense(DenseMatrix m) {
    if (!m.square()) throw Error(ErrorCode::kShape, "dense operator must be square");
    const std::size_t n = m.rows();
    return {n, [m = std::move(m)](std::span<const double> x, std::span<double> y) {
              const Vector r = m.multiply(x);
              std::copy(r.begin(), r.end(), y.begin());
            }};
  }

  /// s * Op, used to normalize the definiteness sign of a system.
  LinearOperator scaled(double s) const {
    return {size_, [op = apply_, s](std::span<const double> x, std::span<double> y) {
              op(x, y);
              for (auto& v : y) v *= s;
            }};
  }

 private:
  std::size_t size_;
  ApplyFn apply_;
};

}  // namespace toepcg
