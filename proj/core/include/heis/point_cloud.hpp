#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "heis/group.hpp"

namespace heis {

/// Packed storage for many points of H^n; point i occupies coordinates
/// [i*(2n+1), (i+1)*(2n+1)).
class PointCloud {
 public:
  explicit PointCloud(int n);

  int dim() const noexcept { return n_; }
  std::size_t stride() const noexcept { return stride_; }
  std::size_t size() const noexcept { return data_.size() / stride_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const double> operator[](std::size_t i) const noexcept {
    return {data_.data() + i * stride_, stride_};
  }
  HPoint point(std::size_t i) const { return HPoint::from_coords((*this)[i]); }

  void reserve(std::size_t count) { data_.reserve(count * stride_); }
  void push_back(std::span<const double> coords);
  void push_back(const HPoint& p) { push_back(p.coords()); }
  void append(const PointCloud& other);

  const std::vector<double>& data() const noexcept { return data_; }

 private:
  int n_;
  std::size_t stride_;
  std::vector<double> data_;
};

}  // namespace heis
