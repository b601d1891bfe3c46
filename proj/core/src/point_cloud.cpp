#include "heis/point_cloud.hpp"

#include <stdexcept>

namespace heis {

PointCloud::PointCloud(int n) : n_(n), stride_(static_cast<std::size_t>(2 * n + 1)) {
  if (n < 1) throw std::invalid_argument("PointCloud: n must be >= 1");
}

void PointCloud::push_back(std::span<const double> coords) {
  if (coords.size() != stride_) throw std::invalid_argument("PointCloud: dimension mismatch");
  data_.insert(data_.end(), coords.begin(), coords.end());
}

void PointCloud::append(const PointCloud& other) {
  if (other.n_ != n_) throw std::invalid_argument("PointCloud: dimension mismatch");
  data_.insert(data_.end(), other.data_.begin(), other.data_.end());
}

}  // namespace heis
