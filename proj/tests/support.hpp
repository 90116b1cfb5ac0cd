#pragma once

#include <cmath>
#include <complex>
#include <filesystem>
#include <random>
#include <span>
#include <string>

#include "rcaus/array3.hpp"
#include "rcaus/geometry.hpp"

namespace rcaus::test {

inline ArrayGeometry small_array(int rows = 16, int cols = 16) {
  return {rows, cols, 250e-6, 0.0, 6.25e6};
}

inline MediumSpec medium() { return {1540.0, 50e6}; }

/// ||a - b|| / ||b|| over flattened arrays.
template <class T>
double relative_rms(std::span<const T> a, std::span<const T> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(std::complex<double>(a[i] - b[i]));
    den += std::norm(std::complex<double>(b[i]));
  }
  return std::sqrt(num / den);
}

template <class T>
Array3<T> random_array(std::size_t n0, std::size_t n1, std::size_t n2, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  Array3<T> a(n0, n1, n2);
  for (auto& v : a.flat()) {
    if constexpr (std::is_same_v<T, double>)
      v = dist(gen);
    else
      v = T(dist(gen), dist(gen));
  }
  return a;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("rcaus_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace rcaus::test
