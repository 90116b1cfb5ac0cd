#pragma once

#include <cstdint>
#include <vector>

#include "rcaus/datasets.hpp"

namespace rcaus {

/// R x E matrix of row biases (+1/-1) over E receive events.
class EncodingMatrix {
 public:
  EncodingMatrix(std::size_t rows, std::size_t events, std::vector<std::int8_t> entries);

  std::size_t rows() const { return rows_; }
  std::size_t events() const { return events_; }
  int operator()(std::size_t r, std::size_t e) const { return entries_[r * events_ + e]; }

  /// H * H^T == E * I, checked in integer arithmetic. Only square matrices qualify.
  bool is_hadamard() const;
  /// Natural-ordered Sylvester matrix, H[r][e] = (-1)^popcount(r & e).
  bool is_sylvester() const;

  friend bool operator==(const EncodingMatrix&, const EncodingMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t events_;
  std::vector<std::int8_t> entries_;
};

/// Sylvester Hadamard matrix. Order must be a power of two; anything else throws.
EncodingMatrix hadamard(std::size_t order);

/// Per-row bias for event e (column e of H). The same vector drives the AC
/// transmit polarity, so bias * polarity is +1 on every row.
std::vector<int> bias_schedule(const EncodingMatrix& H, std::size_t e);

/// g[e][c][t] = sum_r H[r][e] s[r][c][t].
template <class T>
EventChannelData<T> hero_encode(const ApertureData<T>& s, const EncodingMatrix& H);

/// s_hat[r][c][t] = (1/E) sum_e H[r][e] g[e][c][t].
///
/// H must be square and Hadamard. Sylvester matrices use an in-place fast
/// Walsh-Hadamard transform along the event axis; other Hadamard matrices fall
/// back to the dense product. When g holds k consecutive HERO sets (k * E
/// events), each set is decoded independently and the result is stacked to
/// (k * R, C, T). Work is split over (c, t) slabs; the per-output arithmetic is
/// independent of the split.
template <class T>
DecodedAperture<T> hero_decode(const EventChannelData<T>& g, const EncodingMatrix& H, int threads = 1);

}  // namespace rcaus
