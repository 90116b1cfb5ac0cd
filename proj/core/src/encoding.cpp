#include "rcaus/encoding.hpp"

#include <bit>
#include <stdexcept>
#include <string>

#include "rcaus/parallel.hpp"

namespace rcaus {

EncodingMatrix::EncodingMatrix(std::size_t rows, std::size_t events, std::vector<std::int8_t> entries)
    : rows_(rows), events_(events), entries_(std::move(entries)) {
  if (rows_ == 0 || events_ == 0) throw std::invalid_argument("encoding matrix: dimensions must be positive");
  if (entries_.size() != rows_ * events_) throw std::invalid_argument("encoding matrix: entry count mismatch");
  for (auto v : entries_)
    if (v != 1 && v != -1) throw std::invalid_argument("encoding matrix: entries must be +1 or -1");
}

bool EncodingMatrix::is_hadamard() const {
  if (rows_ != events_) return false;
  for (std::size_t a = 0; a < rows_; ++a) {
    for (std::size_t b = a; b < rows_; ++b) {
      long dot = 0;
      for (std::size_t e = 0; e < events_; ++e) dot += (*this)(a, e) * (*this)(b, e);
      if (dot != (a == b ? static_cast<long>(events_) : 0L)) return false;
    }
  }
  return true;
}

bool EncodingMatrix::is_sylvester() const {
  if (rows_ != events_ || !std::has_single_bit(rows_)) return false;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t e = 0; e < events_; ++e)
      if ((*this)(r, e) != ((std::popcount(r & e) & 1) ? -1 : 1)) return false;
  return true;
}

EncodingMatrix hadamard(std::size_t order) {
  if (order == 0 || !std::has_single_bit(order))
    throw std::invalid_argument("hadamard: order " + std::to_string(order) +
                                " is not a power of two (only Sylvester orders are supported)");
  std::vector<std::int8_t> entries(order * order);
  for (std::size_t r = 0; r < order; ++r)
    for (std::size_t e = 0; e < order; ++e) entries[r * order + e] = (std::popcount(r & e) & 1) ? -1 : 1;
  return EncodingMatrix(order, order, std::move(entries));
}

std::vector<int> bias_schedule(const EncodingMatrix& H, std::size_t e) {
  if (e >= H.events())
    throw std::out_of_range("bias_schedule: event " + std::to_string(e) + " out of range [0, " +
                            std::to_string(H.events()) + ")");
  std::vector<int> bias(H.rows());
  for (std::size_t r = 0; r < H.rows(); ++r) bias[r] = H(r, e);
  return bias;
}

template <class T>
EventChannelData<T> hero_encode(const ApertureData<T>& s, const EncodingMatrix& H) {
  const std::size_t R = s.samples.dim(0);
  if (H.rows() != R)
    throw std::invalid_argument("hero_encode: H has " + std::to_string(H.rows()) + " rows but data has " +
                                std::to_string(R));
  const std::size_t E = H.events();
  const std::size_t slab = s.samples.dim(1) * s.samples.dim(2);
  EventChannelData<T> g;
  g.samples = Array3<T>(E, s.samples.dim(1), s.samples.dim(2));
  g.sample_rate = s.sample_rate;
  g.t0 = s.t0;
  g.carrier = s.carrier;
  for (std::size_t e = 0; e < E; ++e) {
    auto out = g.samples.slab(e);
    for (std::size_t r = 0; r < R; ++r) {
      const auto in = s.samples.slab(r);
      if (H(r, e) > 0) {
        for (std::size_t i = 0; i < slab; ++i) out[i] += in[i];
      } else {
        for (std::size_t i = 0; i < slab; ++i) out[i] -= in[i];
      }
    }
  }
  return g;
}

namespace {

template <class T>
void fwht_slabs(T* base, std::size_t E, std::size_t stride, std::size_t begin, std::size_t end) {
  for (std::size_t h = 1; h < E; h *= 2) {
    for (std::size_t i = 0; i < E; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        T* a = base + j * stride;
        T* b = base + (j + h) * stride;
        for (std::size_t k = begin; k < end; ++k) {
          const T x = a[k];
          const T y = b[k];
          a[k] = x + y;
          b[k] = x - y;
        }
      }
    }
  }
}

}  // namespace

template <class T>
DecodedAperture<T> hero_decode(const EventChannelData<T>& g, const EncodingMatrix& H, int threads) {
  if (H.rows() != H.events()) throw std::invalid_argument("hero_decode: encoding matrix must be square");
  const std::size_t E = H.events();
  const bool sylvester = H.is_sylvester();
  if (!sylvester && !H.is_hadamard()) throw std::invalid_argument("hero_decode: encoding matrix is not Hadamard");
  const std::size_t events = g.samples.dim(0);
  if (events == 0 || events % E != 0)
    throw std::invalid_argument("hero_decode: event count " + std::to_string(events) +
                                " is not a multiple of the code order " + std::to_string(E));
  const std::size_t sets = events / E;
  const std::size_t C = g.samples.dim(1);
  const std::size_t N = g.samples.dim(2);
  const std::size_t stride = C * N;
  const double scale = 1.0 / static_cast<double>(E);

  DecodedAperture<T> out;
  out.sample_rate = g.sample_rate;
  out.t0 = g.t0;
  out.carrier = g.carrier;

  if (sylvester) {
    out.samples = g.samples;  // transformed in place
    for (std::size_t s = 0; s < sets; ++s) {
      T* base = out.samples.data() + s * E * stride;
      parallel_for(stride, threads, [&](std::size_t begin, std::size_t end) {
        fwht_slabs(base, E, stride, begin, end);
        for (std::size_t r = 0; r < E; ++r)
          for (std::size_t k = begin; k < end; ++k) base[r * stride + k] *= scale;
      });
    }
  } else {
    out.samples = Array3<T>(events, C, N);
    for (std::size_t s = 0; s < sets; ++s) {
      parallel_for(stride, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = 0; r < E; ++r) {
          T* dst = out.samples.data() + (s * E + r) * stride;
          for (std::size_t e = 0; e < E; ++e) {
            const T* src = g.samples.data() + (s * E + e) * stride;
            const double h = H(r, e);
            for (std::size_t k = begin; k < end; ++k) dst[k] += h * src[k];
          }
          for (std::size_t k = begin; k < end; ++k) dst[k] *= scale;
        }
      });
    }
  }
  return out;
}

template EventChannelData<double> hero_encode(const ApertureData<double>&, const EncodingMatrix&);
template EventChannelData<cplx> hero_encode(const ApertureData<cplx>&, const EncodingMatrix&);
template DecodedAperture<double> hero_decode(const EventChannelData<double>&, const EncodingMatrix&, int);
template DecodedAperture<cplx> hero_decode(const EventChannelData<cplx>&, const EncodingMatrix&, int);

}  // namespace rcaus
