#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "rcaus/beamform.hpp"
#include "rcaus/datasets.hpp"

namespace rcaus {

// Binary artifact: a 128-byte little-endian header followed by the f32 payload.
//
//   offset  size  field
//        0     8  magic "RCAUSND1"
//        8     4  u32 version (1)
//       12     4  u32 kind (1 event-channel, 2 decoded-aperture, 3 volume)
//       16    24  u64 dims[3]
//       40    24  f64 scale[3]   traces: {0, 0, sample rate}; volume: voxel spacing
//       64     8  f64 carrier    demodulation frequency, 0 for RF
//       72     4  u32 format     (1 f32 real, 2 f32 complex interleaved)
//       76     4  u32 reserved (0)
//       80    24  f64 origin[3]  traces: {0, 0, t0}; volume: grid origin
//      104    24  zero

class FormatError : public Error {
 public:
  using Error::Error;
};

enum class DatasetKind : std::uint32_t { event_channel = 1, decoded_aperture = 2, volume = 3 };
enum class SampleFormat : std::uint32_t { f32_real = 1, f32_complex = 2 };

const char* to_string(DatasetKind kind);

struct DatasetHeader {
  std::uint32_t version = 1;
  DatasetKind kind = DatasetKind::event_channel;
  std::array<std::uint64_t, 3> dims{0, 0, 0};
  std::array<double, 3> scale{0, 0, 0};
  double carrier = 0.0;
  SampleFormat format = SampleFormat::f32_real;
  std::array<double, 3> origin{0, 0, 0};

  std::size_t element_count() const { return dims[0] * dims[1] * dims[2]; }
  std::size_t payload_bytes() const { return element_count() * (format == SampleFormat::f32_complex ? 8 : 4); }

  friend bool operator==(const DatasetHeader&, const DatasetHeader&) = default;
};

inline constexpr std::size_t kHeaderBytes = 128;

std::array<unsigned char, kHeaderBytes> encode_header(const DatasetHeader& h);
/// Throws FormatError on a bad magic, version, kind or format.
DatasetHeader decode_header(const unsigned char* bytes, std::size_t size);

/// Header plus payload as f32 values (complex data interleaved re, im).
struct RawDataset {
  DatasetHeader header;
  std::vector<float> payload;
};

void write_raw(const std::filesystem::path& path, const RawDataset& data);
/// Throws FormatError when the file is truncated or longer than the header says.
RawDataset read_raw(const std::filesystem::path& path);
DatasetHeader read_header(const std::filesystem::path& path);

// Typed wrappers. Samples are rounded to f32 on write.
void save(const std::filesystem::path& path, const EventChannelData<double>& d);
void save(const std::filesystem::path& path, const EventChannelData<cplx>& d);
void save(const std::filesystem::path& path, const DecodedAperture<cplx>& d);
void save(const std::filesystem::path& path, const Volume& v);

/// Throw FormatError when the stored kind or sample format does not match.
EventChannelData<double> load_event_channel_rf(const std::filesystem::path& path);
EventChannelData<cplx> load_event_channel_iq(const std::filesystem::path& path);
DecodedAperture<cplx> load_decoded(const std::filesystem::path& path);
Volume load_volume(const std::filesystem::path& path);

}  // namespace rcaus
