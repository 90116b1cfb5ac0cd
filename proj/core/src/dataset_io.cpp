#include "rcaus/dataset_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace rcaus {

static_assert(std::endian::native == std::endian::little, "dataset I/O assumes a little-endian host");

const char* to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::event_channel: return "event-channel";
    case DatasetKind::decoded_aperture: return "decoded-aperture";
    case DatasetKind::volume: return "volume";
  }
  return "unknown";
}

namespace {

constexpr char kMagic[8] = {'R', 'C', 'A', 'U', 'S', 'N', 'D', '1'};

template <class T>
void put(unsigned char* dst, T v) {
  std::memcpy(dst, &v, sizeof v);
}

template <class T>
T get(const unsigned char* src) {
  T v;
  std::memcpy(&v, src, sizeof v);
  return v;
}

}  // namespace

std::array<unsigned char, kHeaderBytes> encode_header(const DatasetHeader& h) {
  std::array<unsigned char, kHeaderBytes> b{};
  std::memcpy(b.data(), kMagic, 8);
  put(b.data() + 8, h.version);
  put(b.data() + 12, static_cast<std::uint32_t>(h.kind));
  for (int i = 0; i < 3; ++i) put(b.data() + 16 + 8 * i, h.dims[static_cast<std::size_t>(i)]);
  for (int i = 0; i < 3; ++i) put(b.data() + 40 + 8 * i, h.scale[static_cast<std::size_t>(i)]);
  put(b.data() + 64, h.carrier);
  put(b.data() + 72, static_cast<std::uint32_t>(h.format));
  for (int i = 0; i < 3; ++i) put(b.data() + 80 + 8 * i, h.origin[static_cast<std::size_t>(i)]);
  return b;
}

DatasetHeader decode_header(const unsigned char* b, std::size_t size) {
  if (size < kHeaderBytes) throw FormatError("dataset: header truncated");
  if (std::memcmp(b, kMagic, 8) != 0) throw FormatError("dataset: bad magic (not an RCAUSND1 file)");
  DatasetHeader h;
  h.version = get<std::uint32_t>(b + 8);
  if (h.version != 1) throw FormatError("dataset: unsupported version " + std::to_string(h.version));
  const auto kind = get<std::uint32_t>(b + 12);
  if (kind < 1 || kind > 3) throw FormatError("dataset: unknown kind " + std::to_string(kind));
  h.kind = static_cast<DatasetKind>(kind);
  for (std::size_t i = 0; i < 3; ++i) h.dims[i] = get<std::uint64_t>(b + 16 + 8 * i);
  for (std::size_t i = 0; i < 3; ++i) h.scale[i] = get<double>(b + 40 + 8 * i);
  h.carrier = get<double>(b + 64);
  const auto format = get<std::uint32_t>(b + 72);
  if (format < 1 || format > 2) throw FormatError("dataset: unknown sample format " + std::to_string(format));
  h.format = static_cast<SampleFormat>(format);
  for (std::size_t i = 0; i < 3; ++i) h.origin[i] = get<double>(b + 80 + 8 * i);
  return h;
}

void write_raw(const std::filesystem::path& path, const RawDataset& d) {
  const std::size_t values = d.header.element_count() * (d.header.format == SampleFormat::f32_complex ? 2 : 1);
  if (d.payload.size() != values) throw std::invalid_argument("dataset: payload size does not match header dims");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  const auto h = encode_header(d.header);
  out.write(reinterpret_cast<const char*>(h.data()), static_cast<std::streamsize>(h.size()));
  out.write(reinterpret_cast<const char*>(d.payload.data()), static_cast<std::streamsize>(d.payload.size() * 4));
  if (!out) throw Error("write failed for " + path.string());
}

DatasetHeader read_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::array<unsigned char, kHeaderBytes> b{};
  in.read(reinterpret_cast<char*>(b.data()), static_cast<std::streamsize>(b.size()));
  return decode_header(b.data(), static_cast<std::size_t>(in.gcount()));
}

RawDataset read_raw(const std::filesystem::path& path) {
  RawDataset d;
  d.header = read_header(path);
  const auto size = std::filesystem::file_size(path);
  if (size != kHeaderBytes + d.header.payload_bytes())
    throw FormatError("dataset " + path.string() + ": payload is " + std::to_string(size - kHeaderBytes) +
                      " bytes, header promises " + std::to_string(d.header.payload_bytes()));
  std::ifstream in(path, std::ios::binary);
  in.seekg(static_cast<std::streamoff>(kHeaderBytes));
  d.payload.resize(d.header.payload_bytes() / 4);
  in.read(reinterpret_cast<char*>(d.payload.data()), static_cast<std::streamsize>(d.header.payload_bytes()));
  if (!in) throw FormatError("dataset " + path.string() + ": short read");
  return d;
}

namespace {

template <class T>
std::vector<float> to_f32(const Array3<T>& a) {
  std::vector<float> out;
  if constexpr (std::is_same_v<T, double>) {
    out.reserve(a.size());
    for (double v : a.flat()) out.push_back(static_cast<float>(v));
  } else {
    out.reserve(2 * a.size());
    for (const cplx& v : a.flat()) {
      out.push_back(static_cast<float>(v.real()));
      out.push_back(static_cast<float>(v.imag()));
    }
  }
  return out;
}

template <class T>
Array3<T> from_f32(const RawDataset& d) {
  const auto& dims = d.header.dims;
  Array3<T> a(dims[0], dims[1], dims[2]);
  auto flat = a.flat();
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if constexpr (std::is_same_v<T, double>)
      flat[i] = d.payload[i];
    else
      flat[i] = cplx(d.payload[2 * i], d.payload[2 * i + 1]);
  }
  return a;
}

template <class T>
void save_traces(const std::filesystem::path& path, const Traces<T>& t, DatasetKind kind) {
  RawDataset d;
  d.header.kind = kind;
  d.header.dims = {t.samples.dim(0), t.samples.dim(1), t.samples.dim(2)};
  d.header.scale = {0, 0, t.sample_rate};
  d.header.carrier = t.carrier;
  d.header.format = std::is_same_v<T, double> ? SampleFormat::f32_real : SampleFormat::f32_complex;
  d.header.origin = {0, 0, t.t0};
  d.payload = to_f32(t.samples);
  write_raw(path, d);
}

RawDataset expect(const std::filesystem::path& path, DatasetKind kind, SampleFormat format) {
  auto d = read_raw(path);
  if (d.header.kind != kind)
    throw FormatError(path.string() + " holds " + to_string(d.header.kind) + " data, expected " + to_string(kind));
  if (d.header.format != format)
    throw FormatError(path.string() + (format == SampleFormat::f32_complex ? " holds real samples, expected complex IQ"
                                                                           : " holds complex samples, expected real RF"));
  return d;
}

template <class Out>
Out load_traces(const std::filesystem::path& path, DatasetKind kind, SampleFormat format) {
  using T = std::decay_t<decltype(std::declval<Out>().samples.flat()[0])>;
  const auto d = expect(path, kind, format);
  Out out;
  out.samples = from_f32<T>(d);
  out.sample_rate = d.header.scale[2];
  out.t0 = d.header.origin[2];
  out.carrier = d.header.carrier;
  return out;
}

}  // namespace

void save(const std::filesystem::path& path, const EventChannelData<double>& d) {
  save_traces(path, d, DatasetKind::event_channel);
}
void save(const std::filesystem::path& path, const EventChannelData<cplx>& d) {
  save_traces(path, d, DatasetKind::event_channel);
}
void save(const std::filesystem::path& path, const DecodedAperture<cplx>& d) {
  save_traces(path, d, DatasetKind::decoded_aperture);
}

void save(const std::filesystem::path& path, const Volume& v) {
  RawDataset d;
  d.header.kind = DatasetKind::volume;
  d.header.dims = {v.grid.counts[0], v.grid.counts[1], v.grid.counts[2]};
  d.header.scale = v.grid.spacing;
  d.header.format = SampleFormat::f32_complex;
  d.header.origin = {v.grid.origin.x, v.grid.origin.y, v.grid.origin.z};
  d.payload = to_f32(v.voxels);
  write_raw(path, d);
}

EventChannelData<double> load_event_channel_rf(const std::filesystem::path& path) {
  return load_traces<EventChannelData<double>>(path, DatasetKind::event_channel, SampleFormat::f32_real);
}
EventChannelData<cplx> load_event_channel_iq(const std::filesystem::path& path) {
  return load_traces<EventChannelData<cplx>>(path, DatasetKind::event_channel, SampleFormat::f32_complex);
}
DecodedAperture<cplx> load_decoded(const std::filesystem::path& path) {
  return load_traces<DecodedAperture<cplx>>(path, DatasetKind::decoded_aperture, SampleFormat::f32_complex);
}

Volume load_volume(const std::filesystem::path& path) {
  const auto d = expect(path, DatasetKind::volume, SampleFormat::f32_complex);
  Volume v;
  v.grid.counts = {d.header.dims[0], d.header.dims[1], d.header.dims[2]};
  v.grid.spacing = d.header.scale;
  v.grid.origin = {d.header.origin[0], d.header.origin[1], d.header.origin[2]};
  v.voxels = from_f32<cplx>(d);
  return v;
}

}  // namespace rcaus
