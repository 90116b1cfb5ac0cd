#include "rcaus/image_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace rcaus {

void write_pgm(const std::filesystem::path& path, const Image2D& image, double db_range) {
  if (!(db_range > 0)) throw std::invalid_argument("render: dB range must be > 0");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << "P5\n" << image.cols << ' ' << image.rows << "\n255\n";
  double peak = 0.0;
  for (double v : image.values) peak = std::max(peak, v);
  std::string row(image.cols, '\0');
  for (std::size_t r = 0; r < image.rows; ++r) {
    for (std::size_t c = 0; c < image.cols; ++c) {
      const double v = image.at(r, c);
      double level = 0.0;
      if (peak > 0 && v > 0) level = std::clamp((20.0 * std::log10(v / peak) + db_range) / db_range, 0.0, 1.0);
      row[c] = static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * level)));
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw Error("write failed for " + path.string());
}

void write_image_csv(const std::filesystem::path& path, const Image2D& image) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  char buf[32];
  for (std::size_t r = 0; r < image.rows; ++r) {
    for (std::size_t c = 0; c < image.cols; ++c) {
      if (c) out << ',';
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, image.at(r, c));
      out.write(buf, end - buf);
    }
    out << '\n';
  }
}

}  // namespace rcaus
