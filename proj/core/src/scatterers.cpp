#include "rcaus/scatterers.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace rcaus {

void ScattererField::validate() const {
  if (positions.size() != amplitudes.size())
    throw std::invalid_argument("scatterer field: positions and amplitudes differ in length");
  for (std::size_t i = 0; i < positions.size(); ++i)
    if (!(positions[i].z > 0.0))
      throw std::invalid_argument("scatterer field: scatterer " + std::to_string(i) + " is not in front of the aperture (z <= 0)");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ScattererField read_scatterers(std::istream& in) {
  ScattererField field;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    std::array<double, 4> v{};
    const char* p = view.data();
    const char* end = view.data() + view.size();
    for (std::size_t i = 0; i < 4; ++i) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      auto [next, ec] = std::from_chars(p, end, v[i]);
      if (ec != std::errc{}) throw Error("scatterer file line " + std::to_string(lineno) + ": expected 4 numbers");
      p = next;
    }
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    if (p != end) throw Error("scatterer file line " + std::to_string(lineno) + ": trailing characters");
    field.add({v[0], v[1], v[2]}, v[3]);
  }
  field.validate();
  return field;
}

ScattererField read_scatterers(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scatterer file " + path.string());
  return read_scatterers(in);
}

void write_scatterers(std::ostream& out, const ScattererField& field) {
  std::array<char, 32> buf{};
  auto put = [&](double v) {
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.write(buf.data(), end - buf.data());
  };
  out << "# x y z amplitude\n";
  for (std::size_t i = 0; i < field.size(); ++i) {
    put(field.positions[i].x);
    out << ' ';
    put(field.positions[i].y);
    out << ' ';
    put(field.positions[i].z);
    out << ' ';
    put(field.amplitudes[i]);
    out << '\n';
  }
}

void write_scatterers(const std::filesystem::path& path, const ScattererField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write scatterer file " + path.string());
  write_scatterers(out, field);
}

}  // namespace rcaus
