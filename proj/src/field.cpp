#include "spde/field.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "binary field layout assumes a little-endian host");

namespace spde {

namespace {
constexpr char kMagic[5] = {'S', 'P', 'D', 'E', '1'};
constexpr std::uint8_t kVersion = 1;

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

void write_field_csv(const Field& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "t";
  for (int k = 0; k <= f.grid.M; ++k) out << "," << fmt17(f.grid.y(k));
  out << "\n";
  for (int i = 0; i <= f.grid.N; ++i) {
    out << fmt17(f.grid.t(i));
    for (int k = 0; k <= f.grid.M; ++k) out << "," << fmt17(f(i, k));
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Field read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty field file: " + path);
  std::vector<double> ys;
  {
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');  // "t"
    while (std::getline(ss, cell, ',')) ys.push_back(std::stod(cell));
  }
  if (ys.size() < 2) throw std::runtime_error("field csv needs at least two spatial nodes");
  std::vector<double> ts;
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    ts.push_back(std::stod(cell));
    std::size_t k = 0;
    while (std::getline(ss, cell, ',')) {
      values.push_back(std::stod(cell));
      ++k;
    }
    if (k != ys.size()) throw std::runtime_error("ragged field csv row in " + path);
  }
  if (ts.size() < 2) throw std::runtime_error("field csv needs at least two time rows");
  Field f;
  const int N = static_cast<int>(ts.size()) - 1;
  const int M = static_cast<int>(ys.size()) - 1;
  f.grid = model::GridSpec(N, M, ts.back(), ys.front());
  f.values = std::move(values);
  f.provenance = Field::Provenance::external;
  return f;
}

void write_field_binary(const Field& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(&kVersion), 1);
  const std::uint64_t n = f.grid.N, m = f.grid.M;
  out.write(reinterpret_cast<const char*>(&n), 8);
  out.write(reinterpret_cast<const char*>(&m), 8);
  out.write(reinterpret_cast<const char*>(&f.grid.T), 8);
  out.write(reinterpret_cast<const char*>(&f.grid.b), 8);
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write failed: " + path);
}

Field read_field_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[5];
  std::uint8_t version = 0;
  in.read(magic, 5);
  in.read(reinterpret_cast<char*>(&version), 1);
  if (!in || std::memcmp(magic, kMagic, 5) != 0)
    throw std::runtime_error("not a field file (bad magic): " + path);
  if (version != kVersion)
    throw std::runtime_error("unsupported field file version in " + path);
  std::uint64_t n = 0, m = 0;
  double T = 0, b = 0;
  in.read(reinterpret_cast<char*>(&n), 8);
  in.read(reinterpret_cast<char*>(&m), 8);
  in.read(reinterpret_cast<char*>(&T), 8);
  in.read(reinterpret_cast<char*>(&b), 8);
  if (!in) throw std::runtime_error("truncated field header in " + path);
  Field f;
  f.grid = model::GridSpec(static_cast<int>(n), static_cast<int>(m), T, b);
  f.values.resize((n + 1) * (m + 1));
  in.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!in) throw std::runtime_error("truncated field payload in " + path);
  f.provenance = Field::Provenance::external;
  return f;
}

namespace {
bool has_suffix(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}
}  // namespace

void write_field(const Field& f, const std::string& path) {
  if (has_suffix(path, ".csv")) write_field_csv(f, path);
  else write_field_binary(f, path);
}

Field read_field(const std::string& path) {
  if (has_suffix(path, ".csv")) return read_field_csv(path);
  return read_field_binary(path);
}

}  // namespace spde
