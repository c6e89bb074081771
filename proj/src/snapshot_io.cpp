#include "pekar/snapshot_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <sstream>

namespace pekar {

namespace {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

constexpr char kMagic[8] = {'P', 'E', 'K', 'A', 'R', 'F', '3', 'D'};

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw PekarError("cannot open " + path + " for writing");
  return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw PekarError("cannot open " + path);
  return in;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(end[-1]))) --end;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) throw PekarError(where + ": not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw PekarError("format_double failed");
  return std::string(buf, ptr);
}

void write_field_binary(const std::string& path, const Field3D& f) {
  std::ofstream out = open_out(path, std::ios::binary);
  const std::int32_t n = f.grid.n();
  const double L = f.grid.L();
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&L), sizeof L);
  out.write(reinterpret_cast<const char*>(f.values.data()), static_cast<std::streamsize>(sizeof(double) * f.values.size()));
  if (!out) throw PekarError("write failed: " + path);
}

Field3D read_field_binary(const std::string& path) {
  std::ifstream in = open_in(path, std::ios::binary);
  char magic[8];
  std::int32_t n = 0;
  double L = 0.0;
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw PekarError(path + ": not a field snapshot");
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&L), sizeof L);
  if (!in) throw PekarError(path + ": truncated header");
  Field3D f(Grid3D(n, L));
  in.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(sizeof(double) * f.values.size()));
  if (!in) throw PekarError(path + ": truncated data");
  return f;
}

void write_field_csv(const std::string& path, const Field3D& f) {
  std::ofstream out = open_out(path);
  out << "n,L\n" << f.grid.n() << ',' << format_double(f.grid.L()) << "\nvalue\n";
  for (Eigen::Index i = 0; i < f.values.size(); ++i) out << format_double(f.values[i]) << '\n';
  if (!out) throw PekarError("write failed: " + path);
}

Field3D read_field_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::getline(in, line);
  if (line != "n,L") throw PekarError(path + ": missing n,L header");
  std::getline(in, line);
  const auto head = split(line);
  if (head.size() != 2) throw PekarError(path + ": malformed n,L line");
  const int n = static_cast<int>(parse_double(head[0], path));
  Field3D f(Grid3D(n, parse_double(head[1], path)));
  std::getline(in, line);
  if (line != "value") throw PekarError(path + ": missing value header");
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    if (!std::getline(in, line)) throw PekarError(path + ": truncated data");
    f.values[i] = parse_double(line, path);
  }
  return f;
}

void write_radial_csv(const std::string& path, const RadialField& u) {
  std::ofstream out = open_out(path);
  out << "r,value\n";
  for (int j = 0; j < u.grid.m(); ++j) out << format_double(u.grid.r(j)) << ',' << format_double(u.values[j]) << '\n';
  if (!out) throw PekarError("write failed: " + path);
}

RadialField read_radial_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::getline(in, line);
  if (line != "r,value") throw PekarError(path + ": missing r,value header");
  std::vector<double> r, v;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cols = split(line);
    if (cols.size() != 2) throw PekarError(path + ": expected two columns");
    r.push_back(parse_double(cols[0], path));
    v.push_back(parse_double(cols[1], path));
  }
  if (r.size() < 2) throw PekarError(path + ": need at least two nodes");
  RadialField u(RadialGrid(static_cast<int>(r.size()), r.back()));
  for (std::size_t j = 0; j < r.size(); ++j) {
    if (std::abs(r[j] - u.grid.r(static_cast<int>(j))) > 1e-9 * (1.0 + r.back()))
      throw PekarError(path + ": nodes are not uniform from 0");
    u.values[static_cast<Eigen::Index>(j)] = v[j];
  }
  return u;
}

void write_displacement_csv(const std::string& path, const PhononDisplacement& z) {
  std::ofstream out = open_out(path);
  out << "kx,ky,kz,re_z,im_z\n";
  for (std::size_t i = 0; i < z.kgrid.size(); ++i) {
    const Eigen::Vector3d k = z.kgrid.k(i);
    const auto& zi = z.z[static_cast<Eigen::Index>(i)];
    out << format_double(k[0]) << ',' << format_double(k[1]) << ',' << format_double(k[2]) << ','
        << format_double(zi.real()) << ',' << format_double(zi.imag()) << '\n';
  }
  if (!out) throw PekarError("write failed: " + path);
}

CsvWriter::CsvWriter(const std::string& path) : path_(path), out_(open_out(path)) {}

void CsvWriter::line(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\n") == std::string::npos) {
      out_ << f;
    } else {
      out_ << '"';
      for (char c : f) out_ << (c == '"' ? "\"\"" : std::string(1, c));
      out_ << '"';
    }
  }
  out_ << '\n';
  if (!out_) throw PekarError("write failed: " + path_);
}

CsvWriter& CsvWriter::header(const std::vector<std::string>& columns) {
  line(columns);
  return *this;
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& fields) {
  line(fields);
  out_.flush();
  return *this;
}

}  // namespace pekar
