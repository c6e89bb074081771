#pragma once

#include "pekar/grid.hpp"
#include "pekar/product_ansatz.hpp"

#include <fstream>
#include <string>
#include <vector>

namespace pekar {

/// Binary layout: 8-byte magic "PEKARF3D", int32 n, float64 L, then n^3
/// float64 values in row-major order, all little-endian.
void write_field_binary(const std::string& path, const Field3D& f);
Field3D read_field_binary(const std::string& path);

/// CSV layout: "n,L" header, one line with both values, a "value" header,
/// then n^3 values in row-major order.
void write_field_csv(const std::string& path, const Field3D& f);
Field3D read_field_csv(const std::string& path);

/// Two columns "r,value" on the radial nodes.
void write_radial_csv(const std::string& path, const RadialField& u);
/// Reads back a field written by write_radial_csv (uniform nodes from 0).
RadialField read_radial_csv(const std::string& path);

/// Columns "kx,ky,kz,re_z,im_z", one line per mode.
void write_displacement_csv(const std::string& path, const PhononDisplacement& z);

/// Full-precision decimal text of a double (round-trips exactly).
std::string format_double(double x);

/// Minimal CSV writer: fields are written verbatim unless they contain a
/// comma, quote or newline, in which case they are quoted.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  CsvWriter& header(const std::vector<std::string>& columns);
  CsvWriter& row(const std::vector<std::string>& fields);

 private:
  void line(const std::vector<std::string>& fields);

  std::string path_;
  std::ofstream out_;
};

}  // namespace pekar
