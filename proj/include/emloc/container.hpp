// SPDX-License-Identifier: Apache-2.0

#ifndef EMLOC_CONTAINER_HPP
#define EMLOC_CONTAINER_HPP

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "emloc/fista.hpp"
#include "emloc/forward.hpp"
#include "emloc/imaging.hpp"

namespace emloc
{

namespace fs = std::filesystem;

// Malformed, missing or inconsistent files.
class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class ArrayFormat
{
  csv, // text, shortest round-trip decimal representation
  bin  // flat little-endian IEEE-754 float64
};

ArrayFormat parse_array_format(const std::string &name);
const char *to_string(ArrayFormat f);

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);

nlohmann::json grid_to_json(const VoxelGrid &grid);
VoxelGrid grid_from_json(const nlohmann::json &j);

// Fields: <stem>.json metadata next to <stem>.csv or <stem>.bin. Voxels are
// stored in linear index order (x fastest). CSV columns are
// i,j,k,vx,vy,vz for real fields and i,j,k,vx_re,vx_im,... for complex ones;
// binary data holds 3 (real) or 6 (complex) doubles per voxel.
// `extra` is merged into the metadata object. Returns the metadata path.
fs::path write_field(const fs::path &dir, const std::string &stem, const RealField &field, ArrayFormat format,
                     const nlohmann::json &extra = nlohmann::json::object());
fs::path write_field(const fs::path &dir, const std::string &stem, const ComplexField &field, ArrayFormat format,
                     const nlohmann::json &extra = nlohmann::json::object());
RealField read_real_field(const fs::path &meta_path);
ComplexField read_complex_field(const fs::path &meta_path);
nlohmann::json read_metadata(const fs::path &meta_path);

// Boundary data: <stem>.json, <stem>_mesh.csv (x,y,z,weight,nx,ny,nz; always
// CSV) and <stem>_data.{csv,bin}. Data rows are point-major, one row per
// (point, frequency): point,freq,ex_re,ex_im,ey_re,ey_im,ez_re,ez_im.
fs::path write_boundary_data(const fs::path &dir, const std::string &stem, const BoundaryData &data,
                             ArrayFormat format);
BoundaryData read_boundary_data(const fs::path &meta_path);

// Image stack: images.json index plus image_NNN field containers and an
// optional broadband container.
fs::path write_image_stack(const fs::path &dir, const ImageStack &stack, ArrayFormat format);
ImageStack read_image_stack(const fs::path &index_path);

// Columns k,L,M,R,gamma,s,i_k,rel_change,P.
void write_trace_csv(const fs::path &path, const FistaTrace &trace);
FistaTrace read_trace_csv(const fs::path &path);

// 8-bit binary PGM (P5) of voxel values on one grid slice, linearly mapped
// from [0, max] to [0, 255]. Columns follow the lower remaining axis and
// rows the higher one, first row at index 0. index < 0 selects the middle
// slice.
void write_pgm_slice(const fs::path &path, const VoxelGrid &grid, const std::vector<double> &values, int axis,
                     long index);

struct PgmImage
{
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<unsigned char> pixels;
};
PgmImage read_pgm(const fs::path &path);

void write_json(const fs::path &path, const nlohmann::json &j);
void write_text(const fs::path &path, const std::string &text);

} // namespace emloc

#endif // EMLOC_CONTAINER_HPP
