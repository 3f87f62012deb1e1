// SPDX-License-Identifier: Apache-2.0

#include "emloc/container.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace emloc
{

using nlohmann::json;

namespace
{

constexpr const char *field_schema = "emloc.field/1";
constexpr const char *boundary_schema = "emloc.boundary_data/1";
constexpr const char *stack_schema = "emloc.image_stack/1";

std::ofstream open_out(const fs::path &path, std::ios::openmode mode = std::ios::out)
{
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out)
    throw IoError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path &path, std::ios::openmode mode = std::ios::in)
{
  std::ifstream in(path, mode);
  if (!in)
    throw IoError("cannot open " + path.string());
  return in;
}

void close_checked(std::ofstream &out, const fs::path &path)
{
  out.close();
  if (!out)
    throw IoError("write failed for " + path.string());
}

std::vector<std::string_view> split(std::string_view line, char sep)
{
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;)
  {
    const std::size_t pos = line.find(sep, start);
    parts.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return parts;
}

std::size_t parse_size(std::string_view s)
{
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw IoError("malformed integer '" + std::string(s) + "'");
  return v;
}

void strip_cr(std::string &line)
{
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
}

// Reads a CSV with the given header. Each row must have header.size() cells.
template <typename RowFn>
void read_csv(const fs::path &path, const std::string &header, std::size_t expected_rows, RowFn &&row)
{
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line))
    throw IoError(path.string() + ": empty file");
  strip_cr(line);
  if (line != header)
    throw IoError(path.string() + ": unexpected header '" + line + "'");
  const std::size_t cols = split(header, ',').size();
  std::size_t r = 0;
  while (std::getline(in, line))
  {
    strip_cr(line);
    if (line.empty())
      continue;
    const auto cells = split(line, ',');
    if (cells.size() != cols)
      throw IoError(path.string() + ": row " + std::to_string(r + 1) + " has " + std::to_string(cells.size()) +
                    " cells, expected " + std::to_string(cols));
    if (r >= expected_rows)
      throw IoError(path.string() + ": more rows than declared");
    row(r, cells);
    ++r;
  }
  if (r != expected_rows)
    throw IoError(path.string() + ": " + std::to_string(r) + " rows, expected " + std::to_string(expected_rows));
}

void write_le_doubles(const fs::path &path, const std::vector<double> &v)
{
  std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
  if constexpr (std::endian::native == std::endian::little)
  {
    out.write(reinterpret_cast<const char *>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
  else
  {
    for (double d : v)
    {
      std::uint64_t u;
      std::memcpy(&u, &d, 8);
      char b[8];
      for (int i = 0; i < 8; ++i)
        b[i] = static_cast<char>((u >> (8 * i)) & 0xff);
      out.write(b, 8);
    }
  }
  close_checked(out, path);
}

std::vector<double> read_le_doubles(const fs::path &path, std::size_t count)
{
  std::ifstream in = open_in(path, std::ios::in | std::ios::binary);
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (raw.size() != count * 8)
    throw IoError(path.string() + ": " + std::to_string(raw.size()) + " bytes, expected " +
                  std::to_string(count * 8));
  std::vector<double> v(count);
  for (std::size_t n = 0; n < count; ++n)
  {
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i)
      u |= static_cast<std::uint64_t>(static_cast<unsigned char>(raw[8 * n + i])) << (8 * i);
    std::memcpy(&v[n], &u, 8);
  }
  return v;
}

json vec_json(const RVec3 &v) { return json::array({v[0], v[1], v[2]}); }

RVec3 vec_from(const json &j)
{
  if (!j.is_array() || j.size() != 3)
    throw IoError("expected an array of 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <typename T>
constexpr bool is_complex = std::is_same_v<T, Complex>;

template <typename T>
fs::path write_field_impl(const fs::path &dir, const std::string &stem, const VectorField<T> &field,
                          ArrayFormat format, const json &extra)
{
  fs::create_directories(dir);
  const VoxelGrid &g = field.grid();
  const std::string data_name = stem + (format == ArrayFormat::csv ? ".csv" : ".bin");
  const fs::path data_path = dir / data_name;
  if (format == ArrayFormat::csv)
  {
    std::ofstream out = open_out(data_path);
    if constexpr (is_complex<T>)
      out << "i,j,k,vx_re,vx_im,vy_re,vy_im,vz_re,vz_im\n";
    else
      out << "i,j,k,vx,vy,vz\n";
    std::string row;
    for (std::size_t idx = 0; idx < field.size(); ++idx)
    {
      const auto [i, j, k] = g.unravel(idx);
      row = std::to_string(i) + ',' + std::to_string(j) + ',' + std::to_string(k);
      for (int c = 0; c < 3; ++c)
      {
        if constexpr (is_complex<T>)
        {
          row += ',' + format_double(field[idx][c].real());
          row += ',' + format_double(field[idx][c].imag());
        }
        else
        {
          row += ',' + format_double(field[idx][c]);
        }
      }
      row += '\n';
      out << row;
    }
    close_checked(out, data_path);
  }
  else
  {
    std::vector<double> flat;
    flat.reserve(field.size() * (is_complex<T> ? 6 : 3));
    for (const auto &v : field.values())
      for (int c = 0; c < 3; ++c)
      {
        if constexpr (is_complex<T>)
        {
          flat.push_back(v[c].real());
          flat.push_back(v[c].imag());
        }
        else
        {
          flat.push_back(v[c]);
        }
      }
    write_le_doubles(data_path, flat);
  }

  json meta = extra.is_object() ? extra : json::object();
  meta["schema"] = field_schema;
  meta["kind"] = is_complex<T> ? "complex" : "real";
  meta["grid"] = grid_to_json(g);
  meta["format"] = to_string(format);
  meta["data_file"] = data_name;
  meta["index_order"] = "i + nx*(j + ny*k)";
  const fs::path meta_path = dir / (stem + ".json");
  write_json(meta_path, meta);
  return meta_path;
}

template <typename T>
VectorField<T> read_field_impl(const fs::path &meta_path)
{
  const json meta = read_metadata(meta_path);
  try
  {
    if (meta.at("schema").get<std::string>() != field_schema)
      throw IoError(meta_path.string() + ": not a field container");
    const std::string kind = meta.at("kind").get<std::string>();
    if (kind != (is_complex<T> ? "complex" : "real"))
      throw IoError(meta_path.string() + ": field kind is '" + kind + "'");
    const VoxelGrid g = grid_from_json(meta.at("grid"));
    const ArrayFormat format = parse_array_format(meta.at("format").get<std::string>());
    const fs::path data_path = meta_path.parent_path() / meta.at("data_file").get<std::string>();
    VectorField<T> field(g);
    if (format == ArrayFormat::csv)
    {
      const std::string header =
          is_complex<T> ? "i,j,k,vx_re,vx_im,vy_re,vy_im,vz_re,vz_im" : "i,j,k,vx,vy,vz";
      read_csv(data_path, header, g.size(), [&](std::size_t r, const std::vector<std::string_view> &cells) {
        const std::size_t idx = g.linear(parse_size(cells[0]), parse_size(cells[1]), parse_size(cells[2]));
        if (idx != r)
          throw IoError(data_path.string() + ": rows out of index order at row " + std::to_string(r + 1));
        for (int c = 0; c < 3; ++c)
        {
          if constexpr (is_complex<T>)
            field[idx][c] = Complex(parse_double(cells[3 + 2 * c]), parse_double(cells[4 + 2 * c]));
          else
            field[idx][c] = parse_double(cells[3 + c]);
        }
      });
    }
    else
    {
      const std::size_t per = is_complex<T> ? 6 : 3;
      const std::vector<double> flat = read_le_doubles(data_path, g.size() * per);
      for (std::size_t idx = 0; idx < g.size(); ++idx)
        for (int c = 0; c < 3; ++c)
        {
          if constexpr (is_complex<T>)
            field[idx][c] = Complex(flat[idx * 6 + 2 * c], flat[idx * 6 + 2 * c + 1]);
          else
            field[idx][c] = flat[idx * 3 + c];
        }
    }
    return field;
  }
  catch (const json::exception &e)
  {
    throw IoError(meta_path.string() + ": " + e.what());
  }
}

} // namespace

ArrayFormat parse_array_format(const std::string &name)
{
  if (name == "csv")
    return ArrayFormat::csv;
  if (name == "bin")
    return ArrayFormat::bin;
  throw IoError("unknown array format '" + name + "' (expected csv or bin)");
}

const char *to_string(ArrayFormat f) { return f == ArrayFormat::csv ? "csv" : "bin"; }

std::string format_double(double v)
{
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc())
    throw IoError("cannot format double");
  return std::string(buf, ptr);
}

double parse_double(std::string_view s)
{
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw IoError("malformed number '" + std::string(s) + "'");
  return v;
}

json grid_to_json(const VoxelGrid &grid)
{
  return {{"origin", vec_json(grid.origin())},
          {"spacing", grid.spacing()},
          {"dims", json::array({grid.dims()[0], grid.dims()[1], grid.dims()[2]})}};
}

VoxelGrid grid_from_json(const json &j)
{
  const json &d = j.at("dims");
  if (!d.is_array() || d.size() != 3)
    throw IoError("grid dims must be an array of 3 integers");
  return VoxelGrid(vec_from(j.at("origin")), j.at("spacing").get<double>(),
                   {d[0].get<std::size_t>(), d[1].get<std::size_t>(), d[2].get<std::size_t>()});
}

fs::path write_field(const fs::path &dir, const std::string &stem, const RealField &field, ArrayFormat format,
                     const json &extra)
{
  return write_field_impl(dir, stem, field, format, extra);
}

fs::path write_field(const fs::path &dir, const std::string &stem, const ComplexField &field, ArrayFormat format,
                     const json &extra)
{
  return write_field_impl(dir, stem, field, format, extra);
}

RealField read_real_field(const fs::path &meta_path) { return read_field_impl<double>(meta_path); }
ComplexField read_complex_field(const fs::path &meta_path) { return read_field_impl<Complex>(meta_path); }

json read_metadata(const fs::path &meta_path)
{
  std::ifstream in = open_in(meta_path);
  try
  {
    return json::parse(in);
  }
  catch (const json::exception &e)
  {
    throw IoError(meta_path.string() + ": " + e.what());
  }
}

fs::path write_boundary_data(const fs::path &dir, const std::string &stem, const BoundaryData &data,
                             ArrayFormat format)
{
  fs::create_directories(dir);
  const SurfaceMesh &mesh = data.mesh();
  const std::string mesh_name = stem + "_mesh.csv";
  {
    const fs::path p = dir / mesh_name;
    std::ofstream out = open_out(p);
    out << "x,y,z,weight,nx,ny,nz\n";
    for (std::size_t i = 0; i < mesh.size(); ++i)
    {
      const RVec3 &x = mesh.points()[i];
      const RVec3 &n = mesh.normals()[i];
      out << format_double(x[0]) << ',' << format_double(x[1]) << ',' << format_double(x[2]) << ','
          << format_double(mesh.weights()[i]) << ',' << format_double(n[0]) << ',' << format_double(n[1]) << ','
          << format_double(n[2]) << '\n';
    }
    close_checked(out, p);
  }

  const std::string data_name = stem + (format == ArrayFormat::csv ? "_data.csv" : "_data.bin");
  const fs::path data_path = dir / data_name;
  const std::size_t nf = data.n_freqs();
  if (format == ArrayFormat::csv)
  {
    std::ofstream out = open_out(data_path);
    out << "point,freq,ex_re,ex_im,ey_re,ey_im,ez_re,ez_im\n";
    std::string row;
    for (std::size_t i = 0; i < data.n_points(); ++i)
      for (std::size_t n = 0; n < nf; ++n)
      {
        const CVec3 &e = data(i, n);
        row = std::to_string(i) + ',' + std::to_string(n);
        for (int c = 0; c < 3; ++c)
          row += ',' + format_double(e[c].real()) + ',' + format_double(e[c].imag());
        row += '\n';
        out << row;
      }
    close_checked(out, data_path);
  }
  else
  {
    std::vector<double> flat;
    flat.reserve(data.values().size() * 6);
    for (const CVec3 &e : data.values())
      for (int c = 0; c < 3; ++c)
      {
        flat.push_back(e[c].real());
        flat.push_back(e[c].imag());
      }
    write_le_doubles(data_path, flat);
  }

  json meta;
  meta["schema"] = boundary_schema;
  meta["n_points"] = data.n_points();
  meta["n_freqs"] = nf;
  meta["omegas"] = data.freqs().omegas();
  if (mesh.sphere())
    meta["sphere"] = {{"center", vec_json(mesh.sphere()->center)}, {"radius", mesh.sphere()->radius}};
  meta["mesh_file"] = mesh_name;
  meta["data_file"] = data_name;
  meta["format"] = to_string(format);
  meta["row_order"] = "point-major: row = point * n_freqs + freq";
  const fs::path meta_path = dir / (stem + ".json");
  write_json(meta_path, meta);
  return meta_path;
}

BoundaryData read_boundary_data(const fs::path &meta_path)
{
  const json meta = read_metadata(meta_path);
  try
  {
    if (meta.at("schema").get<std::string>() != boundary_schema)
      throw IoError(meta_path.string() + ": not a boundary data container");
    const std::size_t np = meta.at("n_points").get<std::size_t>();
    const std::size_t nf = meta.at("n_freqs").get<std::size_t>();
    FrequencySet freqs(meta.at("omegas").get<std::vector<double>>());
    if (freqs.size() != nf)
      throw IoError(meta_path.string() + ": omegas length does not match n_freqs");
    std::optional<Sphere> sphere;
    if (meta.contains("sphere"))
      sphere = Sphere{vec_from(meta.at("sphere").at("center")), meta.at("sphere").at("radius").get<double>()};

    const fs::path dir = meta_path.parent_path();
    std::vector<RVec3> points(np), normals(np);
    std::vector<double> weights(np);
    read_csv(dir / meta.at("mesh_file").get<std::string>(), "x,y,z,weight,nx,ny,nz", np,
             [&](std::size_t r, const std::vector<std::string_view> &c) {
               points[r] = {parse_double(c[0]), parse_double(c[1]), parse_double(c[2])};
               weights[r] = parse_double(c[3]);
               normals[r] = {parse_double(c[4]), parse_double(c[5]), parse_double(c[6])};
             });
    SurfaceMesh mesh(std::move(points), std::move(weights), std::move(normals), sphere);

    std::vector<CVec3> values(np * nf);
    const fs::path data_path = dir / meta.at("data_file").get<std::string>();
    if (parse_array_format(meta.at("format").get<std::string>()) == ArrayFormat::csv)
    {
      read_csv(data_path, "point,freq,ex_re,ex_im,ey_re,ey_im,ez_re,ez_im", np * nf,
               [&](std::size_t r, const std::vector<std::string_view> &c) {
                 const std::size_t i = parse_size(c[0]);
                 const std::size_t n = parse_size(c[1]);
                 if (i >= np || n >= nf || i * nf + n != r)
                   throw IoError(data_path.string() + ": rows out of order at row " + std::to_string(r + 1));
                 for (int k = 0; k < 3; ++k)
                   values[r][k] = Complex(parse_double(c[2 + 2 * k]), parse_double(c[3 + 2 * k]));
               });
    }
    else
    {
      const std::vector<double> flat = read_le_doubles(data_path, np * nf * 6);
      for (std::size_t r = 0; r < np * nf; ++r)
        for (int k = 0; k < 3; ++k)
          values[r][k] = Complex(flat[6 * r + 2 * k], flat[6 * r + 2 * k + 1]);
    }
    return BoundaryData(std::move(mesh), std::move(freqs), std::move(values));
  }
  catch (const json::exception &e)
  {
    throw IoError(meta_path.string() + ": " + e.what());
  }
  catch (const std::invalid_argument &e)
  {
    throw IoError(meta_path.string() + ": " + e.what());
  }
}

fs::path write_image_stack(const fs::path &dir, const ImageStack &stack, ArrayFormat format)
{
  fs::create_directories(dir);
  json files = json::array();
  char stem[32];
  for (std::size_t n = 0; n < stack.per_freq.size(); ++n)
  {
    std::snprintf(stem, sizeof stem, "image_%03zu", n);
    write_field(dir, stem, stack.per_freq[n], format, {{"omega", stack.freqs[n]}, {"freq_index", n}});
    files.push_back(std::string(stem) + ".json");
  }
  json index;
  index["schema"] = stack_schema;
  index["grid"] = grid_to_json(stack.grid);
  index["omegas"] = stack.freqs.omegas();
  index["images"] = files;
  if (stack.broadband)
  {
    write_field(dir, "broadband", *stack.broadband, format);
    index["broadband"] = "broadband.json";
  }
  const fs::path p = dir / "images.json";
  write_json(p, index);
  return p;
}

ImageStack read_image_stack(const fs::path &index_path)
{
  const json index = read_metadata(index_path);
  try
  {
    if (index.at("schema").get<std::string>() != stack_schema)
      throw IoError(index_path.string() + ": not an image stack index");
    const VoxelGrid grid = grid_from_json(index.at("grid"));
    ImageStack stack(grid, FrequencySet(index.at("omegas").get<std::vector<double>>()));
    const fs::path dir = index_path.parent_path();
    const json &files = index.at("images");
    if (files.size() != stack.freqs.size())
      throw IoError(index_path.string() + ": image count does not match the frequency list");
    for (const auto &f : files)
    {
      ComplexField img = read_complex_field(dir / f.get<std::string>());
      if (!(img.grid() == grid))
        throw IoError(index_path.string() + ": image grid differs from the stack grid");
      stack.per_freq.push_back(std::move(img));
    }
    if (index.contains("broadband"))
    {
      RealField bb = read_real_field(dir / index.at("broadband").get<std::string>());
      if (!(bb.grid() == grid))
        throw IoError(index_path.string() + ": broadband grid differs from the stack grid");
      stack.broadband = std::move(bb);
    }
    return stack;
  }
  catch (const json::exception &e)
  {
    throw IoError(index_path.string() + ": " + e.what());
  }
  catch (const std::invalid_argument &e)
  {
    throw IoError(index_path.string() + ": " + e.what());
  }
}

void write_trace_csv(const fs::path &path, const FistaTrace &trace)
{
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  std::ofstream out = open_out(path);
  out << "k,L,M,R,gamma,s,i_k,rel_change,P\n";
  for (const FistaRecord &r : trace.records)
    out << r.k << ',' << format_double(r.objective) << ',' << format_double(r.fidelity) << ','
        << format_double(r.regularizer) << ',' << format_double(r.gamma) << ',' << format_double(r.s) << ','
        << r.backtracks << ',' << format_double(r.rel_change) << ',' << format_double(r.majorizer) << '\n';
  close_checked(out, path);
}

FistaTrace read_trace_csv(const fs::path &path)
{
  // Row count is not declared up front; count lines first.
  std::size_t rows = 0;
  {
    std::ifstream in = open_in(path);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line))
    {
      strip_cr(line);
      if (!line.empty())
        ++rows;
    }
  }
  FistaTrace trace;
  trace.records.resize(rows);
  read_csv(path, "k,L,M,R,gamma,s,i_k,rel_change,P", rows,
           [&](std::size_t r, const std::vector<std::string_view> &c) {
             FistaRecord &rec = trace.records[r];
             rec.k = parse_size(c[0]);
             rec.objective = parse_double(c[1]);
             rec.fidelity = parse_double(c[2]);
             rec.regularizer = parse_double(c[3]);
             rec.gamma = parse_double(c[4]);
             rec.s = parse_double(c[5]);
             rec.backtracks = parse_size(c[6]);
             rec.rel_change = parse_double(c[7]);
             rec.majorizer = parse_double(c[8]);
           });
  return trace;
}

void write_pgm_slice(const fs::path &path, const VoxelGrid &grid, const std::vector<double> &values, int axis,
                     long index)
{
  if (axis < 0 || axis > 2)
    throw std::invalid_argument("write_pgm_slice: axis must be 0, 1 or 2");
  if (values.size() != grid.size())
    throw std::invalid_argument("write_pgm_slice: value count does not match the grid");
  const Index3 &d = grid.dims();
  const std::size_t slice = index < 0 ? d[axis] / 2 : static_cast<std::size_t>(index);
  if (slice >= d[axis])
    throw std::invalid_argument("write_pgm_slice: slice index out of range");
  const int a = axis == 0 ? 1 : 0;
  const int b = axis == 2 ? 1 : 2;

  double vmax = 0.0;
  for (std::size_t r = 0; r < d[b]; ++r)
    for (std::size_t c = 0; c < d[a]; ++c)
    {
      Index3 ijk{};
      ijk[axis] = slice;
      ijk[a] = c;
      ijk[b] = r;
      vmax = std::max(vmax, std::abs(values[grid.linear(ijk[0], ijk[1], ijk[2])]));
    }

  std::vector<unsigned char> px(d[a] * d[b], 0);
  for (std::size_t r = 0; r < d[b]; ++r)
    for (std::size_t c = 0; c < d[a]; ++c)
    {
      Index3 ijk{};
      ijk[axis] = slice;
      ijk[a] = c;
      ijk[b] = r;
      const double v = std::abs(values[grid.linear(ijk[0], ijk[1], ijk[2])]);
      px[r * d[a] + c] = vmax > 0.0 ? static_cast<unsigned char>(std::lround(255.0 * v / vmax)) : 0;
    }

  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
  out << "P5\n" << d[a] << ' ' << d[b] << "\n255\n";
  out.write(reinterpret_cast<const char *>(px.data()), static_cast<std::streamsize>(px.size()));
  close_checked(out, path);
}

PgmImage read_pgm(const fs::path &path)
{
  std::ifstream in = open_in(path, std::ios::in | std::ios::binary);
  std::string magic;
  PgmImage img;
  int maxval = 0;
  in >> magic >> img.width >> img.height >> maxval;
  if (!in || magic != "P5" || maxval != 255)
    throw IoError(path.string() + ": not an 8-bit P5 image");
  in.get();
  img.pixels.resize(img.width * img.height);
  in.read(reinterpret_cast<char *>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (static_cast<std::size_t>(in.gcount()) != img.pixels.size())
    throw IoError(path.string() + ": truncated pixel data");
  return img;
}

void write_json(const fs::path &path, const json &j)
{
  write_text(path, j.dump(2) + "\n");
}

void write_text(const fs::path &path, const std::string &text)
{
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
  out << text;
  close_checked(out, path);
}

} // namespace emloc
