// SPDX-License-Identifier: Apache-2.0

#include "emloc/scenario.hpp"

#include <fstream>
#include <stdexcept>

namespace emloc
{

using nlohmann::json;

namespace
{

RVec3 vec_from(const json &j, const char *what)
{
  if (!j.is_array() || j.size() != 3)
    throw std::invalid_argument(std::string("scenario: '") + what + "' must be an array of 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec_to(const RVec3 &v) { return json::array({v[0], v[1], v[2]}); }

template <typename T>
T value_or(const json &j, const char *key, T fallback)
{
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

BlobPattern pattern_from(const std::string &s)
{
  if (s == "uniform")
    return BlobPattern::uniform;
  if (s == "swirl")
    return BlobPattern::swirl;
  throw std::invalid_argument("scenario: unknown blob pattern '" + s + "'");
}

} // namespace

FrequencySet Scenario::freqs() const
{
  if (!frequencies.omegas.empty())
    return FrequencySet(frequencies.omegas);
  return FrequencySet::band(medium(), frequencies.kappa_min, frequencies.kappa_max, frequencies.count);
}

RealField Scenario::source_on(const VoxelGrid &g) const
{
  RealField total(g);
  for (const auto &s : sources)
  {
    switch (s.kind)
    {
    case SourceSpec::Kind::ball:
      total += make_ball_source(g, s.center, s.radius, s.moment);
      break;
    case SourceSpec::Kind::blob:
      total += make_blob_source(g, s.center, s.radius, s.moment, s.pattern);
      break;
    case SourceSpec::Kind::dipole:
      total += make_point_source(g, s.center, s.moment);
      break;
    }
  }
  return total;
}

void Scenario::validate() const
{
  const Medium med = medium();
  const VoxelGrid g = voxel_grid();
  if (forward_refinement < 1)
    throw std::invalid_argument("scenario: forward_refinement must be >= 1");
  if (sources.empty())
    throw std::invalid_argument("scenario: at least one source is required");
  // Rasterizing checks that every source lies inside the grid box.
  (void)source_on(g);
  (void)source_on(forward_grid());
  const SurfaceMesh m = mesh();
  if (!(norm(g.box_center() - surface.center) + g.circumradius() < surface.radius))
    throw GeometryError("scenario: grid is not strictly inside the measurement sphere");
  const FrequencySet f = freqs();
  if (f.size() < 1)
    throw std::invalid_argument("scenario: need at least one frequency");
  inversion.fista.validate();
  if (!(noise.level >= 0.0))
    throw std::invalid_argument("scenario: noise level must be >= 0");
  if (imaging.slice_axis < 0 || imaging.slice_axis > 2)
    throw std::invalid_argument("scenario: slice_axis must be 0, 1 or 2");
  (void)med;
  (void)m;
}

Scenario scenario_from_json(const json &j)
{
  Scenario s;
  if (j.contains("schema") && j.at("schema").get<std::string>() != "emloc.scenario/1")
    throw std::invalid_argument("scenario: unsupported schema '" + j.at("schema").get<std::string>() + "'");

  if (j.contains("medium"))
  {
    s.epsilon0 = value_or(j.at("medium"), "epsilon0", 1.0);
    s.mu0 = value_or(j.at("medium"), "mu0", 1.0);
  }

  const json &g = j.at("grid");
  s.grid.origin = vec_from(g.at("origin"), "grid.origin");
  s.grid.spacing = g.at("spacing").get<double>();
  const json &d = g.at("dims");
  if (!d.is_array() || d.size() != 3)
    throw std::invalid_argument("scenario: 'grid.dims' must be an array of 3 integers");
  s.grid.dims = {d[0].get<std::size_t>(), d[1].get<std::size_t>(), d[2].get<std::size_t>()};
  s.forward_refinement = value_or<std::size_t>(j, "forward_refinement", 1);

  const json &sf = j.at("surface");
  s.surface.center = sf.contains("center") ? vec_from(sf.at("center"), "surface.center") : RVec3{};
  s.surface.radius = sf.at("radius").get<double>();
  s.surface.n_points = sf.at("n_points").get<std::size_t>();

  for (const json &src : j.at("sources"))
  {
    SourceSpec spec;
    const auto type = src.at("type").get<std::string>();
    if (type == "ball")
      spec.kind = SourceSpec::Kind::ball;
    else if (type == "blob")
      spec.kind = SourceSpec::Kind::blob;
    else if (type == "dipole")
      spec.kind = SourceSpec::Kind::dipole;
    else
      throw std::invalid_argument("scenario: unknown source type '" + type + "'");
    spec.center = vec_from(src.contains("center") ? src.at("center") : src.at("position"), "source.center");
    spec.moment = vec_from(src.at("moment"), "source.moment");
    if (spec.kind != SourceSpec::Kind::dipole)
      spec.radius = src.at("radius").get<double>();
    if (spec.kind == SourceSpec::Kind::blob)
      spec.pattern = pattern_from(value_or<std::string>(src, "pattern", "uniform"));
    s.sources.push_back(spec);
  }

  const json &fq = j.at("frequencies");
  if (fq.contains("omegas"))
  {
    s.frequencies.omegas = fq.at("omegas").get<std::vector<double>>();
  }
  else
  {
    const json &band = fq.at("band");
    s.frequencies.kappa_min = band.at("kappa_min").get<double>();
    s.frequencies.kappa_max = band.at("kappa_max").get<double>();
    s.frequencies.count = band.at("count").get<std::size_t>();
  }

  if (j.contains("noise"))
  {
    s.noise.level = value_or(j.at("noise"), "level", 0.0);
    s.noise.seed = value_or<std::uint64_t>(j.at("noise"), "seed", 0);
  }

  if (j.contains("inversion"))
  {
    const json &inv = j.at("inversion");
    FistaConfig &c = s.inversion.fista;
    c.lambda = value_or(inv, "lambda", c.lambda);
    c.gamma0 = value_or(inv, "gamma0", c.gamma0);
    c.eta = value_or(inv, "eta", c.eta);
    c.max_iters = value_or(inv, "max_iters", c.max_iters);
    c.rel_tol = value_or(inv, "rel_tol", c.rel_tol);
    const auto mom = value_or<std::string>(inv, "momentum", "beck_teboulle");
    if (mom == "beck_teboulle")
      c.momentum = Momentum::beck_teboulle;
    else if (mom == "paper")
      c.momentum = Momentum::paper;
    else
      throw std::invalid_argument("scenario: unknown momentum variant '" + mom + "'");
    const auto sp = value_or<std::string>(inv, "sparsity", "componentwise");
    if (sp == "componentwise")
      c.sparsity = Sparsity::componentwise;
    else if (sp == "group")
      c.sparsity = Sparsity::group;
    else
      throw std::invalid_argument("scenario: unknown sparsity variant '" + sp + "'");
    const auto ig = value_or<std::string>(inv, "initial_guess", "zero");
    if (ig == "zero")
      s.inversion.initial_guess = InitialGuess::zero;
    else if (ig == "mean_image")
      s.inversion.initial_guess = InitialGuess::mean_image;
    else
      throw std::invalid_argument("scenario: unknown initial_guess '" + ig + "'");
    const auto kp = value_or<std::string>(inv, "kernel", "direct");
    if (kp == "direct")
      s.inversion.kernel = KernelPath::direct;
    else if (kp == "fft")
      s.inversion.kernel = KernelPath::fft;
    else
      throw std::invalid_argument("scenario: unknown kernel path '" + kp + "'");
  }

  if (j.contains("imaging"))
  {
    const json &im = j.at("imaging");
    s.imaging.broadband = value_or(im, "broadband", false);
    const auto axis = value_or<std::string>(im, "slice_axis", "z");
    if (axis == "x")
      s.imaging.slice_axis = 0;
    else if (axis == "y")
      s.imaging.slice_axis = 1;
    else if (axis == "z")
      s.imaging.slice_axis = 2;
    else
      throw std::invalid_argument("scenario: slice_axis must be x, y or z");
    s.imaging.slice_index = value_or<long>(im, "slice_index", -1);
  }

  s.output_dir = value_or<std::string>(j, "output_dir", "out");
  return s;
}

json scenario_to_json(const Scenario &s)
{
  json j;
  j["schema"] = "emloc.scenario/1";
  j["medium"] = {{"epsilon0", s.epsilon0}, {"mu0", s.mu0}};
  j["grid"] = {{"origin", vec_to(s.grid.origin)},
               {"spacing", s.grid.spacing},
               {"dims", json::array({s.grid.dims[0], s.grid.dims[1], s.grid.dims[2]})}};
  j["forward_refinement"] = s.forward_refinement;
  j["surface"] = {{"center", vec_to(s.surface.center)}, {"radius", s.surface.radius}, {"n_points", s.surface.n_points}};
  json srcs = json::array();
  for (const auto &src : s.sources)
  {
    json o;
    switch (src.kind)
    {
    case SourceSpec::Kind::ball:
      o["type"] = "ball";
      break;
    case SourceSpec::Kind::blob:
      o["type"] = "blob";
      o["pattern"] = src.pattern == BlobPattern::uniform ? "uniform" : "swirl";
      break;
    case SourceSpec::Kind::dipole:
      o["type"] = "dipole";
      break;
    }
    o["center"] = vec_to(src.center);
    if (src.kind != SourceSpec::Kind::dipole)
      o["radius"] = src.radius;
    o["moment"] = vec_to(src.moment);
    srcs.push_back(o);
  }
  j["sources"] = srcs;
  if (!s.frequencies.omegas.empty())
    j["frequencies"] = {{"omegas", s.frequencies.omegas}};
  else
    j["frequencies"] = {{"band",
                         {{"kappa_min", s.frequencies.kappa_min},
                          {"kappa_max", s.frequencies.kappa_max},
                          {"count", s.frequencies.count}}}};
  j["noise"] = {{"level", s.noise.level}, {"seed", s.noise.seed}};
  const FistaConfig &c = s.inversion.fista;
  j["inversion"] = {{"lambda", c.lambda},
                    {"gamma0", c.gamma0},
                    {"eta", c.eta},
                    {"max_iters", c.max_iters},
                    {"rel_tol", c.rel_tol},
                    {"momentum", c.momentum == Momentum::beck_teboulle ? "beck_teboulle" : "paper"},
                    {"sparsity", c.sparsity == Sparsity::componentwise ? "componentwise" : "group"},
                    {"initial_guess", s.inversion.initial_guess == InitialGuess::zero ? "zero" : "mean_image"},
                    {"kernel", s.inversion.kernel == KernelPath::direct ? "direct" : "fft"}};
  static const char *axes[] = {"x", "y", "z"};
  j["imaging"] = {{"broadband", s.imaging.broadband},
                  {"slice_axis", axes[s.imaging.slice_axis]},
                  {"slice_index", s.imaging.slice_index}};
  j["output_dir"] = s.output_dir;
  return j;
}

Scenario load_scenario(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open scenario file " + path.string());
  json j;
  try
  {
    in >> j;
  }
  catch (const json::parse_error &e)
  {
    throw std::invalid_argument("scenario " + path.string() + ": " + e.what());
  }
  Scenario s;
  try
  {
    s = scenario_from_json(j);
  }
  catch (const json::exception &e)
  {
    throw std::invalid_argument("scenario " + path.string() + ": " + e.what());
  }
  s.validate();
  return s;
}

} // namespace emloc
