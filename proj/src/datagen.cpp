#include "curvesub/datagen.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "curvesub/rng.hpp"
#include "json.hpp"

namespace curvesub {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kTau = 6.283185307179586476925286766559;
constexpr int kMaxDrawAttempts = 100;
constexpr double kMinControlGap = 1e-6;

double param_t(int i, int n) { return kTau * static_cast<double>(i) / n; }

// Coefficient law shared by every Fourier-style family: a_k, b_k zero-mean
// Gaussian with variance k^(-3/2), so higher harmonics fade quickly.
std::vector<double> draw_fourier_coeffs(Rng& rng, int terms) {
  std::vector<double> c(terms);
  for (int k = 1; k <= terms; ++k) {
    c[k - 1] = rng.normal() * std::pow(static_cast<double>(k), -0.75);
  }
  return c;
}

double fourier_eval(const std::vector<double>& a, const std::vector<double>& b,
                    double t) {
  double v = 0.0;
  for (size_t k = 1; k <= a.size(); ++k) {
    v += a[k - 1] * std::cos(k * t) + b[k - 1] * std::sin(k * t);
  }
  return v;
}

}  // namespace

namespace families {

std::vector<Point> ellipse(double a, double b, int n) {
  std::vector<Point> pts(n);
  for (int i = 0; i < n; ++i) {
    double t = param_t(i, n);
    pts[i] = point_e2(a * std::cos(t), b * std::sin(t));
  }
  return pts;
}

std::vector<Point> planar_fourier(const std::vector<double>& ax,
                                  const std::vector<double>& bx,
                                  const std::vector<double>& ay,
                                  const std::vector<double>& by, int n) {
  std::vector<Point> pts(n);
  for (int i = 0; i < n; ++i) {
    double t = param_t(i, n);
    pts[i] = point_e2(fourier_eval(ax, bx, t), fourier_eval(ay, by, t));
  }
  return pts;
}

std::vector<Point> superellipse(double exponent, int n) {
  double p = 2.0 / exponent;
  std::vector<Point> pts(n);
  for (int i = 0; i < n; ++i) {
    double t = param_t(i, n);
    double c = std::cos(t), s = std::sin(t);
    pts[i] = point_e2(std::copysign(std::pow(std::abs(c), p), c),
                      std::copysign(std::pow(std::abs(s), p), s));
  }
  return pts;
}

void center_and_scale_unit(std::vector<Point>& pts) {
  double mx = 0.0, my = 0.0;
  for (const Point& p : pts) {
    mx += p.c[0];
    my += p.c[1];
  }
  mx /= pts.size();
  my /= pts.size();
  double r = 0.0;
  for (Point& p : pts) {
    p.c[0] -= mx;
    p.c[1] -= my;
    r = std::max(r, std::hypot(p.c[0], p.c[1]));
  }
  if (r < 1e-9) throw DegenerateInputError("curve collapses to a point");
  for (Point& p : pts) {
    p.c[0] /= r;
    p.c[1] /= r;
  }
}

std::vector<Point> lissajous(int a, int b, int n) {
  std::vector<Point> pts(n);
  for (int i = 0; i < n; ++i) {
    double t = param_t(i, n);
    double x = std::cos(a * t);
    double y = std::cos(b * t + 0.25 * 3.141592653589793238462643383280);
    double z = std::sin(a * t) * std::sin(b * t);
    double norm = std::sqrt(x * x + y * y + z * z);
    if (norm < 1e-9) throw DegenerateInputError("lissajous point at origin");
    pts[i] = point_s2(x / norm, y / norm, z / norm);
  }
  return pts;
}

std::vector<Point> polar_fourier(const std::vector<double>& at,
                                 const std::vector<double>& bt,
                                 const std::vector<double>& ap,
                                 const std::vector<double>& bp, int n) {
  constexpr double kPi = 3.141592653589793238462643383280;
  std::vector<Point> pts(n);
  for (int i = 0; i < n; ++i) {
    double t = param_t(i, n);
    double theta =
        std::clamp(0.5 * kPi + fourier_eval(at, bt, t), 0.15, kPi - 0.15);
    double phi = t + fourier_eval(ap, bp, t);
    double st = std::sin(theta);
    pts[i] = point_s2(st * std::cos(phi), st * std::sin(phi), std::cos(theta));
  }
  return pts;
}

std::vector<Point> great_circle_wobble(double eps, int freq, int n) {
  std::vector<Point> pts(n);
  for (int i = 0; i < n; ++i) {
    double t = param_t(i, n);
    double x = std::cos(t), y = std::sin(t), z = eps * std::sin(freq * t);
    double norm = std::sqrt(x * x + y * y + z * z);
    pts[i] = point_s2(x / norm, y / norm, z / norm);
  }
  return pts;
}

std::vector<Point> fourier_disk(const std::vector<double>& ax,
                                const std::vector<double>& bx,
                                const std::vector<double>& ay,
                                const std::vector<double>& by,
                                double target_radius, int n) {
  std::vector<Point> pts = planar_fourier(ax, bx, ay, by, n);
  center_and_scale_unit(pts);
  for (Point& p : pts) {
    p.geom = Geometry::Hyperbolic;
    p.c[0] *= target_radius;
    p.c[1] *= target_radius;
  }
  return pts;
}

std::vector<Point> hyperbolic_circle(double radius, const Vec2<double>& center,
                                     int n) {
  Point c = point_h2(center.x, center.y);
  double rim = std::tanh(0.5 * radius);
  std::vector<Point> pts(n);
  for (int i = 0; i < n; ++i) {
    double t = param_t(i, n);
    pts[i] = mobius_add(c, point_h2(rim * std::cos(t), rim * std::sin(t)));
  }
  return pts;
}

std::vector<Point> offset_ellipse(double a, double b,
                                  const Vec2<double>& center, int n) {
  std::vector<Point> pts(n);
  double max_norm = 0.0;
  for (int i = 0; i < n; ++i) {
    double t = param_t(i, n);
    double x = center.x + a * std::cos(t);
    double y = center.y + b * std::sin(t);
    max_norm = std::max(max_norm, std::hypot(x, y));
    pts[i] = point_h2(x, y);
  }
  // Keep the whole curve strictly inside the disk; rescale about the origin
  // rather than clipping individual points so the shape stays an ellipse.
  if (max_norm >= 0.97) {
    double s = 0.96 / max_norm;
    for (Point& p : pts) {
      p.c[0] *= s;
      p.c[1] *= s;
    }
  }
  return pts;
}

}  // namespace families

const std::vector<std::string>& families_for(Geometry g) {
  static const std::vector<std::string> e2 = {"ellipse", "fourier3", "fourier4",
                                              "superellipse"};
  static const std::vector<std::string> s2 = {"lissajous", "polar_fourier",
                                              "great_circle"};
  static const std::vector<std::string> h2 = {"fourier_disk", "hyp_circle",
                                              "offset_ellipse"};
  switch (g) {
    case Geometry::Euclidean:
      return e2;
    case Geometry::Spherical:
      return s2;
    default:
      return h2;
  }
}

namespace {

ordered_json coeff_json(const std::vector<double>& v) { return ordered_json(v); }

// Draws the family parameters from rng (fixed order per family, so a seed
// pins the curve), builds the dense loop, and reports the draws as JSON.
std::pair<std::vector<Point>, ordered_json> draw_family(Geometry g,
                                                        const std::string& fam,
                                                        Rng& rng, int n) {
  ordered_json params;
  if (g == Geometry::Euclidean) {
    std::vector<Point> pts;
    if (fam == "ellipse") {
      double a = rng.uniform(0.6, 2.0);
      double b = rng.uniform(0.6, 2.0);
      params["a"] = a;
      params["b"] = b;
      pts = families::ellipse(a, b, n);
    } else if (fam == "fourier3" || fam == "fourier4") {
      int terms = fam == "fourier3" ? 3 : 4;
      auto ax = draw_fourier_coeffs(rng, terms);
      auto bx = draw_fourier_coeffs(rng, terms);
      auto ay = draw_fourier_coeffs(rng, terms);
      auto by = draw_fourier_coeffs(rng, terms);
      params["ax"] = coeff_json(ax);
      params["bx"] = coeff_json(bx);
      params["ay"] = coeff_json(ay);
      params["by"] = coeff_json(by);
      pts = families::planar_fourier(ax, bx, ay, by, n);
    } else if (fam == "superellipse") {
      double e = rng.uniform(2.0, 6.0);
      params["exponent"] = e;
      pts = families::superellipse(e, n);
    } else {
      throw UsageError("unknown planar family '" + fam + "'");
    }
    families::center_and_scale_unit(pts);
    return {std::move(pts), std::move(params)};
  }
  if (g == Geometry::Spherical) {
    if (fam == "lissajous") {
      int a = static_cast<int>(rng.uniform_int(2, 3));
      int b;
      do {
        b = static_cast<int>(rng.uniform_int(3, 5));
      } while (b == a);
      params["a"] = a;
      params["b"] = b;
      return {families::lissajous(a, b, n), std::move(params)};
    }
    if (fam == "polar_fourier") {
      auto at = draw_fourier_coeffs(rng, 3);
      auto bt = draw_fourier_coeffs(rng, 3);
      auto ap = draw_fourier_coeffs(rng, 3);
      auto bp = draw_fourier_coeffs(rng, 3);
      params["a_theta"] = coeff_json(at);
      params["b_theta"] = coeff_json(bt);
      params["a_phi"] = coeff_json(ap);
      params["b_phi"] = coeff_json(bp);
      return {families::polar_fourier(at, bt, ap, bp, n), std::move(params)};
    }
    if (fam == "great_circle") {
      double eps = rng.uniform(0.0, 0.3);
      int freq = static_cast<int>(rng.uniform_int(2, 4));
      params["eps"] = eps;
      params["freq"] = freq;
      return {families::great_circle_wobble(eps, freq, n), std::move(params)};
    }
    throw UsageError("unknown spherical family '" + fam + "'");
  }
  if (fam == "fourier_disk") {
    auto ax = draw_fourier_coeffs(rng, 3);
    auto bx = draw_fourier_coeffs(rng, 3);
    auto ay = draw_fourier_coeffs(rng, 3);
    auto by = draw_fourier_coeffs(rng, 3);
    double target = rng.uniform(0.35, 0.58);
    params["ax"] = coeff_json(ax);
    params["bx"] = coeff_json(bx);
    params["ay"] = coeff_json(ay);
    params["by"] = coeff_json(by);
    params["target_radius"] = target;
    return {families::fourier_disk(ax, bx, ay, by, target, n),
            std::move(params)};
  }
  if (fam == "hyp_circle") {
    double r = rng.uniform(0.3, 0.6);
    double ang = rng.uniform(0.0, kTau);
    double cn = rng.uniform(0.0, 0.25);
    Vec2<double> c{cn * std::cos(ang), cn * std::sin(ang)};
    params["r"] = r;
    params["cx"] = c.x;
    params["cy"] = c.y;
    return {families::hyperbolic_circle(r, c, n), std::move(params)};
  }
  if (fam == "offset_ellipse") {
    double a = rng.uniform(0.15, 0.45);
    double b = rng.uniform(0.15, 0.45);
    double ang = rng.uniform(0.0, kTau);
    double cn = rng.uniform(0.0, 0.25);
    Vec2<double> c{cn * std::cos(ang), cn * std::sin(ang)};
    params["a"] = a;
    params["b"] = b;
    params["cx"] = c.x;
    params["cy"] = c.y;
    return {families::offset_ellipse(a, b, c, n), std::move(params)};
  }
  throw UsageError("unknown hyperbolic family '" + fam + "'");
}

double min_pairwise_gap(const ClosedPolygon& poly) {
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < poly.size(); ++i) {
    for (size_t j = i + 1; j < poly.size(); ++j) {
      best = std::min(best, geodesic_distance(poly.pts[i], poly.pts[j]));
    }
  }
  return best;
}

}  // namespace

CurveSample gen_curve(Geometry g, const std::string& family, uint64_t seed,
                      const DataGenConfig& cfg) {
  const auto& fams = families_for(g);
  if (std::find(fams.begin(), fams.end(), family) == fams.end()) {
    throw UsageError("family '" + family + "' is not defined for geometry " +
                     to_string(g));
  }
  for (int attempt = 0; attempt < kMaxDrawAttempts; ++attempt) {
    Rng rng(derive_seed(seed, "attempt", attempt));
    try {
      auto [gt, params] = draw_family(g, family, rng, cfg.n_ground_truth);
      for (const Point& p : gt) validate_point(p);
      ClosedPolygon control = arclength_sample(gt, cfg.n_control, g);
      if (min_pairwise_gap(control) <= kMinControlGap) continue;
      validate_polygon(control);
      params["attempt"] = attempt;
      CurveSample s;
      s.family = family;
      s.seed = seed;
      s.params = params.dump();
      s.control = std::move(control);
      s.ground_truth = std::move(gt);
      return s;
    } catch (const DegenerateInputError&) {
      continue;
    } catch (const DomainError&) {
      continue;
    }
  }
  throw DegenerateInputError("no usable draw for family '" + family +
                             "' after " + std::to_string(kMaxDrawAttempts) +
                             " attempts");
}

std::vector<size_t> arclength_indices(const std::vector<Point>& loop, int n,
                                      Geometry g) {
  (void)g;
  if (n < 4) throw UsageError("need at least 4 control points");
  size_t m = loop.size();
  if (m < static_cast<size_t>(n)) {
    throw UsageError("dense loop has fewer points than requested controls");
  }
  // Positions along the loop; cum[m] is the total length and includes the
  // segment that closes the loop back to the first point.
  std::vector<double> cum(m + 1, 0.0);
  for (size_t i = 0; i < m; ++i) {
    cum[i + 1] = cum[i] + geodesic_distance(loop[i], loop[(i + 1) % m]);
  }
  double total = cum[m];
  if (!(total > 0.0)) throw DegenerateInputError("loop has zero length");

  std::vector<size_t> idx(n);
  size_t j = 0;
  for (int i = 0; i < n; ++i) {
    double target = total * static_cast<double>(i) / n;
    while (j < m &&
           std::abs(cum[j + 1] - target) < std::abs(cum[j] - target)) {
      ++j;
    }
    idx[i] = j % m;  // position total wraps to the first point
  }
  return idx;
}

ClosedPolygon arclength_sample(const std::vector<Point>& loop, int n,
                               Geometry g) {
  std::vector<size_t> idx = arclength_indices(loop, n, g);
  ClosedPolygon poly;
  poly.geom = g;
  poly.pts.reserve(idx.size());
  for (size_t k : idx) poly.pts.push_back(loop[k]);
  return poly;
}

Dataset build_dataset(uint64_t seed, const DataGenConfig& cfg) {
  if (cfg.curves_per_geometry < 1 || cfg.n_control < 4 ||
      cfg.n_ground_truth < cfg.n_control || cfg.val_fraction < 0.0 ||
      cfg.val_fraction > 1.0) {
    throw ConfigError("invalid dataset generation settings");
  }
  Dataset ds;
  for (size_t gi = 0; gi < kAllGeometries.size(); ++gi) {
    Geometry g = kAllGeometries[gi];
    const auto& fams = families_for(g);
    std::vector<CurveSample> all;
    all.reserve(cfg.curves_per_geometry);
    for (int i = 0; i < cfg.curves_per_geometry; ++i) {
      uint64_t cseed = derive_seed(seed, "curve", gi, i);
      CurveSample s = gen_curve(g, fams[i % fams.size()], cseed, cfg);
      char suffix[16];
      std::snprintf(suffix, sizeof suffix, "%04d", i);
      s.id = std::string(to_string(g)) + "_" + suffix;
      all.push_back(std::move(s));
    }
    // Stratified split: shuffle within the geometry, first chunk goes to val.
    std::vector<size_t> order(all.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng split_rng(derive_seed(seed, "split", gi));
    for (size_t i = order.size() - 1; i > 0; --i) {
      size_t k = static_cast<size_t>(split_rng.uniform_int(0, i));
      std::swap(order[i], order[k]);
    }
    size_t n_val = static_cast<size_t>(
        std::lround(cfg.val_fraction * cfg.curves_per_geometry));
    n_val = std::min(n_val, all.size());
    for (size_t r = 0; r < order.size(); ++r) {
      auto& dst = r < n_val ? ds.val : ds.train;
      dst.push_back(std::move(all[order[r]]));
    }
  }
  auto by_id = [](const CurveSample& a, const CurveSample& b) {
    return a.id < b.id;
  };
  std::sort(ds.train.begin(), ds.train.end(), by_id);
  std::sort(ds.val.begin(), ds.val.end(), by_id);
  return ds;
}

namespace {

std::string hex_bits(double v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(std::bit_cast<uint64_t>(v)));
  return buf;
}

double bits_from_hex(const std::string& s) {
  if (s.size() != 16) throw IoError("bad coordinate hex '" + s + "'");
  uint64_t u = 0;
  for (char ch : s) {
    int d;
    if (ch >= '0' && ch <= '9') d = ch - '0';
    else if (ch >= 'a' && ch <= 'f') d = ch - 'a' + 10;
    else if (ch >= 'A' && ch <= 'F') d = ch - 'A' + 10;
    else throw IoError("bad coordinate hex '" + s + "'");
    u = (u << 4) | static_cast<uint64_t>(d);
  }
  return std::bit_cast<double>(u);
}

ordered_json points_line(const char* kind, const std::vector<Point>& pts,
                         Geometry g) {
  int dim = ambient_dim(g);
  ordered_json hex = ordered_json::array();
  ordered_json dec = ordered_json::array();
  for (const Point& p : pts) {
    ordered_json ph = ordered_json::array();
    ordered_json pd = ordered_json::array();
    for (int d = 0; d < dim; ++d) {
      ph.push_back(hex_bits(p.c[d]));
      pd.push_back(p.c[d]);
    }
    hex.push_back(std::move(ph));
    dec.push_back(std::move(pd));
  }
  ordered_json line;
  line["kind"] = kind;
  line["coords_hex"] = std::move(hex);
  line["coords"] = std::move(dec);
  return line;
}

std::vector<Point> points_from_line(const ordered_json& line, Geometry g,
                                    const std::string& where) {
  if (!line.contains("coords_hex") || !line["coords_hex"].is_array()) {
    throw IoError("missing coords_hex in " + where);
  }
  int dim = ambient_dim(g);
  std::vector<Point> pts;
  pts.reserve(line["coords_hex"].size());
  for (const auto& ph : line["coords_hex"]) {
    if (!ph.is_array() || ph.size() != static_cast<size_t>(dim)) {
      throw IoError("bad coordinate arity in " + where);
    }
    Point p;
    p.geom = g;
    for (int d = 0; d < dim; ++d) {
      p.c[d] = bits_from_hex(ph[d].get<std::string>());
    }
    pts.push_back(p);
  }
  return pts;
}

void write_sample(const std::filesystem::path& dir, const char* split,
                  const CurveSample& s) {
  namespace fs = std::filesystem;
  fs::path sub = dir / split / to_string(s.geometry());
  fs::create_directories(sub);
  fs::path file = sub / (s.id + ".jsonl");
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  ordered_json header;
  header["id"] = s.id;
  header["geometry"] = to_string(s.geometry());
  header["family"] = s.family;
  header["seed"] = s.seed;
  header["params"] = ordered_json::parse(s.params.empty() ? "{}" : s.params);
  out << header.dump() << '\n';
  out << points_line("control", s.control.pts, s.geometry()).dump() << '\n';
  out << points_line("ground_truth", s.ground_truth, s.geometry()).dump()
      << '\n';
  if (!out) throw IoError("write failed for " + file.string());
}

CurveSample read_sample(const std::filesystem::path& file, Geometry g) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read " + file.string());
  std::string where = file.string();
  auto next_line = [&](const char* what) {
    std::string text;
    if (!std::getline(in, text)) {
      throw IoError(std::string("missing ") + what + " line in " + where);
    }
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) {
      throw IoError(std::string("bad JSON on ") + what + " line in " + where);
    }
    return j;
  };
  ordered_json header = next_line("header");
  CurveSample s;
  s.id = header.value("id", "");
  s.family = header.value("family", "");
  s.seed = header.value("seed", uint64_t{0});
  s.params = header.contains("params") ? header["params"].dump() : "{}";
  ordered_json control = next_line("control");
  ordered_json gt = next_line("ground_truth");
  s.control.geom = g;
  s.control.pts = points_from_line(control, g, where);
  s.ground_truth = points_from_line(gt, g, where);
  for (const Point& p : s.ground_truth) validate_point(p);
  validate_polygon(s.control);
  return s;
}

}  // namespace

void save_dataset(const Dataset& ds, uint64_t seed, const DataGenConfig& cfg,
                  const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  ordered_json manifest;
  manifest["format"] = "curvesub-dataset-v1";
  manifest["seed"] = seed;
  manifest["curves_per_geometry"] = cfg.curves_per_geometry;
  manifest["n_control"] = cfg.n_control;
  manifest["n_ground_truth"] = cfg.n_ground_truth;
  manifest["val_fraction"] = cfg.val_fraction;
  ordered_json fams;
  ordered_json counts;
  for (Geometry g : kAllGeometries) {
    fams[to_string(g)] = families_for(g);
    ordered_json c;
    c["train"] = count_geometry(ds.train, g);
    c["val"] = count_geometry(ds.val, g);
    counts[to_string(g)] = std::move(c);
  }
  manifest["families"] = std::move(fams);
  manifest["counts"] = std::move(counts);

  std::vector<std::pair<const CurveSample*, const char*>> rows;
  for (const CurveSample& s : ds.train) rows.emplace_back(&s, "train");
  for (const CurveSample& s : ds.val) rows.emplace_back(&s, "val");
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.first->id < b.first->id;
  });
  ordered_json samples = ordered_json::array();
  for (const auto& [s, split] : rows) {
    ordered_json row;
    row["id"] = s->id;
    row["geometry"] = to_string(s->geometry());
    row["family"] = s->family;
    row["seed"] = s->seed;
    row["split"] = split;
    samples.push_back(std::move(row));
  }
  manifest["samples"] = std::move(samples);
  manifest["notes"] = ordered_json::array(
      {"family mixture is uniform: families are cycled in manifest order",
       "fourier coefficients a_k, b_k are N(0, k^-3/2) per harmonic",
       "planar curves are mean-centred and scaled to unit max radius",
       "polar_fourier applies the planar coefficient law to (theta, phi)",
       "lissajous frequencies: a in {2,3}, b in {3,4,5}, a != b",
       "superellipse exponent is Uniform(2,6), sampled continuously",
       "coords_hex holds binary64 bit patterns; coords is a decimal mirror"});

  fs::path mf = dir / "manifest.json";
  std::ofstream out(mf);
  if (!out) throw IoError("cannot write " + mf.string());
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + mf.string());

  for (const auto& [s, split] : rows) write_sample(dir, split, *s);
}

Dataset load_dataset(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::path mf = dir / "manifest.json";
  std::ifstream in(mf);
  if (!in) throw IoError("cannot read " + mf.string());
  ordered_json manifest = ordered_json::parse(in, nullptr, false);
  if (manifest.is_discarded() || !manifest.contains("samples")) {
    throw IoError("bad manifest " + mf.string());
  }
  Dataset ds;
  for (const auto& row : manifest["samples"]) {
    std::string id = row.value("id", "");
    std::string split = row.value("split", "");
    Geometry g = parse_geometry(row.value("geometry", ""));
    if (split != "train" && split != "val") {
      throw IoError("bad split for sample '" + id + "' in " + mf.string());
    }
    fs::path file = dir / split / to_string(g) / (id + ".jsonl");
    CurveSample s = read_sample(file, g);
    if (s.id != id) {
      throw IoError("id mismatch in " + file.string());
    }
    (split == "train" ? ds.train : ds.val).push_back(std::move(s));
  }
  return ds;
}

}  // namespace curvesub
