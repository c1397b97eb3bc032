#include "bvdeg/adjugate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "bvdeg/errors.hpp"
#include "bvdeg/logging.hpp"
#include "bvdeg/parallel.hpp"

namespace bvdeg {
namespace {

using Mat3 = std::array<double, 9>;

double abs_minor(const Mat3& m, int r, int c) {
  int rows[2], cols[2];
  for (int i = 0, n = 0; i < 3; ++i)
    if (i != r) rows[n++] = i;
  for (int i = 0, n = 0; i < 3; ++i)
    if (i != c) cols[n++] = i;
  return std::abs(m[rows[0] * 3 + cols[0]] * m[rows[1] * 3 + cols[1]] -
                  m[rows[0] * 3 + cols[1]] * m[rows[1] * 3 + cols[0]]);
}

// Adds |minor(row j, col k)| * w to entries[k][j].
void accumulate_minors(const Mat3& m, double w, std::array<std::array<double, 3>, 3>& entries) {
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j) entries[k][j] += abs_minor(m, j, k) * w;
}

void require_3d(const SampledMap& f) {
  if (f.dim_in() != 3 || f.dim_out() != 3) throw RangeError("a map from a 3D grid into R^3 is required");
}

PlanarRegion slice_region(const SampledMap& slice, int resolution) {
  const Grid& g = slice.grid();
  return PlanarRegion::rect({g.origin[0], g.origin[1]}, {g.extent(0), g.extent(1)}, resolution);
}

struct SliceResult {
  std::array<double, 3> adj{0.0, 0.0, 0.0};   // per dropped output j
  std::array<double, 3> v{0.0, 0.0, 0.0};     // area variation per j (mu)
  bool ok = false;
  std::string reason;
};

enum class SliceWork { Adjugate, Area };

SliceResult analyse_slice(const SampledMap& f, int k, double t, const AdjugateConfig& cfg, SliceWork work) {
  SliceResult out;
  const auto slice = restrict_slice(f, k, t);
  const auto region = slice_region(slice, 256);
  const auto grid = DyadicGrid::covering(region);
  const JacobianOptions opts{cfg.raster, cfg.cell_boundary_resolution};
  for (int j = 1; j <= 3; ++j) {
    const auto g = planar_map(coordinate_pair(slice, j));
    const auto jj = static_cast<std::size_t>(j - 1);
    if (work == SliceWork::Adjugate) {
      out.adj[jj] = total_variation(jacobian_measure(g, region, grid, cfg.depth, opts));
    } else {
      out.v[jj] = area_variation(g, region, grid, cfg.depth, opts).sup_v;
    }
  }
  out.ok = true;
  return out;
}

// Runs every (k, t) slice with one retry at t +- step/4.
std::vector<SliceResult> sweep(const SampledMap& f, const AdjugateConfig& cfg, SliceWork work,
                               std::array<std::vector<double>, 3>& ts) {
  if (cfg.n_slices < 8) throw RangeError("at least 8 slices are required");
  if (cfg.depth < 0 || cfg.raster < 1) throw RangeError("invalid dyadic depth or raster");
  const Grid& g = f.grid();
  const auto n = static_cast<std::size_t>(cfg.n_slices);
  for (int k = 0; k < 3; ++k) {
    ts[k].resize(n);
    const double step = g.extent(k) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) ts[k][i] = g.origin[k] + (static_cast<double>(i) + 0.5) * step;
  }
  std::vector<SliceResult> results(3 * n);
  parallel_for(3 * n, [&](std::size_t unit) {
    const int k = static_cast<int>(unit / n);
    const std::size_t i = unit % n;
    const double quarter = 0.25 * g.extent(k) / static_cast<double>(n);
    const double attempts[3] = {ts[k][i], ts[k][i] + quarter, ts[k][i] - quarter};
    std::string reason;
    for (double t : attempts) {
      try {
        results[unit] = analyse_slice(f, k + 1, t, cfg, work);
        return;
      } catch (const Error& e) {
        reason = e.what();
      }
    }
    results[unit].reason = reason;
  });
  return results;
}

// Midpoint rule over the successful slices of one axis.
double integrate(const std::vector<double>& masses, const std::vector<char>& ok, double extent) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (!ok[i]) continue;
    sum += masses[i];
    ++count;
  }
  return count == 0 ? 0.0 : sum * extent / static_cast<double>(count);
}

std::string skip_note(int k, double t, const std::string& reason) {
  std::ostringstream msg;
  msg << "k=" << k << " t=" << t << ": " << reason;
  return msg.str();
}

nlohmann::json matrix_json(const std::array<std::array<double, 3>, 3>& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : m) rows.push_back({r[0], r[1], r[2]});
  return rows;
}

}  // namespace

nlohmann::json AdjugateConfig::to_json() const {
  return {{"slices", n_slices},
          {"depth", depth},
          {"raster", raster},
          {"cell_boundary_resolution", cell_boundary_resolution},
          {"injectivity_samples", injectivity_samples},
          {"seed", seed}};
}

nlohmann::json AdjugateTable::to_json() const {
  std::array<std::array<double, 3>, 3> m{};
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j) m[k][j] = entries[k][j].integrated;
  return {{"entries", matrix_json(m)},
          {"total", total},
          {"norm", "sum of per-entry total variations"},
          {"skipped", skipped}};
}

nlohmann::json MuMeasure::to_json() const {
  return {{"per_axis", per_axis}, {"per_axis_lower", per_axis_lower}, {"total", total}, {"skipped", skipped}};
}

nlohmann::json PushforwardTrend::to_json() const {
  return {{"resolutions", resolutions}, {"fractions", fractions}, {"slope", slope}, {"heuristic", true}};
}

void check_injective_samples(const SampledMap& f, std::size_t samples, std::uint64_t seed) {
  const Grid& g = f.grid();
  const int m = f.dim_out();
  std::vector<std::size_t> picks;
  if (samples >= g.size()) {
    picks.resize(g.size());
    std::iota(picks.begin(), picks.end(), 0);
  } else {
    std::mt19937_64 rng(seed);
    picks.resize(samples);
    for (auto& p : picks) p = static_cast<std::size_t>(rng() % g.size());
    std::sort(picks.begin(), picks.end());
    picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
  }
  double diam2 = 0.0;
  std::array<double, 3> lo{}, hi{};
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (std::size_t p : picks)
    for (int c = 0; c < m; ++c) {
      lo[c] = std::min(lo[c], f.value(p, c));
      hi[c] = std::max(hi[c], f.value(p, c));
    }
  for (int c = 0; c < m; ++c) diam2 += (hi[c] - lo[c]) * (hi[c] - lo[c]);
  const double tol = 1e-12 * std::sqrt(diam2);
  std::sort(picks.begin(), picks.end(), [&](std::size_t a, std::size_t b) {
    for (int c = 0; c < m; ++c) {
      if (f.value(a, c) != f.value(b, c)) return f.value(a, c) < f.value(b, c);
    }
    return a < b;
  });
  for (std::size_t i = 0; i < picks.size(); ++i) {
    for (std::size_t j = i + 1; j < picks.size() && f.value(picks[j], 0) - f.value(picks[i], 0) <= tol; ++j) {
      double d2 = 0.0;
      for (int c = 0; c < m; ++c) {
        const double d = f.value(picks[j], c) - f.value(picks[i], c);
        d2 += d * d;
      }
      if (std::sqrt(d2) <= tol) {
        std::ostringstream msg;
        msg << "samples " << picks[i] << " and " << picks[j] << " have the same image";
        throw NonInjective(msg.str());
      }
    }
  }
}

AdjugateTable distributional_adjugate(const SampledMap& f, const AdjugateConfig& config) {
  require_3d(f);
  check_injective_samples(f, config.injectivity_samples, config.seed);
  AdjugateTable table;
  const auto results = sweep(f, config, SliceWork::Adjugate, table.slice_ts);
  const auto n = static_cast<std::size_t>(config.n_slices);
  for (int k = 0; k < 3; ++k) {
    std::vector<char> ok(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& r = results[static_cast<std::size_t>(k) * n + i];
      ok[i] = r.ok;
      if (!r.ok) table.skipped.push_back(skip_note(k + 1, table.slice_ts[k][i], r.reason));
    }
    for (int j = 0; j < 3; ++j) {
      auto& entry = table.entries[k][j];
      entry.slice_masses.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        entry.slice_masses[i] = results[static_cast<std::size_t>(k) * n + i].adj[static_cast<std::size_t>(j)];
      }
      entry.integrated = integrate(entry.slice_masses, ok, f.grid().extent(k));
      table.total += entry.integrated;
    }
  }
  for (const auto& s : table.skipped) log::info("adjugate slice skipped: " + s);
  return table;
}

MuMeasure mu_measure(const SampledMap& f, const AdjugateConfig& config) {
  require_3d(f);
  MuMeasure mu;
  std::array<std::vector<double>, 3> ts;
  const auto results = sweep(f, config, SliceWork::Area, ts);
  const auto n = static_cast<std::size_t>(config.n_slices);
  for (int k = 0; k < 3; ++k) {
    std::vector<char> ok(n);
    std::vector<double> upper(n), lower(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& r = results[static_cast<std::size_t>(k) * n + i];
      ok[i] = r.ok;
      upper[i] = r.v[0] + r.v[1] + r.v[2];
      lower[i] = std::max({r.v[0], r.v[1], r.v[2]});
      if (!r.ok) mu.skipped.push_back(skip_note(k + 1, ts[k][i], r.reason));
    }
    mu.per_axis[k] = integrate(upper, ok, f.grid().extent(k));
    mu.per_axis_lower[k] = integrate(lower, ok, f.grid().extent(k));
    mu.total += mu.per_axis[k];
  }
  return mu;
}

PointwiseAdjugate pointwise_adjugate(const SampledMap& f) {
  require_3d(f);
  const Grid& g = f.grid();
  std::vector<std::array<std::array<double, 3>, 3>> slabs(g.shape[0]);
  parallel_for(g.shape[0], [&](std::size_t i0) {
    std::array<std::array<double, 3>, 3> acc{};
    for (std::size_t i1 = 0; i1 < g.shape[1]; ++i1) {
      for (std::size_t i2 = 0; i2 < g.shape[2]; ++i2) {
        const std::array<std::size_t, 3> idx{i0, i1, i2};
        Mat3 m{};
        double w = 1.0;
        for (int d = 0; d < 3; ++d) {
          w *= dual_weight(idx[d], g.shape[d], g.spacing[d]);
          std::array<std::size_t, 3> a = idx, b = idx;
          if (idx[d] > 0) --a[d];
          if (idx[d] + 1 < g.shape[d]) ++b[d];
          const double span = static_cast<double>(b[d] - a[d]) * g.spacing[d];
          const std::size_t fa = g.index(a[0], a[1], a[2]);
          const std::size_t fb = g.index(b[0], b[1], b[2]);
          for (int r = 0; r < 3; ++r) m[r * 3 + d] = (f.value(fb, r) - f.value(fa, r)) / span;
        }
        accumulate_minors(m, w, acc);
      }
    }
    slabs[i0] = acc;
  });
  PointwiseAdjugate out;
  for (const auto& s : slabs)
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j) out.entries[k][j] += s[k][j];
  for (const auto& row : out.entries)
    for (double v : row) out.total += v;
  return out;
}

PointwiseAdjugate pointwise_adjugate(const DerivativeFn& derivative, const std::array<double, 3>& lo,
                                     const std::array<double, 3>& hi, std::size_t n) {
  if (!derivative) throw RangeError("no derivative given");
  if (n < 1) throw RangeError("need at least one quadrature point per axis");
  std::array<double, 3> h{};
  for (int d = 0; d < 3; ++d) h[d] = (hi[d] - lo[d]) / static_cast<double>(n);
  const double w = h[0] * h[1] * h[2];
  std::vector<std::array<std::array<double, 3>, 3>> slabs(n);
  parallel_for(n, [&](std::size_t a) {
    std::array<std::array<double, 3>, 3> acc{};
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        const double x[3] = {lo[0] + (static_cast<double>(a) + 0.5) * h[0], lo[1] + (static_cast<double>(b) + 0.5) * h[1],
                             lo[2] + (static_cast<double>(c) + 0.5) * h[2]};
        accumulate_minors(derivative(x), w, acc);
      }
    }
    slabs[a] = acc;
  });
  PointwiseAdjugate out;
  for (const auto& s : slabs)
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j) out.entries[k][j] += s[k][j];
  for (const auto& row : out.entries)
    for (double v : row) out.total += v;
  return out;
}

CellMeasure cell_adjugate_measure(const SampledMap& f) {
  require_3d(f);
  const Grid& g = f.grid();
  Grid cells = g;
  for (int d = 0; d < 3; ++d) {
    cells.shape[d] = g.shape[d] - 1;
    cells.origin[d] = g.origin[d] + 0.5 * g.spacing[d];
  }
  const double volume = g.spacing[0] * g.spacing[1] * g.spacing[2];
  std::vector<double> weights(cells.size());
  parallel_for(cells.shape[0], [&](std::size_t i0) {
    for (std::size_t i1 = 0; i1 < cells.shape[1]; ++i1) {
      for (std::size_t i2 = 0; i2 < cells.shape[2]; ++i2) {
        Mat3 m{};
        for (int d = 0; d < 3; ++d) {
          // mean of the four edge differences along d
          for (int corner = 0; corner < 8; ++corner) {
            if ((corner >> d) & 1) continue;
            const std::size_t lo = g.index(i0 + (corner & 1), i1 + ((corner >> 1) & 1), i2 + ((corner >> 2) & 1));
            for (int r = 0; r < 3; ++r) {
              m[r * 3 + d] += 0.25 * (f.value(lo + g.stride(d), r) - f.value(lo, r)) / g.spacing[d];
            }
          }
        }
        std::array<std::array<double, 3>, 3> e{};
        accumulate_minors(m, volume, e);
        double s = 0.0;
        for (const auto& row : e)
          for (double v : row) s += v;
        weights[cells.index(i0, i1, i2)] = s;
      }
    }
  });
  return CellMeasure(cells, 1, std::move(weights));
}

PushforwardTrend pushforward_ac_test(const SampledMap& f, const CellMeasure& measure, int n_scales) {
  if (f.dim_in() != measure.grid().dim) throw RangeError("measure and map live on different dimensions");
  if (n_scales < 1) throw RangeError("need at least one scale");
  const int dim = f.dim_out();
  const Grid& mg = measure.grid();
  std::array<double, 3> lo{}, hi{};
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (std::size_t n = 0; n < f.grid().size(); ++n)
    for (int d = 0; d < dim; ++d) {
      lo[d] = std::min(lo[d], f.value(n, d));
      hi[d] = std::max(hi[d], f.value(n, d));
    }

  // Image position and mass of every measure cell.
  std::vector<std::array<double, 3>> pos(mg.size());
  std::vector<double> mass(mg.size());
  const auto comps = static_cast<std::size_t>(measure.components());
  for (std::size_t n = 0; n < mg.size(); ++n) {
    const auto idx = mg.unravel(n);
    std::array<double, 3> x{}, y{};
    for (int d = 0; d < mg.dim; ++d) x[d] = mg.coord(d, idx[d]);
    f.interpolate(std::span<const double>(x.data(), static_cast<std::size_t>(mg.dim)),
                  std::span<double>(y.data(), static_cast<std::size_t>(dim)));
    pos[n] = y;
    double s = 0.0;
    for (std::size_t c = 0; c < comps; ++c) s += measure.weights()[n * comps + c] * measure.weights()[n * comps + c];
    mass[n] = std::sqrt(s);
  }
  double total = 0.0;
  for (double m : mass) total += m;

  PushforwardTrend trend;
  for (int s = 0; s < n_scales; ++s) {
    const std::size_t r = std::size_t{1} << (s + 2);
    std::size_t bins = 1;
    for (int d = 0; d < dim; ++d) bins *= r;
    std::vector<double> hist(bins, 0.0);
    for (std::size_t n = 0; n < pos.size(); ++n) {
      std::size_t flat = 0;
      for (int d = 0; d < dim; ++d) {
        const double width = hi[d] > lo[d] ? hi[d] - lo[d] : 1.0;
        const auto b = static_cast<std::size_t>(
            std::clamp(std::floor((pos[n][d] - lo[d]) / width * static_cast<double>(r)), 0.0,
                       static_cast<double>(r - 1)));
        flat = flat * r + b;
      }
      hist[flat] += mass[n];
    }
    const auto top = static_cast<std::size_t>(std::ceil(0.01 * static_cast<double>(bins)));
    std::partial_sort(hist.begin(), hist.begin() + static_cast<std::ptrdiff_t>(top), hist.end(), std::greater<>());
    double top_mass = 0.0;
    for (std::size_t i = 0; i < top; ++i) top_mass += hist[i];
    trend.resolutions.push_back(r);
    trend.fractions.push_back(total > 0.0 ? top_mass / total : 0.0);
  }
  const double ns = static_cast<double>(n_scales);
  double mx = 0.0, my = 0.0;
  for (int s = 0; s < n_scales; ++s) {
    mx += s;
    my += trend.fractions[static_cast<std::size_t>(s)];
  }
  mx /= ns;
  my /= ns;
  double sxy = 0.0, sxx = 0.0;
  for (int s = 0; s < n_scales; ++s) {
    sxy += (s - mx) * (trend.fractions[static_cast<std::size_t>(s)] - my);
    sxx += (s - mx) * (s - mx);
  }
  trend.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return trend;
}

nlohmann::json RegularityVerdict::to_json() const {
  nlohmann::json pw_rows = nlohmann::json::array();
  for (const auto& r : pointwise.entries) pw_rows.push_back({r[0], r[1], r[2]});
  return {{"adj", adj.to_json()},
          {"adj_finite", adj_finite},
          {"mu", mu.to_json()},
          {"slice_areas_finite", slice_areas_finite},
          {"inverse_tv",
           {{"per_coordinate", inverse_tv.per_coordinate},
            {"total", inverse_tv.total},
            {"coverage", inverse_tv.coverage}}},
          {"pointwise_adj", {{"entries", pw_rows}, {"total", pointwise.total}}},
          {"pushforward", pushforward.to_json()},
          {"gaps", gaps}};
}

RegularityVerdict regularity_verdict(const SampledMap& f, const RegularityConfig& config) {
  require_3d(f);
  RegularityVerdict v;
  auto stage = [](const char* name, auto&& fn) {
    try {
      return fn();
    } catch (const Error& e) {
      throw Error(std::string(name) + ": " + e.what());
    }
  };
  v.adj = stage("adjugate", [&] { return distributional_adjugate(f, config.adjugate); });
  v.adj_finite = std::isfinite(v.adj.total);
  v.mu = stage("mu", [&] { return mu_measure(f, config.adjugate); });
  v.slice_areas_finite = std::isfinite(v.mu.total);
  v.inverse_tv = stage("inversion", [&] {
    return inverse_variation(invert_homeomorphism(f, config.image_shape));
  });
  v.pointwise = stage("pointwise adjugate", [&] {
    if (!config.derivative) return pointwise_adjugate(f);
    const Grid& g = f.grid();
    return pointwise_adjugate(config.derivative, {g.origin[0], g.origin[1], g.origin[2]},
                              {g.upper(0), g.upper(1), g.upper(2)}, config.derivative_points);
  });
  v.pushforward = pushforward_ac_test(f, cell_adjugate_measure(f), config.ac_scales);

  auto rel = [](double a, double b) { return b == 0.0 ? std::abs(a) : std::abs(a - b) / std::abs(b); };
  v.gaps = {{"inverse_tv_vs_mu", rel(v.inverse_tv.total, v.mu.total)},
            {"inverse_tv_below_mu", v.inverse_tv.total <= v.mu.total * (1.0 + config.tolerance)},
            {"adj_vs_inverse_tv_informational", rel(v.adj.total, v.inverse_tv.total)},
            {"inverse_tv_vs_pointwise_adj", rel(v.inverse_tv.total, v.pointwise.total)},
            {"singular_part", v.adj.total - v.pointwise.total}};
  return v;
}

VerificationReport weak_convergence_stability(const std::vector<GallerySpec>& specs,
                                              const StabilityConfig& config) {
  if (specs.empty()) throw RangeError("stability needs at least one map");
  std::vector<double> totals;
  nlohmann::json maps = nlohmann::json::array();
  for (const auto& spec : specs) {
    const auto f = sample_gallery(spec, config.shape);
    totals.push_back(distributional_adjugate(f, config.adjugate).total);
    maps.push_back(to_json(spec));
  }
  const double hi = *std::max_element(totals.begin(), totals.end());
  const double lo = *std::min_element(totals.begin(), totals.end());
  const double expected = oracle(specs.back(), "adj_total_variation");
  auto report = compare("adjugate_stability", totals.back(), expected, config.oracle_tolerance);
  const bool bounded = hi <= (1.0 + config.spread) * lo;
  report.pass = report.pass && bounded;
  report.details = {{"maps", maps},         {"totals", totals}, {"sup", hi},
                    {"inf", lo},            {"bounded", bounded}, {"spread", config.spread},
                    {"grid", config.shape}, {"adjugate", config.adjugate.to_json()}};
  return report;
}

}  // namespace bvdeg
