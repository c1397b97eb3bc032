#include "bvdeg/suites.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "bvdeg/adjugate.hpp"
#include "bvdeg/cantor.hpp"
#include "bvdeg/distjac.hpp"
#include "bvdeg/dyadic.hpp"
#include "bvdeg/errors.hpp"
#include "bvdeg/field_io.hpp"
#include "bvdeg/logging.hpp"
#include "bvdeg/variation.hpp"

namespace bvdeg {
namespace {

using nlohmann::json;

struct Rng {
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double uniform(double a, double b) {
    const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    return a + (b - a) * u;
  }
  int integer(int a, int b) {  // inclusive
    return a + static_cast<int>(engine() % static_cast<std::uint64_t>(b - a + 1));
  }
  std::mt19937_64 engine;
};

template <class Fn>
void run_case(std::vector<CaseRow>& rows, std::string id, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  CaseRow row;
  try {
    row = fn();
  } catch (const Error& e) {
    row = CaseRow{};
    row.error = e.what();
    row.pass = false;
    log::error("case " + id + " failed: " + e.what());
  }
  row.case_id = std::move(id);
  row.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  rows.push_back(std::move(row));
}

CaseRow from_report(const VerificationReport& r) {
  CaseRow row;
  row.lhs = r.lhs;
  row.rhs = r.rhs;
  row.gap = r.gap;
  row.tol = r.tolerance;
  row.pass = r.pass;
  row.details = r.details;
  row.details["gap_kind"] = to_string(r.gap_kind);
  return row;
}

CaseRow compare_row(double lhs, double rhs, double tol, GapKind kind = GapKind::Relative) {
  return from_report(compare("", lhs, rhs, tol, kind));
}

GallerySpec gallery(const std::string& name) {
  GallerySpec s;
  s.name = name;
  return s;
}

SampledMap load_or_sample(const SuiteConfig& c) {
  if (!c.map_path.empty()) return load_map(c.map_path);
  return sample_gallery(*c.map, c.grid);
}

std::vector<std::size_t> fit_grid(const std::vector<std::size_t>& grid, int dim) {
  if (static_cast<int>(grid.size()) == dim) return grid;
  return std::vector<std::size_t>(static_cast<std::size_t>(dim), grid.empty() ? 65 : grid.front());
}

PlanarRegion domain_rect(const SampledMap& g) {
  const Grid& gr = g.grid();
  return PlanarRegion::rect({gr.origin[0], gr.origin[1]}, {gr.extent(0), gr.extent(1)});
}

// ---------------------------------------------------------------- suites

void degree_identity_suite(const SuiteConfig& c, SuiteResult& out) {
  const auto g = load_or_sample(c);
  if (g.dim_in() != 2 || g.dim_out() != 2) throw RangeError("degree-identity needs a planar map");
  const Grid& gr = g.grid();
  const Vec2 center{gr.origin[0] + 0.5 * gr.extent(0), gr.origin[1] + 0.5 * gr.extent(1)};
  const auto disk = PlanarRegion::disk(center, c.radius);
  const auto pm = planar_map(g);

  double pairing = 0.0;
  run_case(out.rows, "degree_vs_pairing", [&] {
    const auto r = verify_degree_identity(g, disk, c.raster, c.tol);
    pairing = r.rhs;
    return from_report(r);
  });
  if (c.map) {
    run_case(out.rows, "pairing_vs_oracle", [&] {
      return compare_row(pairing, oracle(*c.map, "jacobian_mass_disk", c.radius), c.tol);
    });
  }
  run_case(out.rows, "boundary_pairing_vs_degree", [&] {
    const double lhs = boundary_pairing(pm, center, c.radius);
    const double rhs = degree_integral(pm, disk, c.raster).signed_value;
    return compare_row(lhs, rhs, c.tol);
  });
}

void coarea_suite(const SuiteConfig& c, SuiteResult& out) {
  Rng rng(c.seed);
  const int max_side = static_cast<int>(c.grid.front());
  double worst = 0.0;
  for (int i = 0; i < c.cases; ++i) {
    const std::size_t shape[2] = {static_cast<std::size_t>(rng.integer(2, max_side)),
                                  static_cast<std::size_t>(rng.integer(2, max_side))};
    const bool integer = i % 2 == 0;
    std::vector<double> values(shape[0] * shape[1]);
    for (auto& v : values) v = integer ? rng.integer(0, 9) : rng.uniform(-1.0, 1.0);
    const double h[2] = {rng.uniform(0.01, 0.1), rng.uniform(0.01, 0.1)};
    const double o[2] = {0.0, 0.0};
    const SampledMap u(Grid::make(shape, h, o), 1, std::move(values));
    run_case(out.rows, "field_" + std::to_string(i), [&] {
      auto row = from_report(coarea_check(u, c.tol));
      row.details["integer_valued"] = integer;
      worst = std::max(worst, row.gap);
      return row;
    });
  }
  out.details["max_gap"] = worst;
}

void bvl_suite(const SuiteConfig& c, SuiteResult& out) {
  Rng rng(c.seed);
  const int max_side = static_cast<int>(c.grid.front());
  for (int i = 0; i < c.cases; ++i) {
    const std::size_t shape[2] = {static_cast<std::size_t>(rng.integer(2, max_side)),
                                  static_cast<std::size_t>(rng.integer(2, max_side))};
    const int m = rng.integer(1, 3);
    std::vector<double> values(shape[0] * shape[1] * static_cast<std::size_t>(m));
    for (auto& v : values) v = rng.uniform(-1.0, 1.0);
    const double h[2] = {rng.uniform(0.01, 0.1), rng.uniform(0.01, 0.1)};
    const double o[2] = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const SampledMap f(Grid::make(shape, h, o), m, std::move(values));
    for (int axis = 1; axis <= 2; ++axis) {
      run_case(out.rows, "field_" + std::to_string(i) + "_axis" + std::to_string(axis), [&] {
        const double lines = slice_variation_integral(f, axis);
        const double measure = total_variation(directional_difference(f, axis - 1));
        auto row = compare_row(lines, measure, c.tol);
        row.details["components"] = m;
        return row;
      });
    }
  }
}

struct NamedPlanar {
  std::string name;
  SampledMap map;
};

// Planar maps of the configured map: itself when planar, otherwise the nine
// coordinate pairs of the mid slices.
std::vector<NamedPlanar> planar_family(const SampledMap& f) {
  std::vector<NamedPlanar> out;
  if (f.dim_in() == 2 && f.dim_out() == 2) {
    out.push_back({"map", f});
    return out;
  }
  if (f.dim_in() != 3 || f.dim_out() != 3) throw RangeError("expected a planar or 3D map");
  for (int k = 1; k <= 3; ++k) {
    const Grid& g = f.grid();
    const double t = g.origin[k - 1] + 0.5 * g.extent(k - 1);
    const auto slice = restrict_slice(f, k, t);
    for (int j = 1; j <= 3; ++j) {
      out.push_back({"k" + std::to_string(k) + "_j" + std::to_string(j), coordinate_pair(slice, j)});
    }
  }
  return out;
}

PlanarRegion random_region(Rng& rng, const Box2& box, int index) {
  const double w = box.width(), h = box.height();
  const double s = std::min(w, h);
  for (;;) {
    if (index % 2 == 0) {
      const Vec2 c{rng.uniform(box.lo.x + 0.05 * w, box.hi.x - 0.05 * w),
                   rng.uniform(box.lo.y + 0.05 * h, box.hi.y - 0.05 * h)};
      const double room = std::min({c.x - box.lo.x, box.hi.x - c.x, c.y - box.lo.y, box.hi.y - c.y});
      const double r = std::min(rng.uniform(0.05, 0.45) * s, room);
      if (r > 0.02 * s) return PlanarRegion::disk(c, r);
    } else {
      const Vec2 sides{rng.uniform(0.1, 0.6) * w, rng.uniform(0.1, 0.6) * h};
      const Vec2 corner{rng.uniform(box.lo.x, box.hi.x - sides.x), rng.uniform(box.lo.y, box.hi.y - sides.y)};
      return PlanarRegion::rect(corner, sides);
    }
  }
}

void lemma61_suite(const SuiteConfig& c, SuiteResult& out) {
  const auto f = load_or_sample(c);
  Rng rng(c.seed);
  std::size_t total_checked = 0, total_violations = 0;
  for (const auto& [name, g] : planar_family(f)) {
    const auto pm = planar_map(g);
    const Grid& gr = g.grid();
    Box2 dom;
    dom.expand({gr.origin[0], gr.origin[1]});
    dom.expand({gr.upper(0), gr.upper(1)});
    run_case(out.rows, name, [&] {
      int checked = 0, unstable = 0, violations = 0, nonzero = 0;
      for (int p = 0; p < c.cases; ++p) {
        const auto region = random_region(rng, dom, p);
        Box2 ib;
        for (const auto& q : region.boundary(64)) ib.expand(pm(q));
        const double mx = 0.1 * ib.width(), my = 0.1 * ib.height();
        const Vec2 y{rng.uniform(ib.lo.x - mx, ib.hi.x + mx), rng.uniform(ib.lo.y - my, ib.hi.y + my)};
        int deg = 0;
        try {
          deg = topological_degree(pm, region, y);
        } catch (const UnstableDegree&) {
          ++unstable;
          continue;
        }
        ++checked;
        if (deg == 0) continue;  // |deg| <= N holds trivially
        ++nonzero;
        const int n = preimage_count(pm, region, y, c.search_resolution);
        if (std::abs(deg) > n) ++violations;
      }
      total_checked += static_cast<std::size_t>(checked);
      total_violations += static_cast<std::size_t>(violations);
      CaseRow row = compare_row(violations, 0.0, 0.0, GapKind::Absolute);
      row.details = {{"pairs", c.cases},
                     {"checked", checked},
                     {"unstable_skipped", unstable},
                     {"nonzero_degree", nonzero},
                     {"search_resolution", c.search_resolution}};
      return row;
    });
  }
  out.details["checked"] = total_checked;
  out.details["violations"] = total_violations;
}

json table_json(const std::array<std::array<double, 3>, 3>& m) {
  json rows = json::array();
  for (const auto& r : m) rows.push_back({r[0], r[1], r[2]});
  return rows;
}

AdjugateConfig adjugate_config(const SuiteConfig& c) {
  AdjugateConfig a;
  a.n_slices = c.slices;
  a.depth = c.depth;
  a.raster = c.raster;
  a.seed = c.seed;
  return a;
}

void adjugate_suite(const SuiteConfig& c, SuiteResult& out) {
  const auto f = load_or_sample(c);
  AdjugateTable table;
  run_case(out.rows, "total", [&] {
    table = distributional_adjugate(f, adjugate_config(c));
    if (c.map) return compare_row(table.total, oracle(*c.map, "adj_total_variation"), c.tol);
    CaseRow row;
    row.lhs = row.rhs = table.total;
    row.pass = std::isfinite(table.total);
    row.details["oracle"] = "none";
    return row;
  });
  out.details["adj"] = table.to_json();
  if (!c.map || !out.rows.back().error.empty()) return;
  const auto expected = oracle_adjugate_table(*c.map);
  out.details["oracle_entries"] = table_json(expected);
  for (int k = 1; k <= 3; ++k) {
    for (int j = 1; j <= 3; ++j) {
      run_case(out.rows, "entry_" + std::to_string(k) + std::to_string(j), [&] {
        const double want = expected[k - 1][j - 1];
        // Vanishing entries are judged absolutely.
        return want == 0.0 ? compare_row(table.entry(k, j), 0.0, 0.02, GapKind::Absolute)
                           : compare_row(table.entry(k, j), want, c.tol);
      });
    }
  }
}

void regularity_suite(const SuiteConfig& c, SuiteResult& out) {
  const auto f = load_or_sample(c);
  RegularityConfig rc;
  rc.adjugate = adjugate_config(c);
  std::copy_n(c.image_grid.begin(), 3, rc.image_shape.begin());
  rc.tolerance = c.tol;
  if (c.map) rc.derivative = make_gallery(*c.map).derivative;
  RegularityVerdict v;
  run_case(out.rows, "inverse_tv_vs_mu", [&] {
    v = regularity_verdict(f, rc);
    auto row = compare_row(v.inverse_tv.total, v.mu.total, c.tol);
    row.details["inverse_tv_below_mu"] = v.gaps["inverse_tv_below_mu"];
    return row;
  });
  if (!out.rows.back().error.empty()) return;
  out.details["verdict"] = v.to_json();
  if (!c.map) return;
  const auto& spec = *c.map;
  const double adj_expected = oracle(spec, "adj_total_variation");
  const double pointwise_expected = oracle(spec, "pointwise_adj_total");
  run_case(out.rows, "adj_vs_oracle", [&] { return compare_row(v.adj.total, adj_expected, c.tol); });
  run_case(out.rows, "mu_vs_oracle", [&] { return compare_row(v.mu.total, oracle(spec, "mu_total"), c.tol); });
  run_case(out.rows, "inverse_tv_vs_oracle",
           [&] { return compare_row(v.inverse_tv.total, oracle(spec, "inverse_tv_total"), c.tol); });
  run_case(out.rows, "pointwise_adj_vs_oracle",
           [&] { return compare_row(v.pointwise.total, pointwise_expected, c.tol); });
  if (pointwise_expected == adj_expected) {
    // Sobolev case: inverse variation equals the integral of |adj Df|.
    run_case(out.rows, "inverse_tv_vs_pointwise_adj",
             [&] { return compare_row(v.inverse_tv.total, v.pointwise.total, c.tol); });
  } else {
    // Singular case: the distributional total must exceed the pointwise one
    // by (nearly) the singular mass.
    run_case(out.rows, "singular_discrepancy", [&] {
      CaseRow row;
      row.lhs = v.adj.total - v.pointwise.total;
      row.rhs = adj_expected - pointwise_expected;
      row.tol = 0.05 * row.rhs;
      row.gap = row.rhs - row.lhs;
      row.pass = row.gap <= row.tol;
      row.details = {{"gap_kind", "shortfall"}, {"adj_total", v.adj.total}, {"pointwise_total", v.pointwise.total}};
      return row;
    });
  }
}

void stability_suite(const SuiteConfig& c, SuiteResult& out) {
  StabilityConfig sc;
  sc.shape = c.grid;
  sc.adjugate = adjugate_config(c);
  sc.oracle_tolerance = c.tol;
  std::vector<GallerySpec> specs;
  for (int level : c.levels) {
    GallerySpec s = *c.map;
    s.level = level;
    specs.push_back(s);
    run_case(out.rows, "level_" + std::to_string(level), [&] {
      const auto f = sample_gallery(s, c.grid);
      return compare_row(distributional_adjugate(f, sc.adjugate).total, oracle(s, "adj_total_variation"), c.tol);
    });
  }
  // Sup bound over the sequence, from the per-level rows.
  CaseRow bound;
  double hi = 0.0, lo = std::numeric_limits<double>::infinity();
  bool all_ok = true;
  for (const auto& r : out.rows) {
    all_ok = all_ok && r.error.empty();
    hi = std::max(hi, r.lhs);
    lo = std::min(lo, r.lhs);
  }
  bound.case_id = "sup_bounded";
  bound.lhs = hi;
  bound.rhs = (1.0 + sc.spread) * lo;
  bound.gap = lo > 0.0 ? hi / lo - 1.0 : 0.0;
  bound.tol = sc.spread;
  bound.pass = all_ok && hi <= bound.rhs;
  bound.details = {{"sup", hi}, {"inf", lo}};
  out.rows.push_back(bound);
}

void areas_suite(const SuiteConfig& c, SuiteResult& out) {
  const auto f = load_or_sample(c);
  if (f.dim_in() != 3 || f.dim_out() != 3) throw RangeError("areas needs a 3D map");
  const JacobianOptions opts{c.raster, 64};
  const Grid& g = f.grid();
  const auto slice = restrict_slice(f, 3, g.origin[2] + 0.5 * g.extent(2));
  const auto region = domain_rect(slice);
  const auto grid = DyadicGrid::covering(region);
  LebesgueAreaBounds bounds;
  run_case(out.rows, "slice_upper_vs_area", [&] {
    bounds = lebesgue_area_bounds(slice, region, grid, c.depth, opts);
    const double area = c.map ? oracle_mu_per_axis(*c.map)[2] : bounds.upper;
    auto row = compare_row(bounds.upper, area, c.tol);
    row.details = {{"lower", bounds.lower}, {"upper", bounds.upper}, {"v", bounds.v}};
    return row;
  });
  if (c.map) {
    run_case(out.rows, "slice_lower_vs_area",
             [&] { return compare_row(bounds.lower, oracle_mu_per_axis(*c.map)[2], c.tol); });
  }
  run_case(out.rows, "u_monotone", [&] {
    const auto av = area_variation(planar_map(coordinate_pair(slice, 3)), region, grid, c.depth, opts);
    int drops = 0;
    for (std::size_t d = 1; d < av.u.size(); ++d) drops += av.u[d] < av.u[d - 1] ? 1 : 0;
    auto row = compare_row(drops, 0.0, 0.0, GapKind::Absolute);
    row.details = {{"u", av.u}, {"v", av.v}};
    return row;
  });

  // Tilted plane (x, y) -> (x, y, x): area sqrt(2) between V-bounds 1 and 2.
  const std::size_t shape[2] = {65, 65};
  const double lo[2] = {0.0, 0.0}, hi[2] = {1.0, 1.0};
  const auto tilted = SampledMap::sample(Grid::spanning(shape, lo, hi), 3, [](auto x, auto y) {
    y[0] = x[0];
    y[1] = x[1];
    y[2] = x[0];
  });
  const auto unit = PlanarRegion::rect({0.0, 0.0}, {1.0, 1.0});
  LebesgueAreaBounds tb;
  run_case(out.rows, "tilted_lower", [&] {
    tb = lebesgue_area_bounds(tilted, unit, DyadicGrid::covering(unit), c.depth, opts);
    return compare_row(tb.lower, 1.0, c.tol);
  });
  run_case(out.rows, "tilted_upper", [&] { return compare_row(tb.upper, 2.0, c.tol); });
  run_case(out.rows, "tilted_brackets_area", [&] {
    CaseRow row;
    row.lhs = std::sqrt(2.0);
    row.rhs = tb.upper;
    row.pass = tb.lower <= std::sqrt(2.0) && std::sqrt(2.0) <= tb.upper;
    row.details = {{"lower", tb.lower}, {"upper", tb.upper}};
    return row;
  });
}

struct AxiomMap {
  std::string name;
  PlanarMap map;
  PlanarRegion region;
};

std::vector<AxiomMap> axiom_maps(const SuiteConfig& c) {
  std::vector<AxiomMap> out;
  auto add_gallery = [&](const GallerySpec& spec) {
    const auto gm = make_gallery(spec);
    const Vec2 lo{gm.lo[0], gm.lo[1]}, hi{gm.hi[0], gm.hi[1]};
    const Vec2 mid = 0.5 * (lo + hi);
    // Disks for the maps centred at the origin, shrunk squares otherwise.
    auto region = gm.lo[0] < 0.0 ? PlanarRegion::disk(mid, 0.45 * (hi.x - lo.x))
                                 : PlanarRegion::rect(lo + 0.05 * (hi - lo), 0.9 * (hi - lo));
    std::string name = spec.name;
    if (spec.name == "zpow") name += "_k" + std::to_string(spec.k);
    out.push_back({name, planar_map(gm), region});
  };
  if (!c.map_path.empty()) {
    const auto g = load_map(c.map_path);
    const Grid& gr = g.grid();
    out.push_back({"file", planar_map(g),
                   PlanarRegion::rect({gr.origin[0] + 0.05 * gr.extent(0), gr.origin[1] + 0.05 * gr.extent(1)},
                                      {0.9 * gr.extent(0), 0.9 * gr.extent(1)})});
    return out;
  }
  if (c.map) {
    add_gallery(*c.map);
    return out;
  }
  GallerySpec z = gallery("zpow");
  z.k = 2;
  add_gallery(z);
  add_gallery(gallery("shear2d"));
  add_gallery(gallery("radial_stretch"));
  GallerySpec reflection = gallery("linear");
  reflection.matrix = {0.0, 1.0, 1.0, 0.0};
  add_gallery(reflection);
  // Planar Cantor pair (h(x), y), sampled.
  const std::size_t shape[2] = {c.grid.front(), c.grid.front()};
  const double lo[2] = {0.0, 0.0}, hi[2] = {1.0, 1.0};
  const int level = c.levels.empty() ? 4 : c.levels.front();
  const auto cantor = SampledMap::sample(Grid::spanning(shape, lo, hi), 2, [level](auto x, auto y) {
    y[0] = cantor_shear(level, x[0]);
    y[1] = x[1];
  });
  out.push_back({"cantor_pair", planar_map(cantor), PlanarRegion::rect({0.05, 0.05}, {0.9, 0.9})});
  return out;
}

void axioms_suite(const SuiteConfig& c, SuiteResult& out) {
  Rng rng(c.seed);
  for (const auto& am : axiom_maps(c)) {
    run_case(out.rows, am.name, [&] {
      const Box2 b = am.region.bounds();
      auto random_inside = [&] {
        for (;;) {
          const Vec2 p{rng.uniform(b.lo.x, b.hi.x), rng.uniform(b.lo.y, b.hi.y)};
          if (am.region.contains(p)) return p;
        }
      };
      int failures = 0, applicable = 0, checks = 0, redraws = 0;
      for (int i = 0; i < c.cases; ++i) {
        // Decomposition by a random grid of cuts.
        const int nx = rng.integer(1, 3), ny = rng.integer(nx == 1 ? 2 : 1, 3);
        std::vector<double> xs{b.lo.x}, ys{b.lo.y};
        for (int s = 1; s < nx; ++s) xs.push_back(rng.uniform(b.lo.x, b.hi.x));
        for (int s = 1; s < ny; ++s) ys.push_back(rng.uniform(b.lo.y, b.hi.y));
        std::sort(xs.begin(), xs.end());
        std::sort(ys.begin(), ys.end());
        xs.push_back(b.hi.x);
        ys.push_back(b.hi.y);
        std::vector<PlanarRegion> parts;
        for (std::size_t a = 0; a + 1 < xs.size(); ++a)
          for (std::size_t e = 0; e + 1 < ys.size(); ++e) {
            Box2 cell;
            cell.expand({xs[a], ys[e]});
            cell.expand({xs[a + 1], ys[e + 1]});
            auto poly = am.region.clip_box(cell);
            if (!poly.empty()) parts.push_back(PlanarRegion::polygon(std::move(poly)));
          }

        for (int kind = 0; kind < 2; ++kind) {
          for (int attempt = 0;; ++attempt) {
            const Vec2 x = random_inside();
            const Vec2 y = am.map(x);
            std::vector<PlanarRegion> use = parts;
            if (kind == 1) {
              // Excision: a random box around the chosen preimage.
              const double hw = rng.uniform(0.1, 0.3) * b.width(), hh = rng.uniform(0.1, 0.3) * b.height();
              Box2 box;
              box.expand({x.x - hw, x.y - hh});
              box.expand({x.x + hw, x.y + hh});
              auto poly = am.region.clip_box(box);
              if (poly.empty()) continue;
              use = {PlanarRegion::polygon(std::move(poly))};
            }
            try {
              const auto r = check_degree_axioms(am.map, am.region, use, y);
              const bool ok = r.details["applicable"].get<bool>();
              // y with preimages outside the pieces says nothing; draw again.
              if (!ok && attempt < 20) {
                ++redraws;
                continue;
              }
              ++checks;
              if (ok) ++applicable;
              if (!r.pass) ++failures;
              break;
            } catch (const UnstableDegree&) {
              ++redraws;
              if (attempt > 50) throw;
            }
          }
        }
      }
      CaseRow row = compare_row(failures, 0.0, 0.0, GapKind::Absolute);
      row.details = {{"decompositions", c.cases}, {"checks", checks}, {"applicable", applicable}, {"redraws", redraws}};
      return row;
    });
  }
}

void boundary_suite(const SuiteConfig& c, SuiteResult& out) {
  const int level = c.levels.empty() ? 4 : c.levels.front();
  const std::size_t n = c.grid.front();
  SampledMap g = [&] {
    if (!c.map_path.empty()) return load_map(c.map_path);
    const std::size_t shape[2] = {n, n};
    const double lo[2] = {0.0, 0.0}, hi[2] = {1.0, 1.0};
    return SampledMap::sample(Grid::spanning(shape, lo, hi), 2, [level](auto x, auto y) {
      y[0] = cantor_shear(level, x[0]);
      y[1] = x[1];
    });
  }();
  const Grid& gr = g.grid();
  const double h = std::max(gr.spacing[0], gr.spacing[1]);
  const std::vector<double> eps{8.0 * h, 4.0 * h, 2.0 * h};
  const double inner = 8.0 * h + 0.01;
  Rng rng(c.seed);
  BoundaryConvergenceOptions opts;
  opts.raster = c.raster;
  opts.tolerance = c.tol;
  for (int i = 0; i < c.cases; ++i) {
    const double span = std::min(gr.extent(0), gr.extent(1));
    const double r = rng.uniform(0.15, 0.3) * span;
    const Vec2 center{rng.uniform(gr.origin[0] + inner + r, gr.upper(0) - inner - r),
                      rng.uniform(gr.origin[1] + inner + r, gr.upper(1) - inner - r)};
    run_case(out.rows, "circle_" + std::to_string(i), [&] {
      auto row = from_report(mollified_boundary_convergence(g, center, r, eps, opts));
      row.details["center"] = {center.x, center.y};
      row.details["radius"] = r;
      return row;
    });
  }
}

std::string format_number(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"degree-identity", "coarea",     "bvl",       "lemma61",
                                              "adjugate",        "regularity", "stability", "areas",
                                              "axioms",          "boundary"};
  return names;
}

json SuiteConfig::to_json() const {
  json j = {{"suite", suite},
            {"map", map ? bvdeg::to_json(*map) : json(nullptr)},
            {"map_path", map_path},
            {"grid", grid},
            {"image_grid", image_grid},
            {"slices", slices},
            {"raster", raster},
            {"depth", depth},
            {"radius", radius},
            {"tol", tol},
            {"cases", cases},
            {"seed", seed},
            {"levels", levels},
            {"search_resolution", search_resolution}};
  return j;
}

SuiteConfig SuiteConfig::from_json(const json& j, SuiteConfig c) {
  try {
    if (j.contains("suite")) c.suite = j.at("suite").get<std::string>();
    if (j.contains("map")) {
      if (j.at("map").is_null()) c.map.reset();
      else c.map = gallery_spec_from_json(j.at("map"));
    }
    if (j.contains("map_path")) c.map_path = j.at("map_path").get<std::string>();
    if (j.contains("grid")) c.grid = j.at("grid").get<std::vector<std::size_t>>();
    if (j.contains("image_grid")) c.image_grid = j.at("image_grid").get<std::vector<std::size_t>>();
    if (j.contains("slices")) c.slices = j.at("slices").get<int>();
    if (j.contains("raster")) c.raster = j.at("raster").get<int>();
    if (j.contains("depth")) c.depth = j.at("depth").get<int>();
    if (j.contains("radius")) c.radius = j.at("radius").get<double>();
    if (j.contains("tol")) c.tol = j.at("tol").get<double>();
    if (j.contains("cases")) c.cases = j.at("cases").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("levels")) c.levels = j.at("levels").get<std::vector<int>>();
    if (j.contains("search_resolution")) c.search_resolution = j.at("search_resolution").get<int>();
  } catch (const json::exception& e) {
    throw RangeError(std::string("invalid suite config: ") + e.what());
  }
  return c;
}

SuiteConfig resolve_defaults(SuiteConfig c) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), c.suite) == names.end()) {
    throw RangeError("unknown suite '" + c.suite + "'");
  }
  auto set_map = [&](const char* name, int level = 6, int k = 2) {
    if (c.map || !c.map_path.empty()) return;
    GallerySpec s = gallery(name);
    s.level = level;
    s.k = k;
    c.map = s;
  };
  auto set_grid = [&](std::vector<std::size_t> g) {
    if (c.grid.empty()) c.grid = std::move(g);
  };
  auto set = [](auto& field, auto value) {
    if (field == 0) field = value;
  };
  const std::string& s = c.suite;
  if (s == "degree-identity") {
    set_map("zpow");
    set_grid({512, 512});
    set(c.raster, 512);
    set(c.radius, 0.8);
    set(c.tol, 0.03);
  } else if (s == "coarea") {
    set_grid({48});
    set(c.cases, 100);
    set(c.tol, 1e-10);
  } else if (s == "bvl") {
    set_grid({48});
    set(c.cases, 50);
    set(c.tol, 1e-12);
  } else if (s == "lemma61") {
    set_map("cantor_shear3d");
    set(c.cases, 200);
    set(c.search_resolution, 256);
  } else if (s == "adjugate") {
    set_map("cantor_shear3d");
    set_grid({193, 97, 97});
    set(c.slices, 33);
    set(c.tol, 0.03);
  } else if (s == "regularity") {
    set_map("cantor_shear3d");
    set_grid({82, 41, 41});
    if (c.image_grid.empty()) c.image_grid = {129, 65, 65};
    set(c.slices, 17);
    set(c.tol, 0.05);
  } else if (s == "stability") {
    set_map("cantor_shear3d");
    set_grid({97, 49, 49});
    if (c.levels.empty()) c.levels = {2, 3, 4, 5, 6, 7, 8};
    set(c.slices, 17);
    set(c.tol, 0.04);
  } else if (s == "areas") {
    set_map("cantor_shear3d");
    set_grid({82, 41, 41});
    set(c.tol, 0.02);
  } else if (s == "axioms") {
    set_grid({244});
    set(c.cases, 50);
  } else if (s == "boundary") {
    set_grid({244});
    if (c.levels.empty()) c.levels = {4};
    set(c.cases, 10);
    set(c.raster, 128);
    set(c.tol, 0.05);
  }
  set(c.depth, 3);
  set(c.raster, 32);
  set(c.search_resolution, 256);
  if (c.map && c.map_path.empty()) {
    const auto gm = make_gallery(*c.map);
    c.grid = fit_grid(c.grid, gm.dim_in);
    if (s == "lemma61" && c.grid.size() == 3 && c.grid == std::vector<std::size_t>{65, 65, 65}) {
      c.grid = {97, 49, 49};
    }
  }
  if (c.slices == 0) c.slices = 33;
  if (c.tol == 0.0) c.tol = 0.03;
  if (c.grid.empty()) c.grid = {65};
  return c;
}

SuiteResult run_suite(const SuiteConfig& raw) {
  SuiteResult out;
  out.config = resolve_defaults(raw);
  out.suite = out.config.suite;
  const auto& c = out.config;
  log::info("running suite " + c.suite);
  if (c.suite == "degree-identity") degree_identity_suite(c, out);
  else if (c.suite == "coarea") coarea_suite(c, out);
  else if (c.suite == "bvl") bvl_suite(c, out);
  else if (c.suite == "lemma61") lemma61_suite(c, out);
  else if (c.suite == "adjugate") adjugate_suite(c, out);
  else if (c.suite == "regularity") regularity_suite(c, out);
  else if (c.suite == "stability") stability_suite(c, out);
  else if (c.suite == "areas") areas_suite(c, out);
  else if (c.suite == "axioms") axioms_suite(c, out);
  else if (c.suite == "boundary") boundary_suite(c, out);
  return out;
}

bool SuiteResult::pass() const {
  if (rows.empty()) return false;
  return std::all_of(rows.begin(), rows.end(), [](const CaseRow& r) { return r.pass; });
}

bool SuiteResult::numerical_error() const {
  return std::any_of(rows.begin(), rows.end(), [](const CaseRow& r) { return !r.error.empty(); });
}

int SuiteResult::exit_code() const {
  if (numerical_error()) return 3;
  return pass() ? 0 : 1;
}

json SuiteResult::report(const std::string& timestamp) const {
  json cases = json::array();
  for (const auto& r : rows) {
    json row = {{"case_id", r.case_id}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"gap", r.gap},
                {"tol", r.tol},         {"pass", r.pass}, {"details", r.details}};
    if (!r.error.empty()) row["error"] = r.error;
    cases.push_back(std::move(row));
  }
  json j = {{"suite", suite},
            {"config", config.to_json()},
            {"pass", pass()},
            {"exit_code", exit_code()},
            {"cases", cases},
            {"details", details},
            {"conventions",
             {{"tv", "anisotropic (sum over axes of directional variations)"},
              {"matrix_norm", "sum of per-entry total variations"},
              {"hausdorff_content", "unnormalised sum of diam^k"}}}};
  if (!timestamp.empty()) j["timestamp"] = timestamp;
  return j;
}

std::string SuiteResult::csv() const {
  std::ostringstream s;
  s << "suite,case_id,lhs,rhs,gap,tol,pass,runtime_ms\n";
  for (const auto& r : rows) {
    s << suite << ',' << r.case_id << ',' << format_number(r.lhs) << ',' << format_number(r.rhs) << ','
      << format_number(r.gap) << ',' << format_number(r.tol) << ',' << (r.pass ? "true" : "false") << ','
      << std::fixed << std::setprecision(3) << r.runtime_ms << std::defaultfloat << '\n';
  }
  return s.str();
}

json merge_reports(const std::vector<json>& reports) {
  json suites = json::array();
  std::size_t cases = 0, failed = 0;
  bool all = !reports.empty();
  for (const auto& r : reports) {
    std::size_t n = 0, bad = 0;
    for (const auto& row : r.at("cases")) {
      ++n;
      if (!row.at("pass").get<bool>()) ++bad;
    }
    cases += n;
    failed += bad;
    const bool pass = r.at("pass").get<bool>();
    all = all && pass;
    suites.push_back({{"suite", r.at("suite")}, {"pass", pass}, {"cases", n}, {"failed", bad}});
  }
  return {{"suites", suites}, {"cases", cases}, {"failed", failed}, {"pass", all}};
}

}  // namespace bvdeg
