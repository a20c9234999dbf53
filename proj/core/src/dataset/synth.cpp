#include "sdm/dataset/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "sdm/error.hpp"

namespace sdm::data {

double Surface::at(double x, double extent) const {
  switch (kind) {
    case Kind::constant: return value;
    case Kind::linear: {
      const double t = std::clamp(x / extent, 0.0, 1.0);
      return value + (other - value) * t;
    }
    case Kind::step: return x < split_x ? value : other;
  }
  return value;
}

namespace {

std::vector<spatial::Point> draw_layout(const SynthConfig& cfg, std::mt19937_64& rng) {
  std::vector<spatial::Point> pts;
  pts.reserve(cfg.n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  switch (cfg.layout) {
    case Layout::uniform:
      for (std::size_t i = 0; i < cfg.n; ++i) {
        const double x = unit(rng) * cfg.extent_m;
        const double y = unit(rng) * cfg.extent_m;
        pts.push_back({x, y});
      }
      break;
    case Layout::clustered: {
      std::vector<spatial::Point> centres;
      for (std::size_t c = 0; c < std::max<std::size_t>(1, cfg.clusters); ++c) {
        const double x = unit(rng) * cfg.extent_m;
        const double y = unit(rng) * cfg.extent_m;
        centres.push_back({x, y});
      }
      std::uniform_int_distribution<std::size_t> pick(0, centres.size() - 1);
      for (std::size_t i = 0; i < cfg.n; ++i) {
        const auto& c = centres[pick(rng)];
        const double dx = normal(rng) * cfg.cluster_spread_m;
        const double dy = normal(rng) * cfg.cluster_spread_m;
        pts.push_back({std::clamp(c.x + dx, 0.0, cfg.extent_m),
                       std::clamp(c.y + dy, 0.0, cfg.extent_m)});
      }
      break;
    }
    case Layout::two_cluster:
      for (std::size_t i = 0; i < cfg.n; ++i) {
        const double centre = (i % 2 == 0) ? 0.0 : cfg.extent_m;
        const double dx = normal(rng) * cfg.cluster_spread_m;
        const double dy = normal(rng) * cfg.cluster_spread_m;
        pts.push_back({centre + dx, dy});
      }
      break;
  }
  return pts;
}

std::string station_id(std::size_t i) {
  std::ostringstream out;
  out << "S" << i;
  return out.str();
}

}  // namespace

SynthResult synth_generate(const SynthConfig& cfg, std::uint64_t seed) {
  const std::size_t p = cfg.surfaces.size();
  if (cfg.n < p + 2) {
    std::ostringstream msg;
    msg << "synthetic generator needs n >= p + 2 (n=" << cfg.n << ", p=" << p << ")";
    fail(ErrorCode::invalid_argument, msg.str());
  }
  require(cfg.sigma >= 0.0, ErrorCode::invalid_argument, "noise sigma must be non-negative");
  require(cfg.names.empty() || cfg.names.size() == p, ErrorCode::invalid_argument,
          "one name per surface is required");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  SynthResult out;
  out.sigma = cfg.sigma;
  FeatureTable& t = out.table;
  t.locations = draw_layout(cfg, rng);
  const auto n = static_cast<Eigen::Index>(cfg.n);
  t.X.resize(n, static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(p); ++j) t.X(i, j) = cfg.feature_mean + normal(rng);
  }
  out.beta.resize(n, static_cast<Eigen::Index>(p + 1));
  t.y.resize(n);
  // For the two-cluster layout surfaces are evaluated in a frame where the
  // west cluster sits at 0 and the east one at extent.
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = t.locations[static_cast<std::size_t>(i)].x;
    out.beta(i, 0) = cfg.intercept.at(x, cfg.extent_m);
    double yi = out.beta(i, 0);
    for (std::size_t j = 0; j < p; ++j) {
      const double b = cfg.surfaces[j].at(x, cfg.extent_m);
      out.beta(i, static_cast<Eigen::Index>(j + 1)) = b;
      yi += b * t.X(i, static_cast<Eigen::Index>(j));
    }
    t.y(i) = yi;
  }
  if (cfg.sigma > 0) {
    for (Eigen::Index i = 0; i < n; ++i) t.y(i) += cfg.sigma * normal(rng);
  }
  for (std::size_t j = 0; j < p; ++j) {
    std::string name = cfg.names.empty() ? "x" + std::to_string(j + 1) : cfg.names[j];
    t.columns.push_back({name, "", "synthetic N(0,1)"});
  }
  t.target = {"y", "", "synthetic response"};
  for (std::size_t i = 0; i < cfg.n; ++i) t.station_ids.push_back(station_id(i));
  t.validate();
  return out;
}

SynthConfig synth_preset(const std::string& name) {
  SynthConfig cfg;
  if (name == "two-cluster") {
    cfg.n = 800;
    cfg.layout = Layout::two_cluster;
    cfg.extent_m = 100'000.0;
    cfg.cluster_spread_m = 10'000.0;
    cfg.intercept = Surface::constant(0.0);
    cfg.surfaces = {Surface::step(2.0, -1.0, 50'000.0)};
    cfg.sigma = 0.1;
    // Positive-mean feature, so a global slope leaves cluster-level residual offsets.
    cfg.feature_mean = 1.0;
  } else if (name == "multiscale") {
    cfg.n = 600;
    cfg.layout = Layout::uniform;
    cfg.extent_m = 100'000.0;
    cfg.intercept = Surface::constant(1.0);
    cfg.surfaces = {Surface::step(2.0, -1.0, 50'000.0), Surface::constant(1.0),
                    Surface::constant(-0.5), Surface::constant(0.8)};
    cfg.sigma = 0.3;
  } else if (name == "uniform") {
    cfg.n = 500;
    cfg.layout = Layout::uniform;
    cfg.intercept = Surface::constant(0.5);
    cfg.surfaces = {Surface::constant(1.0), Surface::constant(-2.0), Surface::constant(0.5),
                    Surface::constant(3.0), Surface::constant(-1.0)};
    cfg.sigma = 0.5;
  } else {
    fail(ErrorCode::invalid_argument, "unknown synthetic preset '" + name + "'");
  }
  return cfg;
}

SynthResult synth_saturating(const SaturatingConfig& cfg, std::uint64_t seed) {
  require(cfg.n >= 4 && cfg.knee >= 1 && cfg.max_supply > cfg.knee, ErrorCode::invalid_argument,
          "saturating generator needs n >= 4 and max_supply > knee >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> supply(1, cfg.max_supply);

  SynthResult out;
  out.sigma = cfg.sigma;
  FeatureTable& t = out.table;
  const auto n = static_cast<Eigen::Index>(cfg.n);
  t.X.resize(n, 3);
  t.y.resize(n);
  out.beta.resize(n, 4);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = unit(rng) * cfg.extent_m;
    const double v = unit(rng) * cfg.extent_m;
    t.locations.push_back({u, v});
    t.X(i, 0) = normal(rng);
    t.X(i, 1) = normal(rng);
    t.X(i, 2) = supply(rng);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = std::min(t.X(i, 2), static_cast<double>(cfg.knee));
    t.y(i) = 20.0 + 6.0 * t.X(i, 0) + 3.0 * t.X(i, 1) + cfg.slope * s + cfg.sigma * normal(rng);
    out.beta.row(i) << 20.0, 6.0, 3.0, (t.X(i, 2) < cfg.knee ? cfg.slope : 0.0);
  }
  t.columns = {{"population", "", "synthetic N(0,1)"},
               {"poi_density", "", "synthetic N(0,1)"},
               {"supply_cars", "cars", "synthetic uniform integer"}};
  t.target = {"demand_trips_per_month", "trips/month", "synthetic saturating response"};
  for (std::size_t i = 0; i < cfg.n; ++i) t.station_ids.push_back(station_id(i));
  t.validate();
  return out;
}

RawLayers synth_raw(const RawSynthConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::poisson_distribution<int> cars(2);

  auto uniform_point = [&] {
    const double x = cfg.origin_x + unit(rng) * cfg.extent_m;
    const double y = cfg.origin_y + unit(rng) * cfg.extent_m;
    return spatial::Point{x, y};
  };

  RawLayers raw;
  // Stations cluster mildly toward the centre, like a city.
  for (std::size_t i = 0; i < cfg.stations; ++i) {
    spatial::Point p;
    if (unit(rng) < 0.5) {
      const double cx = cfg.origin_x + 0.5 * cfg.extent_m + normal(rng) * 0.12 * cfg.extent_m;
      const double cy = cfg.origin_y + 0.5 * cfg.extent_m + normal(rng) * 0.12 * cfg.extent_m;
      p = {std::clamp(cx, cfg.origin_x, cfg.origin_x + cfg.extent_m),
           std::clamp(cy, cfg.origin_y, cfg.origin_y + cfg.extent_m)};
    } else {
      p = uniform_point();
    }
    raw.stations.push_back({station_id(i), p, static_cast<double>(1 + cars(rng))});
  }

  const std::vector<std::string> categories = {"shop", "restaurant", "school", "transit", "leisure"};
  std::uniform_int_distribution<std::size_t> cat(0, categories.size() - 1);
  for (std::size_t k = 0; k < cfg.pois; ++k) raw.pois.push_back({uniform_point(), categories[cat(rng)]});

  raw.census.attributes = {"population", "workplaces"};
  for (std::size_t k = 0; k < cfg.census_cells; ++k) {
    raw.census.points.push_back(uniform_point());
    raw.census.values.push_back({std::floor(unit(rng) * 60.0), std::floor(unit(rng) * 25.0)});
  }

  raw.households.attributes = {"income", "cars_per_household"};
  for (std::size_t k = 0; k < cfg.households; ++k) {
    raw.households.points.push_back(uniform_point());
    raw.households.values.push_back({6000.0 + 2500.0 * normal(rng), std::floor(unit(rng) * 3.0)});
  }

  raw.window_start = 1546300800;  // 2019-01-01T00:00:00Z
  raw.window_end = raw.window_start + static_cast<std::int64_t>(cfg.window_days * 86400.0);
  const double months = cfg.window_days / 30.4375;
  std::uniform_int_distribution<std::int64_t> when(raw.window_start, raw.window_end - 1);
  for (const auto& s : raw.stations) {
    std::poisson_distribution<int> count(cfg.trips_per_car_month * s.vehicles * months / 4.0);
    const int trips = count(rng);
    for (int t = 0; t < trips; ++t) {
      TripRecord trip;
      trip.station_id = s.station_id;
      trip.start_time = when(rng);
      trip.duration_h = std::exp(1.0 + normal(rng));
      trip.distance_km = std::exp(3.0 + normal(rng));
      const double u = unit(rng);
      trip.kind = u < 0.97 ? TripKind::return_trip : (u < 0.99 ? TripKind::one_way : TripKind::other);
      if (unit(rng) < 0.01) trip.duration_h = 600.0;
      if (unit(rng) < 0.01) trip.distance_km = 0.0;
      raw.trips.push_back(std::move(trip));
    }
  }
  return raw;
}

}  // namespace sdm::data
