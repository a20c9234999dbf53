#include "sdm/service/http_api.hpp"

#include <httplib.h>

#include "sdm/dataset/csv_io.hpp"
#include "sdm/error.hpp"

namespace sdm::service {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json error_body(ErrorCode code, const std::string& message) {
  return json{{"error", {{"code", to_string(code)}, {"message", message}}}};
}

spatial::Point point_from(const json& j, const std::string& what) {
  require(j.is_object() && j.contains("x_m") && j.contains("y_m") && j["x_m"].is_number() &&
              j["y_m"].is_number(),
          ErrorCode::schema_mismatch, what + " needs numeric x_m and y_m");
  return {j["x_m"].get<double>(), j["y_m"].get<double>()};
}

std::map<std::string, double> features_from(const json& j) {
  std::map<std::string, double> out;
  if (j.is_null()) return out;
  require(j.is_object(), ErrorCode::schema_mismatch, "features must be an object of name: number");
  for (const auto& [k, v] : j.items()) {
    require(v.is_number(), ErrorCode::schema_mismatch, "feature '" + k + "' must be a number");
    out[k] = v.get<double>();
  }
  return out;
}

json health(const WhatIfService& s) {
  json models = json::array();
  for (const auto& [name, b] : s.bundles()) {
    models.push_back({{"name", name},
                      {"kind", diag::to_string(b.kind)},
                      {"features", b.feature_names()},
                      {"predicts", b.kind != diag::ModelKind::mgwr}});
  }
  return json{{"status", "ok"}, {"api_version", "v1"}, {"toolkit_version", data::toolkit_version()}, {"models", models}};
}

json stations(const WhatIfService& s) {
  const auto& t = s.stations();
  const auto supply = t.find_column(kSupplyFeature);
  json list = json::array();
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    list.push_back({{"station_id", t.station_ids[i]},
                    {"x_m", t.locations[i].x},
                    {"y_m", t.locations[i].y},
                    {"supply_cars", supply ? json(t.X(r, static_cast<Eigen::Index>(*supply))) : json(nullptr)},
                    {"demand_trips_per_month", t.y(r)}});
  }
  return json{{"stations", list}};
}

json predict(const WhatIfService& s, const json& body) {
  require(body.is_object() && body.contains("model") && body["model"].is_string(), ErrorCode::schema_mismatch,
          "predict needs a string 'model'");
  require(body.contains("rows") && body["rows"].is_array(), ErrorCode::schema_mismatch,
          "predict needs an array 'rows'");
  const std::string model = body["model"].get<std::string>();
  const ModelBundle& b = s.bundle(model);
  require(b.kind != diag::ModelKind::mgwr, ErrorCode::unsupported, "MGWR does not support out-of-sample prediction");
  json values = json::array();
  for (const auto& row : body["rows"]) {
    require(row.is_object(), ErrorCode::schema_mismatch, "each row must be an object");
    if (row.contains("station_id")) {
      require(row["station_id"].is_string(), ErrorCode::schema_mismatch, "station_id must be a string");
      values.push_back(s.predict_station(model, row["station_id"].get<std::string>()));
    } else {
      const spatial::Point at = point_from(row, "row");
      values.push_back(s.predict(model, {at}, {features_from(row.value("features", json()))}).front());
    }
  }
  return json{{"model", model}, {"kind", diag::to_string(b.kind)}, {"demand_trips_per_month", values}};
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::schema_mismatch:
    case ErrorCode::invalid_argument:
    case ErrorCode::invalid_bandwidth: return 400;
    case ErrorCode::unfitted_model: return 404;
    case ErrorCode::unsupported:
    case ErrorCode::out_of_domain:
    case ErrorCode::rank_deficient: return 422;
    default: return 500;
  }
}

WhatIfRequest whatif_request_from_json(const json& j) {
  require(j.is_object(), ErrorCode::schema_mismatch, "what-if body must be a JSON object");
  require(j.contains("location"), ErrorCode::schema_mismatch, "what-if needs a location");
  WhatIfRequest r;
  r.location = point_from(j["location"], "location");
  r.mode = parse_feature_mode(j.value("mode", std::string("auto-fuse")));
  r.features = features_from(j.value("features", json()));
  if (j.contains("supply_range")) {
    const auto& s = j["supply_range"];
    require(s.is_array() && s.size() == 2 && s[0].is_number_unsigned() && s[1].is_number_unsigned(),
            ErrorCode::schema_mismatch, "supply_range must be [min_cars, max_cars] with non-negative integers");
    r.supply_min = s[0].get<std::size_t>();
    r.supply_max = s[1].get<std::size_t>();
  }
  if (j.contains("models")) {
    require(j["models"].is_array(), ErrorCode::schema_mismatch, "models must be an array of names");
    for (const auto& m : j["models"]) {
      require(m.is_string(), ErrorCode::schema_mismatch, "models must be an array of names");
      r.models.push_back(m.get<std::string>());
    }
  }
  return r;
}

json to_json(const WhatIfResponse& r) {
  json curves = json::array();
  for (const auto& c : r.curves) {
    curves.push_back({{"model", c.model}, {"kind", c.kind}, {"demand_trips_per_month", c.demand_trips_per_month}});
  }
  const auto& n = r.neighbourhood;
  json largest = nullptr;
  if (n.largest_station_id) {
    largest = {{"station_id", *n.largest_station_id},
               {"supply_cars", optional_number(n.largest_supply_cars)},
               {"demand_trips_per_month", optional_number(n.largest_demand_trips_per_month)}};
  }
  return json{{"location", {{"x_m", r.location.x}, {"y_m", r.location.y}}},
              {"mode", to_string(r.mode)},
              {"supply_cars", r.supply_cars},
              {"curves", curves},
              {"neighbourhood",
               {{"radius_m", n.radius_m},
                {"station_count", n.station_count},
                {"mean_supply_cars", optional_number(n.mean_supply_cars)},
                {"mean_demand_trips_per_month", optional_number(n.mean_demand_trips_per_month)},
                {"largest_station", largest}}},
              {"base_features", r.base_features},
              {"outside_hull", r.outside_hull},
              {"warnings", r.warnings},
              {"fusion_fingerprint", r.fusion_fingerprint}};
}

HttpReply handle_request(const WhatIfService& service, const std::string& method, const std::string& path,
                         const std::string& body) {
  const std::string prefix = kApiPrefix;
  try {
    json payload;
    if (method == "POST") {
      try {
        payload = json::parse(body);
      } catch (const json::exception& e) {
        fail(ErrorCode::schema_mismatch, std::string("request body is not valid JSON: ") + e.what());
      }
    }
    if (method == "GET" && path == prefix + "/health") return {200, health(service).dump()};
    if (method == "GET" && path == prefix + "/stations") return {200, stations(service).dump()};
    if (method == "POST" && path == prefix + "/predict") return {200, predict(service, payload).dump()};
    if (method == "POST" && path == prefix + "/whatif") {
      return {200, to_json(service.whatif(whatif_request_from_json(payload))).dump()};
    }
    return {404, json{{"error", {{"code", "not_found"}, {"message", method + " " + path + " is not an endpoint"}}}}.dump()};
  } catch (const Error& e) {
    return {http_status(e.code()), error_body(e.code(), e.what()).dump()};
  } catch (const json::exception& e) {
    return {400, error_body(ErrorCode::schema_mismatch, e.what()).dump()};
  } catch (const std::exception& e) {
    return {500, error_body(ErrorCode::numerical, e.what()).dump()};
  }
}

void serve(const WhatIfService& service, const std::string& host, int port) {
  httplib::Server server;
  auto route = [&service](const httplib::Request& req, httplib::Response& res) {
    const HttpReply reply = handle_request(service, req.method, req.path, req.body);
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  };
  for (const char* p : {"/v1/health", "/v1/stations"}) server.Get(p, route);
  for (const char* p : {"/v1/predict", "/v1/whatif"}) server.Post(p, route);
  require(server.bind_to_port(host, port), ErrorCode::io,
          "cannot listen on " + host + ":" + std::to_string(port));
  server.listen_after_bind();
}

}  // namespace sdm::service
