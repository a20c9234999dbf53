#pragma once

#include <string>

#include <json.hpp>

#include "sdm/error.hpp"

#include "sdm/service/whatif.hpp"

namespace sdm::service {

inline constexpr const char* kApiPrefix = "/v1";

struct HttpReply {
  int status = 200;
  std::string body;  // JSON
};

/// HTTP status for a toolkit error: 400 schema/argument, 404 unknown model,
/// 422 unsupported model or out-of-domain location, 500 otherwise.
int http_status(ErrorCode code);

/// Routes one request without a socket. Paths carry the /v1 prefix.
HttpReply handle_request(const WhatIfService& service, const std::string& method, const std::string& path,
                         const std::string& body);

nlohmann::json to_json(const WhatIfResponse& response);
WhatIfRequest whatif_request_from_json(const nlohmann::json& j);

/// Blocks serving GET /v1/health, GET /v1/stations, POST /v1/predict and
/// POST /v1/whatif until the process is stopped.
void serve(const WhatIfService& service, const std::string& host, int port);

}  // namespace sdm::service
