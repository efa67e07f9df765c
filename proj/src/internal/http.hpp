// Copyright 2026 the oclrag authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>

#include "oclrag/error.hpp"

namespace oclrag::internal {

struct ParsedUrl {
  std::string base;  // scheme://host[:port], what httplib::Client wants
  std::string path;  // leading slash, "/" when absent
};

inline ParsedUrl parse_http_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    raise(ErrorCode::InvalidConfig, "endpoint URL '" + url + "' has no scheme");
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    raise(ErrorCode::InvalidConfig, "endpoint URL '" + url + "' must be http(s)");
  }
  const auto host_start = scheme_end + 3;
  if (host_start >= url.size()) {
    raise(ErrorCode::InvalidConfig, "endpoint URL '" + url + "' has no host");
  }
  const auto path_start = url.find('/', host_start);
  ParsedUrl parsed;
  if (path_start == std::string::npos) {
    parsed.base = url;
    parsed.path = "/";
  } else {
    parsed.base = url.substr(0, path_start);
    parsed.path = url.substr(path_start);
  }
  if (parsed.base.size() == host_start) {
    raise(ErrorCode::InvalidConfig, "endpoint URL '" + url + "' has no host");
  }
  return parsed;
}

}  // namespace oclrag::internal
