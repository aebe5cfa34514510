#pragma once

#include <chrono>
#include <string>

namespace satdebias::detail {

struct HttpResult {
  int status = 0;  // 0: no response
  std::string body;
  std::string error;
};

/// POSTs a JSON body to base_url + path. `base_url` may carry a path prefix
/// (https://host/v1). Never throws for transport failures.
HttpResult post_json(const std::string& base_url, const std::string& path, const std::string& body,
                     const std::string& bearer_token, std::chrono::seconds timeout);

}  // namespace satdebias::detail
