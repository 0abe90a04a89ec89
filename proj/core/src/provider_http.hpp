// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

#include "ramo/provider.hpp"

namespace ramo::detail {

/// POSTs a JSON body with bearer auth, retrying per endpoint.retry.
/// Returns the 2xx response body. Maps failures onto ProviderAuth,
/// ProviderRateLimit, ProviderTimeout or ProviderFailure.
std::string post_json(const ProviderEndpoint& endpoint, const std::string& body,
                      const std::string& api_key, std::string_view what);

}  // namespace ramo::detail
