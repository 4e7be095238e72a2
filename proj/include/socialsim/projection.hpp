#pragma once

// What a client may see of a session. The observable projection carries
// only public facts: cast, traits, statuses, relationships, the pending
// prompt and scene lines. The debug projection adds everything else.

#include <cstddef>
#include <string_view>
#include <vector>

#include "socialsim/session.hpp"

namespace socialsim {

Json observable_projection(const Session& session, std::size_t recent_lines = 20);

Json debug_projection(const Session& session);

/// Keys that must never appear in a non-debug response.
inline constexpr std::string_view kPrivateKeys[] = {
    "value", "goal", "belief", "likes", "dislikes", "volition", "total",
    "contributions", "score", "delta", "updates", "entries", "changes", "orientation",
};

/// Every private key found anywhere inside `j` (object keys, recursively).
std::vector<std::string> find_private_keys(const Json& j);

}  // namespace socialsim
