#pragma once

#include <string>

namespace tweetlab {

// Porter suffix stripping. Expects a lowercase alphabetic token; anything
// containing a non-alphabetic character is returned unchanged.
std::string porter_stem(const std::string& token);

}  // namespace tweetlab
