#pragma once

#include <string>
#include <string_view>

namespace ocean {

// Porter suffix-stripping stemmer (the 1980 published rule set).
// Input is expected lowercase; words shorter than 3 letters pass through.
std::string porter_stem(std::string_view word);

} // namespace ocean
