#ifndef DEEPLCP_DEFAULTS_HPP
#define DEEPLCP_DEFAULTS_HPP

#include <string_view>

namespace deeplcp {

// Contents of the shipped data/ files, compiled into the library.
std::string_view default_schema_text();
std::string_view default_rules_text();
std::string_view default_cleaning_text();
std::string_view benchmark_synth_text();

}  // namespace deeplcp

#endif  // DEEPLCP_DEFAULTS_HPP
