#pragma once

#include <string_view>

// Tables under data/ compiled into the library.
namespace seqforge::data {

std::string_view hydropathy_kyte_doolittle();
std::string_view monoisotopic_masses();
std::string_view digest_rules();

} // namespace seqforge::data
