#pragma once

// JSON output with every float written to 17 significant digits. Non-finite
// floats become the strings "inf", "-inf" and "nan".

#include <complex>
#include <filesystem>
#include <json.hpp>
#include <string>

#include "symbolkit/triplet.hpp"

namespace symbolkit {

using Json = nlohmann::ordered_json;

std::string dump_json(const Json& j, int indent = 2);
void write_json_file(const std::filesystem::path& path, const Json& j);

Json to_json(const Vec& v);
Json to_json(const Mat& m);
Json complex_json(std::complex<double> z);
/// Float that may be infinite (stored as a string when it is).
Json number_json(double v);

}  // namespace symbolkit
