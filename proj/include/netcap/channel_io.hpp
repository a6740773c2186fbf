// Channel file format (JSON syntax):
//   {"name": str, "role": "p2p"|"bc"|"mac"|"ic",
//    "inputs": [[labels]...], "outputs": [[labels]...],
//    "matrix": [[row]...]}            rows indexed input-tuple-major,
//                                     columns output-tuple-major
//   {"role":"gaussian_bc","P":..,"a1":..,"a2":..,"N1":..,"N2":..,"rho":..}
//   {"role":"gaussian_mac","P1":..,"P2":..,"N":..}
// Rows whose mass deviates from 1 by more than 1e-9 are rejected; rows within
// 1e-9 but outside the construction tolerance are renormalized.
#pragma once

#include <string>
#include <variant>

#include "netcap/prob.hpp"

namespace netcap {

struct ParsedChannel {
    std::string name;
    std::variant<Dmc, GaussianChannelSpec> value;

    bool is_dmc() const { return std::holds_alternative<Dmc>(value); }
    const Dmc& dmc() const { return std::get<Dmc>(value); }
    const GaussianChannelSpec& gaussian() const { return std::get<GaussianChannelSpec>(value); }
};

inline constexpr double kRowParseTol = 1e-9;

ParsedChannel parse_channel_text(const std::string& text);
ParsedChannel load_channel_file(const std::string& path);

std::string serialize_channel(const Dmc& dmc);
std::string serialize_channel(const GaussianChannelSpec& spec);

}  // namespace netcap
