// JSON file formats for bit-pipe models and networks.
//
// Model file:
//   {"channel": id, "side": "lower"|"upper",
//    "rates": [{"A":[i...], "B":[j...], "rate": number|"inf"}...],
//    "meta": {"v1":[...], "v2":[...], "feeds":[number|"inf"...],
//             "slack": number, "notes":[...]}}
//
// Network file:
//   {"nodes": m,
//    "components": [{"ref": path-or-inline-channel, "V1":[...], "V2":[...]},
//                   {"bitpipe": {"from": i, "to": j, "cap": number|"inf"}},
//                   {"model": path-or-inline-model}, ...],
//    "demands": [{"unicast": {"from":u, "to":v, "rate":r}},
//                {"multicast": {"from":u, "sinks":[...], "rate":r}}, ...]}
//
// "inf" is the only accepted textual infinity; NaN anywhere is an error.
#pragma once

#include <string>

#include "netcap/netgraph.hpp"

namespace netcap {

struct ModelFile {
    std::string channel_id;
    std::string side;  // "lower" or "upper"
    RateVector rates;
    ChannelGeometry geometry;  // from meta
    double slack = 0.0;
    std::vector<std::string> notes;
};

std::string serialize_model(const ModelFile& mf);
ModelFile parse_model_text(const std::string& text);
ModelFile load_model_file(const std::string& path);

// Networks; `base_dir` resolves relative "ref"/"model" paths.
Network parse_network_text(const std::string& text, const std::string& base_dir = "");
Network load_network_file(const std::string& path);

}  // namespace netcap
