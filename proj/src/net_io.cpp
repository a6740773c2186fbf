#include "netcap/net_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "netcap/errors.hpp"

namespace netcap {

using nlohmann::ordered_json;

static ordered_json cap_to_json(const Cap& c) {
    if (c.is_inf) return "inf";
    if (std::isnan(c.value)) throw ParseError("serialize: NaN capacity");
    return c.value;
}

static Cap cap_from_json(const ordered_json& j, const char* what) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return Cap::inf();
        throw ParseError(std::string(what) + ": \"inf\" is the only accepted textual value");
    }
    if (!j.is_number()) throw ParseError(std::string(what) + ": expected number or \"inf\"");
    const double v = j.get<double>();
    if (std::isnan(v)) throw ParseError(std::string(what) + ": NaN is not a value");
    if (std::isinf(v)) throw ParseError(std::string(what) + ": use \"inf\", not an IEEE infinity");
    if (v < 0.0) throw ParseError(std::string(what) + ": negative capacity");
    return Cap(v);
}

static std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------

std::string serialize_model(const ModelFile& mf) {
    ordered_json j;
    j["channel"] = mf.channel_id;
    j["side"] = mf.side;
    ordered_json rates = ordered_json::array();
    for (const auto& [k, cap] : mf.rates.entries) {
        ordered_json e;
        e["A"] = k.a;
        e["B"] = k.b;
        e["rate"] = cap_to_json(cap);
        rates.push_back(std::move(e));
    }
    j["rates"] = std::move(rates);
    ordered_json meta;
    meta["v1"] = mf.geometry.v1;
    meta["v2"] = mf.geometry.v2;
    ordered_json feeds = ordered_json::array();
    for (const Cap& f : mf.geometry.feeds) feeds.push_back(cap_to_json(f));
    meta["feeds"] = std::move(feeds);
    meta["slack"] = mf.slack;
    meta["notes"] = mf.notes;
    j["meta"] = std::move(meta);
    return j.dump(2);
}

ModelFile parse_model_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("model: invalid JSON: ") + e.what());
    }
    ModelFile mf;
    mf.channel_id = j.value("channel", std::string());
    mf.side = j.value("side", std::string("lower"));
    if (mf.side != "lower" && mf.side != "upper")
        throw ParseError("model: side must be \"lower\" or \"upper\"");
    if (!j.contains("rates") || !j["rates"].is_array())
        throw ParseError("model: missing \"rates\" array");
    for (const auto& e : j["rates"]) {
        std::vector<int> a = e.at("A").get<std::vector<int>>();
        std::vector<int> b = e.at("B").get<std::vector<int>>();
        mf.rates.set(std::move(a), std::move(b), cap_from_json(e.at("rate"), "model rate"));
    }
    if (!j.contains("meta"))
        throw ParseError("model: missing \"meta\" (v1/v2/feeds needed to rebuild the graph)");
    const auto& meta = j["meta"];
    mf.geometry.id = mf.channel_id;
    mf.geometry.v1 = meta.at("v1").get<std::vector<int>>();
    mf.geometry.v2 = meta.at("v2").get<std::vector<int>>();
    for (const auto& f : meta.at("feeds")) mf.geometry.feeds.push_back(cap_from_json(f, "feed"));
    if (mf.geometry.feeds.size() != mf.geometry.v1.size())
        throw ParseError("model: feeds must match v1");
    mf.slack = meta.value("slack", 0.0);
    if (meta.contains("notes")) mf.notes = meta["notes"].get<std::vector<std::string>>();
    return mf;
}

ModelFile load_model_file(const std::string& path) { return parse_model_text(read_file(path)); }

// ---------------------------------------------------------------------------
// Network files
// ---------------------------------------------------------------------------

static std::string resolve(const std::string& base_dir, const std::string& ref) {
    namespace fs = std::filesystem;
    fs::path p(ref);
    if (p.is_absolute() || base_dir.empty()) return ref;
    return (fs::path(base_dir) / p).string();
}

Network parse_network_text(const std::string& text, const std::string& base_dir) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("network: invalid JSON: ") + e.what());
    }
    Network net;
    net.node_count = j.at("nodes").get<int>();
    if (!j.contains("components") || !j["components"].is_array())
        throw ParseError("network: missing \"components\"");

    std::size_t index = 0;
    for (const auto& c : j["components"]) {
        ++index;
        if (c.contains("bitpipe")) {
            const auto& b = c["bitpipe"];
            PipeComponent p;
            p.from = b.at("from").get<int>();
            p.to = b.at("to").get<int>();
            p.cap = cap_from_json(b.at("cap"), "bitpipe cap");
            net.components.push_back(p);
        } else if (c.contains("model")) {
            ModelFile mf = c["model"].is_string()
                               ? load_model_file(resolve(base_dir, c["model"].get<std::string>()))
                               : parse_model_text(c["model"].dump());
            net.components.push_back(ModelComponent{build_model(mf.geometry, mf.rates)});
        } else if (c.contains("ref")) {
            ParsedChannel pc = c["ref"].is_string()
                                   ? load_channel_file(resolve(base_dir, c["ref"].get<std::string>()))
                                   : parse_channel_text(c["ref"].dump());
            NoisyComponent n;
            n.v1 = c.at("V1").get<std::vector<int>>();
            n.v2 = c.at("V2").get<std::vector<int>>();
            n.id = c.value("id", pc.name.empty() ? "ch" + std::to_string(index) : pc.name);
            n.channel = std::move(pc);
            net.components.push_back(std::move(n));
        } else {
            throw ParseError("network: component " + std::to_string(index) +
                             " must contain \"ref\", \"bitpipe\", or \"model\"");
        }
    }

    if (j.contains("demands")) {
        for (const auto& d : j["demands"]) {
            if (d.contains("unicast")) {
                const auto& u = d["unicast"];
                net.demands.push_back(UnicastDemand{u.at("from").get<int>(),
                                                    u.at("to").get<int>(),
                                                    u.value("rate", 0.0)});
            } else if (d.contains("multicast")) {
                const auto& m = d["multicast"];
                net.demands.push_back(MulticastDemand{m.at("from").get<int>(),
                                                      m.at("sinks").get<std::vector<int>>(),
                                                      m.value("rate", 0.0)});
            } else {
                throw ParseError("network: demand must be \"unicast\" or \"multicast\"");
            }
        }
    }
    net.validate();
    return net;
}

Network load_network_file(const std::string& path) {
    namespace fs = std::filesystem;
    return parse_network_text(read_file(path), fs::path(path).parent_path().string());
}

}  // namespace netcap
