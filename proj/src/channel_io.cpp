#include "netcap/channel_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "netcap/errors.hpp"

namespace netcap {

using nlohmann::ordered_json;

static ChannelRole role_from_string(const std::string& s) {
    if (s == "p2p") return ChannelRole::P2P;
    if (s == "bc") return ChannelRole::BC2;
    if (s == "mac") return ChannelRole::MAC2;
    if (s == "ic") return ChannelRole::IC22;
    throw ParseError("channel: unknown role \"" + s + "\"");
}

static std::vector<std::vector<std::string>> parse_alphabets(const ordered_json& j,
                                                             const char* key) {
    if (!j.contains(key) || !j[key].is_array())
        throw ParseError(std::string("channel: missing \"") + key + "\" array");
    std::vector<std::vector<std::string>> out;
    for (const auto& alpha : j[key]) {
        if (!alpha.is_array() || alpha.empty())
            throw ParseError(std::string("channel: each entry of \"") + key +
                             "\" must be a nonempty label array");
        std::vector<std::string> labels;
        for (const auto& l : alpha) {
            if (l.is_string()) labels.push_back(l.get<std::string>());
            else labels.push_back(l.dump());
        }
        out.push_back(std::move(labels));
    }
    return out;
}

ParsedChannel parse_channel_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("channel: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("channel: top level must be an object");
    if (!j.contains("role")) throw ParseError("channel: missing \"role\"");
    const std::string role = j["role"].get<std::string>();
    const std::string name = j.value("name", std::string());

    if (role == "gaussian_bc") {
        auto spec = GaussianChannelSpec::bc(j.at("P").get<double>(), j.at("a1").get<double>(),
                                            j.at("a2").get<double>(), j.at("N1").get<double>(),
                                            j.at("N2").get<double>(), j.at("rho").get<double>(),
                                            name);
        return ParsedChannel{name, spec};
    }
    if (role == "gaussian_mac") {
        auto spec = GaussianChannelSpec::mac(j.at("P1").get<double>(), j.at("P2").get<double>(),
                                             j.at("N").get<double>(), name);
        return ParsedChannel{name, spec};
    }

    const ChannelRole r = role_from_string(role);
    auto inputs = parse_alphabets(j, "inputs");
    auto outputs = parse_alphabets(j, "outputs");

    std::size_t in_size = 1, out_size = 1;
    for (const auto& a : inputs) in_size *= a.size();
    for (const auto& a : outputs) out_size *= a.size();

    if (!j.contains("matrix") || !j["matrix"].is_array())
        throw ParseError("channel: missing \"matrix\"");
    const auto& m = j["matrix"];
    if (m.size() != in_size)
        throw ParseError("channel: matrix has " + std::to_string(m.size()) + " rows, expected " +
                         std::to_string(in_size));

    std::vector<double> t;
    t.reserve(in_size * out_size);
    for (std::size_t i = 0; i < in_size; ++i) {
        const auto& row = m[i];
        if (!row.is_array() || row.size() != out_size)
            throw ParseError("channel: matrix row " + std::to_string(i) + " has wrong length");
        double sum = 0.0;
        std::vector<double> vals;
        vals.reserve(out_size);
        for (const auto& v : row) {
            if (!v.is_number()) throw ParseError("channel: non-numeric entry in matrix row " +
                                                 std::to_string(i));
            const double x = v.get<double>();
            if (x < 0.0) throw ParseError("channel: negative entry in matrix row " +
                                          std::to_string(i));
            vals.push_back(x);
            sum += x;
        }
        if (std::abs(sum - 1.0) > kRowParseTol)
            throw ParseError("channel: matrix row " + std::to_string(i) + " sums to " +
                             std::to_string(sum) + " (tolerance 1e-9)");
        // Keep exact bits when already within the construction tolerance so a
        // serialize/parse cycle is lossless; otherwise renormalize.
        if (std::abs(sum - 1.0) > kProbSumTol)
            for (double& x : vals) x /= sum;
        t.insert(t.end(), vals.begin(), vals.end());
    }
    Dmc dmc(r, std::move(inputs), std::move(outputs), std::move(t), name);
    return ParsedChannel{name, std::move(dmc)};
}

ParsedChannel load_channel_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("channel: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_channel_text(ss.str());
}

std::string serialize_channel(const Dmc& dmc) {
    ordered_json j;
    j["name"] = dmc.name;
    j["role"] = role_name(dmc.role);
    j["inputs"] = dmc.input_alphabets;
    j["outputs"] = dmc.output_alphabets;
    ordered_json m = ordered_json::array();
    const std::size_t no = dmc.out_size();
    for (std::size_t i = 0; i < dmc.in_size(); ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t k = 0; k < no; ++k) row.push_back(dmc.p(i, k));
        m.push_back(std::move(row));
    }
    j["matrix"] = std::move(m);
    return j.dump(2);
}

std::string serialize_channel(const GaussianChannelSpec& spec) {
    ordered_json j;
    if (!spec.name.empty()) j["name"] = spec.name;
    if (spec.kind == GaussianChannelSpec::Kind::BC) {
        j["role"] = "gaussian_bc";
        j["P"] = spec.P; j["a1"] = spec.a1; j["a2"] = spec.a2;
        j["N1"] = spec.N1; j["N2"] = spec.N2; j["rho"] = spec.rho;
    } else {
        j["role"] = "gaussian_mac";
        j["P1"] = spec.P1; j["P2"] = spec.P2; j["N"] = spec.N;
    }
    return j.dump(2);
}

}  // namespace netcap
