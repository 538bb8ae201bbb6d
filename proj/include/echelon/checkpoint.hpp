#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "echelon/errors.hpp"
#include "echelon/features.hpp"
#include "echelon/forecast.hpp"
#include "echelon/gbt.hpp"
#include "echelon/linalg.hpp"
#include "echelon/lnn.hpp"

namespace echelon::checkpoint {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

// ===== Matrices =====

inline json matrix_to_json(const linalg::Matrix& m) {
    return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

inline linalg::Matrix matrix_from_json(const json& j) {
    linalg::Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    j.at("data").get_to(m.data);
    if (m.data.size() != m.rows * m.cols) throw ConfigError("checkpoint matrix shape mismatch");
    return m;
}

// ===== LNN =====

inline json lnn_to_json(const lnn::LnnParams& p) {
    json j;
    j["version"] = kFormatVersion;
    j["n_neurons"] = p.n_neurons;
    j["alpha_base"] = p.alpha_base;
    j["kappa"] = p.kappa;
    j["tau"] = p.tau;
    j["dt"] = p.dt;
    j["w_in"] = matrix_to_json(p.w_in);
    j["w_rec"] = matrix_to_json(p.w_rec);
    j["bias"] = p.bias;
    j["w_out"] = matrix_to_json(p.w_out);
    j["bias_out"] = p.bias_out;
    return j;
}

inline lnn::LnnParams lnn_from_json(const json& j) {
    if (j.at("version").get<int>() != kFormatVersion) throw ConfigError("unsupported lnn checkpoint version");
    lnn::LnnParams p;
    p.n_neurons = j.at("n_neurons").get<std::size_t>();
    p.alpha_base = j.at("alpha_base").get<double>();
    p.kappa = j.at("kappa").get<double>();
    p.tau = j.at("tau").get<double>();
    p.dt = j.at("dt").get<double>();
    p.w_in = matrix_from_json(j.at("w_in"));
    p.w_rec = matrix_from_json(j.at("w_rec"));
    j.at("bias").get_to(p.bias);
    p.w_out = matrix_from_json(j.at("w_out"));
    j.at("bias_out").get_to(p.bias_out);
    p.validate();
    return p;
}

// ===== Trees =====

// Nodes serialize as flat [feature, threshold, value, left, right] rows.
inline json tree_to_json(const gbt::Tree& t) {
    json nodes = json::array();
    for (const auto& nd : t.nodes) nodes.push_back(json::array({nd.feature, nd.threshold, nd.value, nd.left, nd.right}));
    return json{{"nodes", nodes}};
}

inline gbt::Tree tree_from_json(const json& j) {
    gbt::Tree t;
    for (const auto& row : j.at("nodes")) {
        gbt::TreeNode nd;
        nd.feature = row.at(0).get<std::int32_t>();
        nd.threshold = row.at(1).get<double>();
        nd.value = row.at(2).get<double>();
        nd.left = row.at(3).get<std::int32_t>();
        nd.right = row.at(4).get<std::int32_t>();
        t.nodes.push_back(nd);
    }
    if (t.nodes.empty()) throw ConfigError("checkpoint tree has no nodes");
    return t;
}

inline json ensemble_to_json(const gbt::Ensemble& e) {
    json trees = json::array();
    for (const auto& t : e.trees) trees.push_back(tree_to_json(t));
    return json{{"base_prediction", e.base_prediction},
                {"learning_rate", e.learning_rate},
                {"n_features", e.n_features},
                {"trees", trees}};
}

inline gbt::Ensemble ensemble_from_json(const json& j) {
    gbt::Ensemble e;
    e.base_prediction = j.at("base_prediction").get<double>();
    e.learning_rate = j.at("learning_rate").get<double>();
    e.n_features = j.at("n_features").get<std::size_t>();
    for (const auto& t : j.at("trees")) e.trees.push_back(tree_from_json(t));
    return e;
}

// ===== Scaler and forecaster =====

inline json scaler_to_json(const features::Scaler& s) {
    return json{{"min", s.min}, {"max", s.max}};
}

inline features::Scaler scaler_from_json(const json& j) {
    features::Scaler s;
    j.at("min").get_to(s.min);
    j.at("max").get_to(s.max);
    return s;
}

inline json forecaster_to_json(const forecast::Forecaster& f) {
    json j;
    j["version"] = kFormatVersion;
    j["kind"] = forecast::kind_name(f.kind);
    j["sma_window"] = f.sma_window;
    if (f.kind == forecast::Kind::hybrid) j["lnn"] = lnn_to_json(f.net);
    if (f.kind != forecast::Kind::sma) {
        json heads = json::array();
        for (const auto& h : f.heads) heads.push_back(ensemble_to_json(h));
        j["heads"] = heads;
    }
    return j;
}

inline forecast::Forecaster forecaster_from_json(const json& j) {
    if (j.at("version").get<int>() != kFormatVersion) throw ConfigError("unsupported forecaster checkpoint version");
    forecast::Forecaster f;
    f.kind = forecast::kind_from_name(j.at("kind").get<std::string>());
    f.sma_window = j.at("sma_window").get<std::size_t>();
    if (f.kind == forecast::Kind::hybrid) f.net = lnn_from_json(j.at("lnn"));
    if (f.kind != forecast::Kind::sma) {
        for (const auto& h : j.at("heads")) f.heads.push_back(ensemble_from_json(h));
        if (f.heads.size() != features::kForecastHorizon) throw ConfigError("checkpoint needs 7 forecast heads");
    }
    return f;
}

// ===== Files =====

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("'" + path + "': " + e.what());
    }
    return j;
}

}  // namespace echelon::checkpoint
