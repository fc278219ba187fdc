#include "tieq/model_io.hpp"

#include <fstream>

#include "tieq/errors.hpp"

namespace tieq {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key, const std::string& at) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(at + "/" + key, "missing field");
    return j.at(key);
}

double require_number(const json& j, const char* key, const std::string& at) {
    const json& v = require(j, key, at);
    if (!v.is_number()) throw ConfigError(at + "/" + key, "expected a number");
    return v.get<double>();
}

std::vector<double> number_list(const json& v, const std::string& at) {
    if (!v.is_array()) throw ConfigError(at, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw ConfigError(at + "/" + std::to_string(i), "expected a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

Discount discount_from_json(const json& j, const std::string& at) {
    const json& fam = require(j, "family", at);
    if (!fam.is_string()) throw ConfigError(at + "/family", "expected a string");
    const std::string name = fam.get<std::string>();
    try {
        Discount base = [&]() {
            if (name == "exponential") {
                if (j.contains("factor")) return Discount::exponential_factor(require_number(j, "factor", at));
                return Discount::exponential_rate(require_number(j, "rate", at));
            }
            if (name == "quasi_hyperbolic")
                return Discount::quasi_hyperbolic(require_number(j, "beta", at),
                                                  require_number(j, "gamma", at));
            if (name == "exponential_mixture")
                return Discount::exponential_mixture(
                    number_list(require(j, "weights", at), at + "/weights"),
                    number_list(require(j, "rates", at), at + "/rates"));
            if (name == "generalized_hyperbolic")
                return Discount::generalized_hyperbolic(require_number(j, "k", at),
                                                        require_number(j, "gamma", at));
            if (name == "tabulated")
                return Discount::tabulated(number_list(require(j, "values", at), at + "/values"),
                                           require_number(j, "tail_bound", at));
            throw ConfigError(at + "/family", "unknown discount family '" + name + "'");
        }();
        if (j.contains("time_scale")) base = base.sampled(require_number(j, "time_scale", at));
        return base;
    } catch (const Precondition& e) {
        throw ConfigError(at, e.what());
    }
}

json discount_to_json(const Discount& d) {
    json j;
    switch (d.family()) {
    case Discount::Family::Exponential:
        j["family"] = "exponential";
        j["rate"] = d.param_a();
        break;
    case Discount::Family::QuasiHyperbolic:
        j["family"] = "quasi_hyperbolic";
        j["beta"] = d.param_a();
        j["gamma"] = d.param_b();
        break;
    case Discount::Family::ExponentialMixture:
        j["family"] = "exponential_mixture";
        j["weights"] = d.mixture_weights();
        j["rates"] = d.mixture_rates();
        break;
    case Discount::Family::GeneralizedHyperbolic:
        j["family"] = "generalized_hyperbolic";
        j["k"] = d.param_a();
        j["gamma"] = d.param_b();
        break;
    case Discount::Family::Tabulated:
        j["family"] = "tabulated";
        j["values"] = d.table();
        j["tail_bound"] = d.table_tail_bound();
        break;
    }
    if (d.time_scale() != 1.0) j["time_scale"] = d.time_scale();
    return j;
}

Tensor3 tensor_from_json(const json& v, const std::string& at) {
    if (!v.is_array() || v.empty()) throw ConfigError(at, "expected a [node][from][to] tensor");
    const auto nodes = static_cast<int>(v.size());
    const json& first = v[0];
    if (!first.is_array() || first.empty()) throw ConfigError(at + "/0", "expected a matrix");
    const auto from = static_cast<int>(first.size());
    const auto to = static_cast<int>(first[0].size());
    Tensor3 t(nodes, from, to);
    for (int k = 0; k < nodes; ++k) {
        const json& mat = v[k];
        if (!mat.is_array() || static_cast<int>(mat.size()) != from)
            throw ConfigError(at + "/" + std::to_string(k), "ragged tensor");
        for (int i = 0; i < from; ++i) {
            const json& row = mat[i];
            if (!row.is_array() || static_cast<int>(row.size()) != to)
                throw ConfigError(at + "/" + std::to_string(k) + "/" + std::to_string(i),
                                  "ragged tensor");
            for (int j = 0; j < to; ++j) {
                if (!row[j].is_number())
                    throw ConfigError(at + "/" + std::to_string(k) + "/" + std::to_string(i) + "/" +
                                          std::to_string(j),
                                      "expected a number");
                t(k, i, j) = row[j].get<double>();
            }
        }
    }
    return t;
}

json tensor_to_json(const Tensor3& t) {
    json v = json::array();
    for (int k = 0; k < t.n_nodes; ++k) {
        json mat = json::array();
        for (int i = 0; i < t.n_from; ++i) {
            json row = json::array();
            for (int j = 0; j < t.n_to; ++j) row.push_back(t(k, i, j));
            mat.push_back(std::move(row));
        }
        v.push_back(std::move(mat));
    }
    return v;
}

} // namespace

ModelSpec model_from_json(const json& j) {
    ModelSpec m;
    const json& states = require(j, "states", "");
    if (!states.is_number_integer() || states.get<long long>() < 1)
        throw ConfigError("/states", "expected a positive integer");
    m.states = states.get<int>();

    const json& action = require(j, "action", "");
    const json& bounds = require(action, "bounds", "/action");
    if (!bounds.is_array() || bounds.empty()) throw ConfigError("/action/bounds", "expected [[a,b],...]");
    std::vector<std::pair<double, double>> box;
    for (std::size_t mdim = 0; mdim < bounds.size(); ++mdim) {
        const json& pair = bounds[mdim];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
            throw ConfigError("/action/bounds/" + std::to_string(mdim), "expected [a, b]");
        box.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    const json& per_dim = require(action, "per_dim", "/action");
    if (!per_dim.is_number_integer()) throw ConfigError("/action/per_dim", "expected an integer");
    const bool vertices = action.value("include_vertices", false);
    try {
        m.grid = build_action_grid(box, per_dim.get<int>(), vertices);
    } catch (const Error& e) {
        throw ConfigError("/action", e.what());
    }

    const Discount discount = discount_from_json(require(j, "discount", ""), "/discount");

    const json& reward = require(j, "reward", "");
    const json& form = require(reward, "form", "/reward");
    if (form == "separable") {
        const json& g = require(reward, "g", "/reward");
        if (!g.is_array() || static_cast<int>(g.size()) != m.states)
            throw ConfigError("/reward/g", "expected one row per state");
        std::vector<std::vector<double>> table;
        for (std::size_t i = 0; i < g.size(); ++i)
            table.push_back(number_list(g[i], "/reward/g/" + std::to_string(i)));
        m.reward = RewardSpec::separable(discount, std::move(table));
    } else if (form == "general") {
        const json& values = require(reward, "values", "/reward");
        if (!values.is_array() || values.empty())
            throw ConfigError("/reward/values", "expected a [t][state][node] table");
        std::vector<std::vector<std::vector<double>>> cube;
        for (std::size_t t = 0; t < values.size(); ++t) {
            const json& slice = values[t];
            if (!slice.is_array()) throw ConfigError("/reward/values/" + std::to_string(t), "ragged");
            std::vector<std::vector<double>> mat;
            for (std::size_t i = 0; i < slice.size(); ++i)
                mat.push_back(number_list(slice[i], "/reward/values/" + std::to_string(t) + "/" +
                                                        std::to_string(i)));
            cube.push_back(std::move(mat));
        }
        m.reward = RewardSpec::general(discount, std::move(cube),
                                       require_number(reward, "tail_bound", "/reward"));
    } else {
        throw ConfigError("/reward/form", "expected 'separable' or 'general'");
    }

    const json& kernel = require(j, "kernel", "");
    const json& type = require(kernel, "type", "/kernel");
    Tensor3 data = tensor_from_json(require(kernel, "data", "/kernel"), "/kernel/data");
    if (data.n_nodes != static_cast<int>(m.grid.size()) || data.n_from != m.states ||
        data.n_to != m.states)
        throw ConfigError("/kernel/data", "tensor shape does not match states and grid");
    if (type == "transition")
        m.transition = std::move(data);
    else if (type == "generator")
        m.generator = std::move(data);
    else
        throw ConfigError("/kernel/type", "expected 'transition' or 'generator'");

    if (j.contains("cone")) {
        const json& cone = j.at("cone");
        m.cone = ConeParams{require_number(cone, "iota", "/cone"), require_number(cone, "theta", "/cone")};
    }
    if (j.contains("lipschitz")) {
        if (!j.at("lipschitz").is_number()) throw ConfigError("/lipschitz", "expected a number");
        m.lipschitz = j.at("lipschitz").get<double>();
    }
    finalize_model(m);
    return m;
}

json model_to_json(const ModelSpec& model) {
    json j;
    j["states"] = model.states;
    json action;
    json bounds = json::array();
    for (const auto& [a, b] : model.grid.bounds) bounds.push_back(json::array({a, b}));
    action["bounds"] = std::move(bounds);
    action["per_dim"] = model.grid.per_dim;
    action["include_vertices"] = model.grid.includes_vertices;
    j["action"] = std::move(action);
    j["discount"] = discount_to_json(model.reward.discount());
    json reward;
    if (model.reward.separable_form()) {
        reward["form"] = "separable";
        reward["g"] = model.reward.g();
    } else {
        reward["form"] = "general";
        reward["values"] = model.reward.table();
        reward["tail_bound"] = model.reward.table_tail_bound();
    }
    j["reward"] = std::move(reward);
    json kernel;
    kernel["type"] = model.transition ? "transition" : "generator";
    kernel["data"] = tensor_to_json(model.kernel());
    j["kernel"] = std::move(kernel);
    if (model.cone) j["cone"] = {{"iota", model.cone->iota}, {"theta", model.cone->theta}};
    if (model.lipschitz) j["lipschitz"] = *model.lipschitz;
    return j;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return j;
}

ModelSpec load_model(const std::string& path) { return model_from_json(load_json_file(path)); }

void save_model(const ModelSpec& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << model_to_json(model).dump(2) << "\n";
}

} // namespace tieq
