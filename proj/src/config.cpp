#include "tfmm/config.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "tfmm/io.hpp"

namespace tfmm {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw std::invalid_argument(where + ": expected an object");
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            throw std::invalid_argument(where + ": unknown key '" + item.key() + "'");
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw std::invalid_argument(where + ": missing key '" + key + "'");
    if (!obj.at(key).is_number()) throw std::invalid_argument(where + "." + key + ": expected a number");
    return obj.at(key).get<double>();
}

std::vector<double> get_vector(const json& v, const std::string& where) {
    if (!v.is_array()) throw std::invalid_argument(where + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw std::invalid_argument(where + ": expected numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

// Scalars broadcast to one entry per token.
std::vector<double> number_or_vector(const json& v, std::size_t n, const std::string& where) {
    if (v.is_number()) return std::vector<double>(n, v.get<double>());
    auto vec = get_vector(v, where);
    if (vec.size() != n)
        throw std::invalid_argument(where + ": expected " + std::to_string(n) + " entries");
    return vec;
}

PerBlockSeries parse_series(const json& v, const std::string& where) {
    if (v.is_number()) return PerBlockSeries(v.get<double>());
    return PerBlockSeries(get_vector(v, where));
}

GasModel parse_gas(const json& obj, const std::string& where) {
    check_keys(obj, {"base_fee_gwei", "gas_units", "eth_price_usd", "markup"}, where);
    GasModel gas;
    if (obj.contains("base_fee_gwei"))
        gas.base_fee_gwei = parse_series(obj.at("base_fee_gwei"), where + ".base_fee_gwei");
    if (obj.contains("gas_units"))
        gas.gas_units = static_cast<std::int64_t>(get_number(obj, "gas_units", where));
    if (obj.contains("eth_price_usd"))
        gas.eth_price_usd = parse_series(obj.at("eth_price_usd"), where + ".eth_price_usd");
    if (obj.contains("markup")) gas.markup = get_number(obj, "markup", where);
    gas.validate();
    return gas;
}

PoolState parse_pool(const json& obj) {
    check_keys(obj,
               {"token_ids", "reserves", "weights", "swap_fee_rate", "protocol_fee_share",
                "fee_side"},
               "simulate.pool");
    std::vector<std::string> ids;
    if (obj.contains("token_ids"))
        for (const auto& t : obj.at("token_ids")) ids.push_back(t.get<std::string>());
    const auto reserves = get_vector(obj.at("reserves"), "simulate.pool.reserves");
    const auto weights = get_vector(obj.at("weights"), "simulate.pool.weights");
    const double fee = obj.contains("swap_fee_rate") ? get_number(obj, "swap_fee_rate", "simulate.pool") : 0.0;
    const double share =
        obj.contains("protocol_fee_share") ? get_number(obj, "protocol_fee_share", "simulate.pool") : 0.5;
    FeeSide side = FeeSide::Input;
    if (obj.contains("fee_side")) {
        const std::string s = obj.at("fee_side").get<std::string>();
        if (s == "input") side = FeeSide::Input;
        else if (s == "output") side = FeeSide::Output;
        else throw std::invalid_argument("simulate.pool.fee_side: expected 'input' or 'output'");
    }
    return PoolState(reserves, weights, fee, share, ids, side);
}

WeightTrajectory parse_trajectory(const json& obj, const std::vector<double>& pool_weights) {
    check_keys(obj, {"initial_weights", "updates"}, "simulate.trajectory");
    std::vector<double> initial = pool_weights;
    if (obj.contains("initial_weights"))
        initial = get_vector(obj.at("initial_weights"), "simulate.trajectory.initial_weights");
    std::vector<WeightUpdate> updates;
    if (obj.contains("updates")) {
        for (const auto& u : obj.at("updates")) {
            check_keys(u, {"activation_block", "target_weights", "interpolation_blocks"},
                       "simulate.trajectory.updates[]");
            WeightUpdate up;
            up.activation_block =
                static_cast<std::int64_t>(get_number(u, "activation_block", "trajectory update"));
            up.target_weights = get_vector(u.at("target_weights"), "trajectory target_weights");
            up.interpolation_blocks = static_cast<std::int64_t>(
                get_number(u, "interpolation_blocks", "trajectory update"));
            updates.push_back(std::move(up));
        }
    }
    return WeightTrajectory(initial, std::move(updates));
}

std::vector<std::vector<double>> parse_price_file(const std::string& path, std::size_t n) {
    const std::string content = read_file(path);
    std::vector<std::vector<double>> series;
    std::size_t pos = 0, line_no = 0;
    while (pos < content.size()) {
        std::size_t end = content.find('\n', pos);
        if (end == std::string::npos) end = content.size();
        std::string line = content.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("price_0", 0) == 0) continue; // optional header
        std::vector<double> row;
        std::size_t p = 0;
        while (p <= line.size()) {
            std::size_t comma = line.find(',', p);
            if (comma == std::string::npos) comma = line.size();
            row.push_back(std::stod(line.substr(p, comma - p)));
            p = comma + 1;
        }
        if (row.size() != n)
            throw std::invalid_argument("price file line " + std::to_string(line_no) +
                                        ": expected " + std::to_string(n) + " prices");
        series.push_back(std::move(row));
    }
    return series;
}

PriceProcess parse_prices(const json& obj, std::size_t n) {
    check_keys(obj, {"type", "drift", "vol", "series", "file"}, "simulate.prices");
    PriceProcess proc;
    const std::string type = obj.contains("type") ? obj.at("type").get<std::string>() : "constant";
    if (type == "constant") {
        proc.kind = PriceProcess::Kind::Constant;
    } else if (type == "gbm") {
        proc.kind = PriceProcess::Kind::GeometricBrownian;
        proc.drift = obj.contains("drift")
                         ? number_or_vector(obj.at("drift"), n, "simulate.prices.drift")
                         : std::vector<double>(n, 0.0);
        if (!obj.contains("vol"))
            throw std::invalid_argument("simulate.prices: gbm needs 'vol'");
        proc.vol = number_or_vector(obj.at("vol"), n, "simulate.prices.vol");
    } else if (type == "replay") {
        proc.kind = PriceProcess::Kind::Replay;
        if (obj.contains("series")) {
            for (const auto& row : obj.at("series"))
                proc.series.push_back(get_vector(row, "simulate.prices.series[]"));
        } else if (obj.contains("file")) {
            proc.series = parse_price_file(obj.at("file").get<std::string>(), n);
        } else {
            throw std::invalid_argument("simulate.prices: replay needs 'series' or 'file'");
        }
    } else {
        throw std::invalid_argument("simulate.prices.type: expected constant|gbm|replay");
    }
    return proc;
}

ClassifyParams parse_classify(const json& obj, const std::string& where) {
    check_keys(obj, {"incidental_cutoff_usd", "stale_opportunity_dust_usd"}, where);
    ClassifyParams params;
    if (obj.contains("incidental_cutoff_usd"))
        params.incidental_cutoff_usd = get_number(obj, "incidental_cutoff_usd", where);
    if (obj.contains("stale_opportunity_dust_usd"))
        params.stale_opportunity_dust_usd = get_number(obj, "stale_opportunity_dust_usd", where);
    return params;
}

ArbitrageurAgent parse_agent(const json& obj, std::size_t index) {
    const std::string where = "simulate.agents[" + std::to_string(index) + "]";
    check_keys(obj, {"kind", "id", "gas", "sizing", "size_grid", "notional_usd", "arrival_prob"},
               where);
    ArbitrageurAgent agent;
    const std::string kind = obj.at("kind").get<std::string>();
    if (obj.contains("id")) agent.id = obj.at("id").get<std::string>();
    if (kind == "standalone") {
        agent.kind = ArbitrageurAgent::Kind::StandaloneArb;
        if (obj.contains("gas")) agent.gas = parse_gas(obj.at("gas"), where + ".gas");
        if (obj.contains("sizing")) {
            const std::string s = obj.at("sizing").get<std::string>();
            if (s == "optimal") agent.sizing = SizingPolicy::Optimal;
            else if (s == "grid") agent.sizing = SizingPolicy::Grid;
            else throw std::invalid_argument(where + ".sizing: expected 'optimal' or 'grid'");
        }
        if (obj.contains("size_grid"))
            agent.size_grid = get_vector(obj.at("size_grid"), where + ".size_grid");
    } else if (kind == "router") {
        agent.kind = ArbitrageurAgent::Kind::IncidentalRouter;
        if (obj.contains("notional_usd")) {
            const auto range = get_vector(obj.at("notional_usd"), where + ".notional_usd");
            if (range.size() != 2)
                throw std::invalid_argument(where + ".notional_usd: expected [min, max]");
            agent.router_notional_min_usd = range[0];
            agent.router_notional_max_usd = range[1];
        }
        agent.router_arrival_prob = get_number(obj, "arrival_prob", where);
    } else {
        throw std::invalid_argument(where + ".kind: expected 'standalone' or 'router'");
    }
    return agent;
}

SimConfig parse_simulate(const json& obj) {
    check_keys(obj,
               {"pool", "initial_prices", "trajectory", "prices", "gas", "agents", "n_blocks",
                "block_time_seconds", "start_timestamp", "seed", "classify"},
               "simulate");
    SimConfig cfg;
    if (!obj.contains("pool")) throw std::invalid_argument("simulate: missing 'pool'");
    cfg.pool = parse_pool(obj.at("pool"));
    const std::size_t n = cfg.pool.size();
    if (!obj.contains("initial_prices")) throw std::invalid_argument("simulate: missing 'initial_prices'");
    cfg.initial_prices = PriceVector(get_vector(obj.at("initial_prices"), "simulate.initial_prices"));
    cfg.trajectory = obj.contains("trajectory") ? parse_trajectory(obj.at("trajectory"), cfg.pool.weights)
                                                : WeightTrajectory(cfg.pool.weights);
    if (obj.contains("prices")) cfg.price_process = parse_prices(obj.at("prices"), n);
    if (obj.contains("gas")) cfg.chain_gas = parse_gas(obj.at("gas"), "simulate.gas");
    if (obj.contains("agents")) {
        std::size_t idx = 0;
        for (const auto& a : obj.at("agents")) cfg.agents.push_back(parse_agent(a, idx++));
    }
    cfg.n_blocks = static_cast<std::int64_t>(get_number(obj, "n_blocks", "simulate"));
    if (obj.contains("block_time_seconds"))
        cfg.block_time_seconds = get_number(obj, "block_time_seconds", "simulate");
    if (obj.contains("start_timestamp"))
        cfg.start_timestamp = get_number(obj, "start_timestamp", "simulate");
    if (obj.contains("seed"))
        cfg.seed = static_cast<std::uint64_t>(get_number(obj, "seed", "simulate"));
    if (obj.contains("classify"))
        cfg.classify = parse_classify(obj.at("classify"), "simulate.classify");
    cfg.validate();
    return cfg;
}

AnalyzerParams parse_analyze(const json& obj) {
    check_keys(obj,
               {"swap_fee_rate", "protocol_fee_share", "dust_tolerance_rel", "gas_units", "markup",
                "classify", "include_price_driven_in_efficiency", "markout_blocks", "workers"},
               "analyze");
    AnalyzerParams params;
    if (obj.contains("swap_fee_rate")) params.swap_fee_rate = get_number(obj, "swap_fee_rate", "analyze");
    if (obj.contains("protocol_fee_share"))
        params.protocol_fee_share = get_number(obj, "protocol_fee_share", "analyze");
    if (obj.contains("dust_tolerance_rel"))
        params.dust_tolerance_rel = get_number(obj, "dust_tolerance_rel", "analyze");
    if (obj.contains("gas_units"))
        params.gas_units = static_cast<std::int64_t>(get_number(obj, "gas_units", "analyze"));
    if (obj.contains("markup")) params.markup = get_number(obj, "markup", "analyze");
    if (obj.contains("classify")) params.classify = parse_classify(obj.at("classify"), "analyze.classify");
    if (obj.contains("include_price_driven_in_efficiency"))
        params.include_price_driven_in_efficiency = obj.at("include_price_driven_in_efficiency").get<bool>();
    if (obj.contains("markout_blocks"))
        params.markout_blocks = static_cast<std::int64_t>(get_number(obj, "markout_blocks", "analyze"));
    if (obj.contains("workers"))
        params.workers = static_cast<int>(get_number(obj, "workers", "analyze"));
    return params;
}

BenchmarkParams parse_benchmark(const json& obj) {
    check_keys(obj, {"commission_rate", "half_spread_rate", "rebalance_cadence_blocks"}, "benchmark");
    BenchmarkParams params;
    if (obj.contains("commission_rate"))
        params.commission_rate = get_number(obj, "commission_rate", "benchmark");
    if (obj.contains("half_spread_rate"))
        params.half_spread_rate = get_number(obj, "half_spread_rate", "benchmark");
    if (obj.contains("rebalance_cadence_blocks"))
        params.rebalance_cadence_blocks =
            static_cast<std::int64_t>(get_number(obj, "rebalance_cadence_blocks", "benchmark"));
    params.validate();
    return params;
}

void deep_merge(json& base, const json& over) {
    if (!base.is_object() || !over.is_object()) {
        base = over;
        return;
    }
    for (const auto& item : over.items()) {
        if (base.contains(item.key()))
            deep_merge(base[item.key()], item.value());
        else
            base[item.key()] = item.value();
    }
}

} // namespace

std::vector<std::string> preset_names() { return {"july-mainnet", "jan-mainnet", "jan-base"}; }

nlohmann::json preset_config(const std::string& name) {
    json safe_haven_pool = {
        {"token_ids", {"BTC", "PAXG", "USDC"}},
        {"reserves", {0.85, 29.4, 100000.0}},
        {"weights", {0.34, 0.33, 0.33}},
        {"swap_fee_rate", 0.003},
        {"protocol_fee_share", 0.5},
    };
    json safe_haven_trajectory = {
        {"updates",
         {{{"activation_block", 1},
           {"target_weights", {0.3406, 0.3294, 0.33}},
           {"interpolation_blocks", 580}}}},
    };
    if (name == "july-mainnet") {
        return json{
            {"seed", 20250722},
            {"simulate",
             {{"pool", safe_haven_pool},
              {"initial_prices", {118000.0, 3400.0, 1.0}},
              {"trajectory", safe_haven_trajectory},
              {"prices", {{"type", "gbm"}, {"vol", {0.001, 0.0005, 0.0}}}},
              {"gas",
               {{"base_fee_gwei", 0.55}, {"gas_units", 450000}, {"eth_price_usd", 3000.0}, {"markup", 1.5}}},
              {"agents", {{{"kind", "standalone"}, {"id", "searcher_0"}}}},
              {"n_blocks", 606},
              {"block_time_seconds", 12}}},
        };
    }
    if (name == "jan-mainnet") {
        return json{
            {"seed", 20260108},
            {"simulate",
             {{"pool", safe_haven_pool},
              {"initial_prices", {118000.0, 3400.0, 1.0}},
              {"trajectory", safe_haven_trajectory},
              {"prices", {{"type", "gbm"}, {"vol", {0.001, 0.0005, 0.0}}}},
              {"gas",
               {{"base_fee_gwei", 0.047}, {"gas_units", 450000}, {"eth_price_usd", 3000.0}, {"markup", 1.5}}},
              {"agents", {{{"kind", "standalone"}, {"id", "searcher_0"}}}},
              {"n_blocks", 591},
              {"block_time_seconds", 12}}},
        };
    }
    if (name == "jan-base") {
        return json{
            {"seed", 20260114},
            {"simulate",
             {{"pool",
               {{"token_ids", {"AERO", "BTC", "ETH", "USDC"}},
                {"reserves", {15625.0, 0.106, 4.1667, 12500.0}},
                {"weights", {0.25, 0.25, 0.25, 0.25}},
                {"swap_fee_rate", 0.003},
                {"protocol_fee_share", 0.5}}},
              {"initial_prices", {0.8, 118000.0, 3000.0, 1.0}},
              {"trajectory",
               {{"updates",
                 {{{"activation_block", 1},
                   {"target_weights", {0.252, 0.25, 0.25, 0.248}},
                   {"interpolation_blocks", 3500}}}}}},
              {"prices", {{"type", "gbm"}, {"vol", {0.0004, 0.0002, 0.0002, 0.0}}}},
              {"gas",
               {{"base_fee_gwei", 0.01}, {"gas_units", 450000}, {"eth_price_usd", 3000.0}, {"markup", 1.5}}},
              {"agents",
               {{{"kind", "standalone"}, {"id", "searcher_0"}},
                {{"kind", "router"},
                 {"id", "router_0"},
                 {"notional_usd", {20.0, 80.0}},
                 {"arrival_prob", 0.056}}}},
              {"n_blocks", 3600},
              {"block_time_seconds", 2}}},
        };
    }
    throw std::invalid_argument("unknown preset '" + name + "' (expected july-mainnet, jan-mainnet or jan-base)");
}

RunConfig parse_run_config(const nlohmann::json& input) {
    json j = input;
    if (j.contains("preset")) {
        json base = preset_config(j.at("preset").get<std::string>());
        j.erase("preset");
        deep_merge(base, j);
        j = std::move(base);
    }
    check_keys(j, {"seed", "simulate", "analyze", "benchmark", "sweep"}, "config");

    RunConfig cfg;
    if (j.contains("simulate")) {
        json sim = j.at("simulate");
        if (j.contains("seed") && !sim.contains("seed")) sim["seed"] = j.at("seed");
        cfg.simulate = parse_simulate(sim);
        cfg.has_simulate = true;
    }
    if (j.contains("analyze")) cfg.analyze = parse_analyze(j.at("analyze"));
    if (j.contains("benchmark")) cfg.benchmark = parse_benchmark(j.at("benchmark"));
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        check_keys(s, {"parameter", "values"}, "sweep");
        cfg.sweep.parameter = s.at("parameter").get<std::string>();
        cfg.sweep.values = get_vector(s.at("values"), "sweep.values");
        if (cfg.sweep.values.empty()) throw std::invalid_argument("sweep.values must be non-empty");
        cfg.has_sweep = true;
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config " + path + ": " + e.what());
    }
    return parse_run_config(j);
}

SimConfig apply_sweep_point(const SimConfig& base, const std::string& parameter, double value) {
    SimConfig cfg = base;
    if (parameter == "n_steps") {
        const auto steps = static_cast<std::int64_t>(value);
        if (steps < 1) throw std::invalid_argument("sweep n_steps must be >= 1");
        std::vector<WeightUpdate> updates = base.trajectory.updates();
        for (auto& u : updates) u.interpolation_blocks = steps;
        cfg.trajectory = WeightTrajectory(base.trajectory.initial_weights(), std::move(updates));
    } else if (parameter == "markup") {
        cfg.chain_gas.markup = value;
        for (auto& agent : cfg.agents)
            if (agent.gas) agent.gas->markup = value;
    } else if (parameter == "base_fee_gwei") {
        cfg.chain_gas.base_fee_gwei = PerBlockSeries(value);
        for (auto& agent : cfg.agents)
            if (agent.gas) agent.gas->base_fee_gwei = PerBlockSeries(value);
    } else if (parameter == "swap_fee_rate") {
        cfg.pool.swap_fee_rate = value;
    } else if (parameter == "vol_scale") {
        if (cfg.price_process.kind != PriceProcess::Kind::GeometricBrownian)
            throw std::invalid_argument("vol_scale sweep needs a gbm price process");
        for (auto& v : cfg.price_process.vol) v *= value;
    } else {
        throw std::invalid_argument("unknown sweep parameter '" + parameter + "'");
    }
    return cfg;
}

} // namespace tfmm
