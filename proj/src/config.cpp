#include "hetcache/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "hetcache/errors.hpp"

namespace hetcache {

namespace {

std::string indexed(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

void allow_keys(const YAML::Node& node, const std::string& path, std::initializer_list<const char*> keys) {
    if (!node.IsMap()) throw ValidationError(path, "expected a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; }))
            throw ValidationError(path.empty() ? key : path + "." + key, "unknown field");
    }
}

double as_double(const YAML::Node& node, const std::string& path) {
    try {
        return node.as<double>();
    } catch (const YAML::Exception&) {
        throw ValidationError(path, "expected a number");
    }
}

std::uint64_t as_u64(const YAML::Node& node, const std::string& path) {
    const double v = as_double(node, path);
    if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19) throw ValidationError(path, "expected a non-negative integer");
    try {
        return node.as<std::uint64_t>();
    } catch (const YAML::Exception&) {
        return static_cast<std::uint64_t>(v);
    }
}

std::string as_string(const YAML::Node& node, const std::string& path) {
    if (!node.IsScalar()) throw ValidationError(path, "expected a string");
    return node.as<std::string>();
}

bool as_bool(const YAML::Node& node, const std::string& path) {
    try {
        return node.as<bool>();
    } catch (const YAML::Exception&) {
        throw ValidationError(path, "expected true or false");
    }
}

std::vector<double> as_doubles(const YAML::Node& node, const std::string& path) {
    if (!node.IsSequence()) throw ValidationError(path, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < node.size(); ++i) out.push_back(as_double(node[i], indexed(path, i)));
    return out;
}

HcpInterference parse_hcp(const std::string& s) {
    if (s == "single-tier") return HcpInterference::SingleTier;
    if (s == "corrected") return HcpInterference::Corrected;
    throw ValidationError("hcp.interference", "expected single-tier or corrected, got '" + s + "'");
}

std::string hcp_name(HcpInterference v) { return v == HcpInterference::SingleTier ? "single-tier" : "corrected"; }

SamplingMode parse_mode(const std::string& s) {
    if (s == "stratified") return SamplingMode::Stratified;
    if (s == "direct") return SamplingMode::Direct;
    throw ValidationError("simulation.mode", "expected stratified or direct, got '" + s + "'");
}

FarField parse_far_field(const std::string& s) {
    if (s == "mean") return FarField::Mean;
    if (s == "none") return FarField::None;
    throw ValidationError("simulation.far_field", "expected mean or none, got '" + s + "'");
}

void parse_network(const YAML::Node& net, ExperimentConfig& cfg) {
    allow_keys(net, "network", {"path_loss_exponent", "base_density_per_km2", "tiers"});
    if (!net["path_loss_exponent"]) throw ValidationError("network.path_loss_exponent", "missing");
    cfg.path_loss_exponent = as_double(net["path_loss_exponent"], "network.path_loss_exponent");
    if (net["base_density_per_km2"])
        cfg.base_density_per_km2 = as_double(net["base_density_per_km2"], "network.base_density_per_km2");
    const YAML::Node tiers = net["tiers"];
    if (!tiers || !tiers.IsSequence()) throw ValidationError("network.tiers", "expected a list of tiers");
    for (std::size_t i = 0; i < tiers.size(); ++i) {
        const std::string path = indexed("network.tiers", i);
        const YAML::Node t = tiers[i];
        allow_keys(t, path, {"name", "power_dbm", "sir_db", "density_per_km2", "density_ratio", "cache_capacity"});
        TierSpec spec;
        spec.name = t["name"] ? as_string(t["name"], path + ".name") : "tier" + std::to_string(i + 1);
        for (const char* req : {"power_dbm", "sir_db", "cache_capacity"})
            if (!t[req]) throw ValidationError(path + "." + req, "missing");
        spec.power_dbm = as_double(t["power_dbm"], path + ".power_dbm");
        spec.sir_db = as_double(t["sir_db"], path + ".sir_db");
        spec.cache_capacity = as_double(t["cache_capacity"], path + ".cache_capacity");
        if (t["density_per_km2"]) spec.density_per_km2 = as_double(t["density_per_km2"], path + ".density_per_km2");
        if (t["density_ratio"]) spec.density_ratio = as_double(t["density_ratio"], path + ".density_ratio");
        cfg.tiers.push_back(std::move(spec));
    }
}

void parse_popularity(const YAML::Node& pop, ExperimentConfig& cfg) {
    allow_keys(pop, "popularity", {"zipf", "values"});
    if (pop["zipf"]) {
        const YAML::Node z = pop["zipf"];
        allow_keys(z, "popularity.zipf", {"num_files", "exponent"});
        if (!z["num_files"]) throw ValidationError("popularity.zipf.num_files", "missing");
        if (!z["exponent"]) throw ValidationError("popularity.zipf.exponent", "missing");
        ZipfParams zp;
        zp.num_files = static_cast<std::size_t>(as_u64(z["num_files"], "popularity.zipf.num_files"));
        zp.exponent = as_double(z["exponent"], "popularity.zipf.exponent");
        cfg.zipf = zp;
    }
    if (pop["values"]) cfg.popularity = as_doubles(pop["values"], "popularity.values");
}

void parse_simulation(const YAML::Node& s, ExperimentConfig& cfg) {
    allow_keys(s, "simulation",
               {"enabled", "trials", "seed", "region_radius_km", "mode", "far_field", "threads", "target_file"});
    SimulationSpec& sim = cfg.simulation;
    sim.enabled = s["enabled"] ? as_bool(s["enabled"], "simulation.enabled") : true;
    if (s["trials"]) sim.config.trials = as_u64(s["trials"], "simulation.trials");
    if (s["seed"]) sim.config.seed = as_u64(s["seed"], "simulation.seed");
    if (s["region_radius_km"]) sim.config.region_radius_km = as_double(s["region_radius_km"], "simulation.region_radius_km");
    if (s["mode"]) sim.config.mode = parse_mode(as_string(s["mode"], "simulation.mode"));
    if (s["far_field"]) sim.config.far_field = parse_far_field(as_string(s["far_field"], "simulation.far_field"));
    if (s["threads"]) sim.config.threads = static_cast<int>(as_u64(s["threads"], "simulation.threads"));
    if (s["target_file"]) sim.config.target_file = static_cast<std::size_t>(as_u64(s["target_file"], "simulation.target_file"));
}

void parse_sweep(const YAML::Node& s, ExperimentConfig& cfg) {
    allow_keys(s, "sweep", {"parameter", "values", "from", "to", "step"});
    SweepSpec sw;
    if (!s["parameter"]) throw ValidationError("sweep.parameter", "missing");
    sw.parameter = as_string(s["parameter"], "sweep.parameter");
    if (s["values"]) {
        if (s["from"] || s["to"] || s["step"]) throw ValidationError("sweep", "give either values or from/to/step");
        sw.values = as_doubles(s["values"], "sweep.values");
    } else {
        for (const char* req : {"from", "to", "step"})
            if (!s[req]) throw ValidationError(std::string("sweep.") + req, "missing");
        const double from = as_double(s["from"], "sweep.from");
        const double to = as_double(s["to"], "sweep.to");
        const double step = as_double(s["step"], "sweep.step");
        if (!(step > 0.0) || !(to >= from)) throw ValidationError("sweep.step", "need step > 0 and to >= from");
        // Values are from + i*step, so grids like 0.2, 0.4, ... do not accumulate drift.
        const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9));
        if (n > 100000) throw ValidationError("sweep.step", "too many sweep points");
        for (std::size_t i = 0; i <= n; ++i) sw.values.push_back(from + static_cast<double>(i) * step);
    }
    cfg.sweep = std::move(sw);
}

void parse_root(const YAML::Node& root, ExperimentConfig& cfg) {
    allow_keys(root, "",
               {"network", "popularity", "policy", "policies", "placement", "hcp", "reference", "sweep", "simulation",
                "latency", "output"});
    if (!root["network"]) throw ValidationError("network", "missing");
    parse_network(root["network"], cfg);
    if (!root["popularity"]) throw ValidationError("popularity", "missing");
    parse_popularity(root["popularity"], cfg);

    if (root["policy"] && root["policies"]) throw ValidationError("policies", "give either policy or policies");
    if (root["policy"]) cfg.policies.push_back(as_string(root["policy"], "policy"));
    if (root["policies"]) {
        const YAML::Node p = root["policies"];
        if (!p.IsSequence()) throw ValidationError("policies", "expected a list of policy names");
        for (std::size_t i = 0; i < p.size(); ++i) cfg.policies.push_back(as_string(p[i], indexed("policies", i)));
    }
    if (root["placement"]) {
        const YAML::Node p = root["placement"];
        if (!p.IsSequence()) throw ValidationError("placement", "expected a list of rows");
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < p.size(); ++i) rows.push_back(as_doubles(p[i], indexed("placement", i)));
        cfg.placement = std::move(rows);
    }
    if (root["hcp"]) {
        allow_keys(root["hcp"], "hcp", {"interference"});
        if (root["hcp"]["interference"])
            cfg.hcp_variant = parse_hcp(as_string(root["hcp"]["interference"], "hcp.interference"));
    }
    if (root["reference"]) {
        const YAML::Node r = root["reference"];
        allow_keys(r, "reference", {"seed", "restarts", "inner_iterations", "dual_sweeps", "dual_bisections",
                                    "polish_iterations"});
        if (r["seed"]) cfg.reference.seed = as_u64(r["seed"], "reference.seed");
        const auto as_int = [&](const char* key, int& out) {
            if (r[key]) out = static_cast<int>(as_u64(r[key], std::string("reference.") + key));
        };
        as_int("restarts", cfg.reference.restarts);
        as_int("inner_iterations", cfg.reference.inner_iterations);
        as_int("dual_sweeps", cfg.reference.dual_sweeps);
        as_int("dual_bisections", cfg.reference.dual_bisections);
        as_int("polish_iterations", cfg.reference.polish_iterations);
    }
    if (root["sweep"]) parse_sweep(root["sweep"], cfg);
    if (root["simulation"]) parse_simulation(root["simulation"], cfg);
    if (root["latency"]) {
        const YAML::Node l = root["latency"];
        allow_keys(l, "latency", {"bs_density_per_km2", "gateway_density_per_km2", "c1_ms", "c2_ms"});
        if (l["bs_density_per_km2"]) cfg.latency.bs_density = as_double(l["bs_density_per_km2"], "latency.bs_density_per_km2");
        if (l["gateway_density_per_km2"])
            cfg.latency.gateway_density = as_double(l["gateway_density_per_km2"], "latency.gateway_density_per_km2");
        if (l["c1_ms"]) cfg.latency.c1_ms = as_double(l["c1_ms"], "latency.c1_ms");
        if (l["c2_ms"]) cfg.latency.c2_ms = as_double(l["c2_ms"], "latency.c2_ms");
    }
    if (root["output"]) {
        const YAML::Node o = root["output"];
        allow_keys(o, "output", {"path", "format"});
        if (o["path"]) cfg.output_path = as_string(o["path"], "output.path");
        if (o["format"]) {
            try {
                cfg.output_format = parse_output_format(as_string(o["format"], "output.format"));
            } catch (const std::invalid_argument& e) {
                throw ValidationError("output.format", e.what());
            }
        }
    }
}

double tier_density(const ExperimentConfig& cfg, std::size_t i) {
    const TierSpec& t = cfg.tiers[i];
    if (t.density_per_km2) return *t.density_per_km2;
    return *cfg.base_density_per_km2 * *t.density_ratio;
}

std::size_t num_files(const ExperimentConfig& cfg) {
    if (cfg.zipf) return cfg.zipf->num_files;
    if (cfg.popularity) return cfg.popularity->size();
    return 0;
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

const std::vector<std::string>& known_policies() {
    static const std::vector<std::string> names{"tlcp-uniform", "tlcp-suboptimal", "tlcp-reference",
                                                "mpcp",         "hcp",             "explicit-matrix"};
    return names;
}

OutputFormat parse_output_format(const std::string& name) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    throw std::invalid_argument("unknown output format '" + name + "' (expected csv or json)");
}

std::string to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

ExperimentConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    if (!root || root.IsNull()) throw ParseError("config: empty document");
    ExperimentConfig cfg;
    parse_root(root, cfg);
    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate_config(const ExperimentConfig& cfg) {
    const double alpha = cfg.path_loss_exponent;
    if (!(alpha > 2.0) || !finite(alpha))
        throw ValidationError("network.path_loss_exponent", "must be finite and > 2 so that 2/alpha lies in (0, 1)");
    if (cfg.base_density_per_km2 && !(*cfg.base_density_per_km2 > 0.0 && finite(*cfg.base_density_per_km2)))
        throw ValidationError("network.base_density_per_km2", "must be positive");
    if (cfg.tiers.empty()) throw ValidationError("network.tiers", "at least one tier is required");

    if (cfg.zipf && cfg.popularity) throw ValidationError("popularity", "give exactly one of zipf or values");
    if (!cfg.zipf && !cfg.popularity) throw ValidationError("popularity", "missing popularity source");
    if (cfg.zipf) {
        if (cfg.zipf->num_files < 1) throw ValidationError("popularity.zipf.num_files", "must be >= 1");
        if (!(cfg.zipf->exponent >= 0.0) || !finite(cfg.zipf->exponent))
            throw ValidationError("popularity.zipf.exponent", "must be >= 0");
    } else {
        try {
            PopularityProfile check(*cfg.popularity);
        } catch (const std::exception& e) {
            throw ValidationError("popularity.values", e.what());
        }
    }
    const std::size_t files = num_files(cfg);

    for (std::size_t i = 0; i < cfg.tiers.size(); ++i) {
        const std::string path = indexed("network.tiers", i);
        const TierSpec& t = cfg.tiers[i];
        if (!finite(t.power_dbm)) throw ValidationError(path + ".power_dbm", "must be finite");
        if (!finite(t.sir_db)) throw ValidationError(path + ".sir_db", "must be finite");
        if (t.density_per_km2 && t.density_ratio)
            throw ValidationError(path, "give either density_per_km2 or density_ratio");
        if (t.density_per_km2) {
            if (!(*t.density_per_km2 > 0.0) || !finite(*t.density_per_km2))
                throw ValidationError(path + ".density_per_km2", "must be positive");
        } else if (t.density_ratio) {
            if (!(*t.density_ratio > 0.0) || !finite(*t.density_ratio))
                throw ValidationError(path + ".density_ratio", "must be positive");
            if (!cfg.base_density_per_km2)
                throw ValidationError(path + ".density_ratio", "requires network.base_density_per_km2");
        } else {
            throw ValidationError(path + ".density_per_km2", "missing density");
        }
        if (!(t.cache_capacity >= 0.0) || !finite(t.cache_capacity))
            throw ValidationError(path + ".cache_capacity", "must be >= 0");
        if (t.cache_capacity > static_cast<double>(files))
            throw ValidationError(path + ".cache_capacity", "exceeds the number of files");
    }

    if (cfg.policies.empty()) throw ValidationError("policies", "at least one policy is required");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < cfg.policies.size(); ++i) {
        const std::string& p = cfg.policies[i];
        const auto& known = known_policies();
        if (std::find(known.begin(), known.end(), p) == known.end())
            throw ValidationError(indexed("policies", i), "unknown policy '" + p + "'");
        if (!seen.insert(p).second) throw ValidationError(indexed("policies", i), "duplicate policy '" + p + "'");
        if (p == "hcp" && cfg.tiers.size() != 2)
            throw ValidationError(indexed("policies", i), "hcp needs exactly two tiers");
    }
    if (seen.count("explicit-matrix") && !cfg.placement)
        throw ValidationError("placement", "explicit-matrix policy requires a placement matrix");
    if (cfg.placement) {
        const auto& rows = *cfg.placement;
        if (rows.size() != files) throw ValidationError("placement", "needs one row per file");
        for (std::size_t m = 0; m < rows.size(); ++m) {
            if (rows[m].size() != cfg.tiers.size())
                throw ValidationError(indexed("placement", m), "needs one entry per tier");
            for (std::size_t k = 0; k < rows[m].size(); ++k)
                if (!(rows[m][k] >= 0.0 && rows[m][k] <= 1.0))
                    throw ValidationError(indexed(indexed("placement", m), k), "must lie in [0, 1]");
        }
        std::vector<double> sums(cfg.tiers.size(), 0.0);
        for (const auto& r : rows)
            for (std::size_t k = 0; k < r.size(); ++k) sums[k] += r[k];
        for (std::size_t k = 0; k < sums.size(); ++k)
            if (sums[k] > cfg.tiers[k].cache_capacity + 1e-9)
                throw ValidationError("placement", "column " + std::to_string(k) + " exceeds the tier's cache capacity");
    }

    const SimConfig& sim = cfg.simulation.config;
    if (sim.trials < 1) throw ValidationError("simulation.trials", "must be >= 1");
    if (!(sim.region_radius_km >= 0.0) || !finite(sim.region_radius_km))
        throw ValidationError("simulation.region_radius_km", "must be >= 0 (0 selects the default)");
    if (sim.target_file && *sim.target_file >= files)
        throw ValidationError("simulation.target_file", "index out of range");

    const LatencyParams& l = cfg.latency;
    if (!(l.bs_density > 0.0)) throw ValidationError("latency.bs_density_per_km2", "must be positive");
    if (!(l.gateway_density > 0.0)) throw ValidationError("latency.gateway_density_per_km2", "must be positive");
    if (!(l.c1_ms > 0.0)) throw ValidationError("latency.c1_ms", "must be positive");
    if (!(l.c2_ms > 0.0)) throw ValidationError("latency.c2_ms", "must be positive");

    if (cfg.sweep) {
        if (cfg.sweep->values.empty()) throw ValidationError("sweep.values", "at least one value is required");
        for (std::size_t i = 0; i < cfg.sweep->values.size(); ++i) {
            ExperimentConfig point;
            try {
                point = apply_sweep_value(cfg, cfg.sweep->parameter, cfg.sweep->values[i]);
            } catch (const ValidationError&) {
                throw;
            } catch (const std::exception& e) {
                throw ValidationError(indexed("sweep.values", i), e.what());
            }
            point.sweep.reset();
            try {
                validate_config(point);
            } catch (const ValidationError& e) {
                throw ValidationError(indexed("sweep.values", i), e.what());
            }
        }
    }
}

NetworkModel build_model(const ExperimentConfig& cfg) {
    std::vector<TierParams> tiers;
    for (std::size_t i = 0; i < cfg.tiers.size(); ++i) {
        const TierSpec& t = cfg.tiers[i];
        tiers.push_back({tier_density(cfg, i), dbm_to_watt(t.power_dbm), db_to_linear(t.sir_db), t.cache_capacity});
    }
    return NetworkModel(cfg.path_loss_exponent, std::move(tiers));
}

PopularityProfile build_popularity(const ExperimentConfig& cfg) {
    if (cfg.zipf) return zipf_popularity(*cfg.zipf);
    if (cfg.popularity) return PopularityProfile(*cfg.popularity);
    throw ValidationError("popularity", "missing popularity source");
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& cfg, const std::string& parameter, double value) {
    ExperimentConfig out = cfg;
    const std::string field = "sweep.parameter";
    if (parameter == "network.path_loss_exponent") {
        out.path_loss_exponent = value;
        return out;
    }
    if (parameter == "network.base_density_per_km2") {
        out.base_density_per_km2 = value;
        return out;
    }
    if (parameter == "network.all_tiers.sir_db" || parameter == "network.all_tiers.rate_bits_per_hz") {
        const double db =
            parameter == "network.all_tiers.sir_db" ? value : 10.0 * std::log10(std::exp2(value) - 1.0);
        if (!finite(db)) throw ValidationError(field, "rate must be positive");
        for (TierSpec& t : out.tiers) t.sir_db = db;
        return out;
    }
    if (parameter == "popularity.zipf.exponent" || parameter == "popularity.zipf.num_files") {
        if (!out.zipf) throw ValidationError(field, "'" + parameter + "' needs a zipf popularity");
        if (parameter == "popularity.zipf.exponent") {
            out.zipf->exponent = value;
        } else {
            if (!(value >= 1.0) || value != std::floor(value))
                throw ValidationError(field, "num_files sweep values must be positive integers");
            out.zipf->num_files = static_cast<std::size_t>(value);
        }
        return out;
    }
    static const std::regex tier_re(R"(network\.tiers\[(\d+)\]\.(power_dbm|sir_db|density_per_km2|density_ratio|cache_capacity))");
    static const std::regex cell_re(R"(placement\[(\d+)\]\[(\d+)\])");
    std::smatch match;
    if (std::regex_match(parameter, match, tier_re)) {
        const std::size_t i = std::stoul(match[1].str());
        if (i >= out.tiers.size()) throw ValidationError(field, "tier index out of range in '" + parameter + "'");
        TierSpec& t = out.tiers[i];
        const std::string what = match[2].str();
        if (what == "power_dbm") t.power_dbm = value;
        else if (what == "sir_db") t.sir_db = value;
        else if (what == "cache_capacity") t.cache_capacity = value;
        else if (what == "density_per_km2") {
            t.density_per_km2 = value;
            t.density_ratio.reset();
        } else {
            t.density_ratio = value;
            t.density_per_km2.reset();
        }
        return out;
    }
    if (std::regex_match(parameter, match, cell_re)) {
        if (!out.placement) throw ValidationError(field, "'" + parameter + "' needs a placement matrix");
        const std::size_t m = std::stoul(match[1].str());
        const std::size_t k = std::stoul(match[2].str());
        if (m >= out.placement->size() || k >= (*out.placement)[m].size())
            throw ValidationError(field, "placement index out of range in '" + parameter + "'");
        (*out.placement)[m][k] = value;
        return out;
    }
    throw ValidationError(field, "unknown sweep parameter '" + parameter + "'");
}

std::string serialize_config(const ExperimentConfig& cfg) {
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    e << YAML::BeginMap;

    e << YAML::Key << "network" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "path_loss_exponent" << YAML::Value << cfg.path_loss_exponent;
    if (cfg.base_density_per_km2) e << YAML::Key << "base_density_per_km2" << YAML::Value << *cfg.base_density_per_km2;
    e << YAML::Key << "tiers" << YAML::Value << YAML::BeginSeq;
    for (const TierSpec& t : cfg.tiers) {
        e << YAML::BeginMap;
        e << YAML::Key << "name" << YAML::Value << t.name;
        e << YAML::Key << "power_dbm" << YAML::Value << t.power_dbm;
        e << YAML::Key << "sir_db" << YAML::Value << t.sir_db;
        if (t.density_per_km2) e << YAML::Key << "density_per_km2" << YAML::Value << *t.density_per_km2;
        if (t.density_ratio) e << YAML::Key << "density_ratio" << YAML::Value << *t.density_ratio;
        e << YAML::Key << "cache_capacity" << YAML::Value << t.cache_capacity;
        e << YAML::EndMap;
    }
    e << YAML::EndSeq << YAML::EndMap;

    e << YAML::Key << "popularity" << YAML::Value << YAML::BeginMap;
    if (cfg.zipf) {
        e << YAML::Key << "zipf" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "num_files" << YAML::Value << static_cast<std::uint64_t>(cfg.zipf->num_files);
        e << YAML::Key << "exponent" << YAML::Value << cfg.zipf->exponent;
        e << YAML::EndMap;
    }
    if (cfg.popularity) e << YAML::Key << "values" << YAML::Value << YAML::Flow << *cfg.popularity;
    e << YAML::EndMap;

    e << YAML::Key << "policies" << YAML::Value << YAML::Flow << cfg.policies;
    if (cfg.placement) {
        e << YAML::Key << "placement" << YAML::Value << YAML::BeginSeq;
        for (const auto& row : *cfg.placement) e << YAML::Flow << row;
        e << YAML::EndSeq;
    }
    e << YAML::Key << "hcp" << YAML::Value << YAML::BeginMap << YAML::Key << "interference" << YAML::Value
      << hcp_name(cfg.hcp_variant) << YAML::EndMap;

    const ReferenceOptions& r = cfg.reference;
    e << YAML::Key << "reference" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "seed" << YAML::Value << r.seed;
    e << YAML::Key << "restarts" << YAML::Value << r.restarts;
    e << YAML::Key << "inner_iterations" << YAML::Value << r.inner_iterations;
    e << YAML::Key << "dual_sweeps" << YAML::Value << r.dual_sweeps;
    e << YAML::Key << "dual_bisections" << YAML::Value << r.dual_bisections;
    e << YAML::Key << "polish_iterations" << YAML::Value << r.polish_iterations;
    e << YAML::EndMap;

    if (cfg.sweep) {
        e << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "parameter" << YAML::Value << cfg.sweep->parameter;
        e << YAML::Key << "values" << YAML::Value << YAML::Flow << cfg.sweep->values;
        e << YAML::EndMap;
    }

    const SimConfig& s = cfg.simulation.config;
    e << YAML::Key << "simulation" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "enabled" << YAML::Value << cfg.simulation.enabled;
    e << YAML::Key << "trials" << YAML::Value << s.trials;
    e << YAML::Key << "seed" << YAML::Value << s.seed;
    e << YAML::Key << "region_radius_km" << YAML::Value << s.region_radius_km;
    e << YAML::Key << "mode" << YAML::Value << (s.mode == SamplingMode::Stratified ? "stratified" : "direct");
    e << YAML::Key << "far_field" << YAML::Value << (s.far_field == FarField::Mean ? "mean" : "none");
    e << YAML::Key << "threads" << YAML::Value << s.threads;
    if (s.target_file) e << YAML::Key << "target_file" << YAML::Value << static_cast<std::uint64_t>(*s.target_file);
    e << YAML::EndMap;

    e << YAML::Key << "latency" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "bs_density_per_km2" << YAML::Value << cfg.latency.bs_density;
    e << YAML::Key << "gateway_density_per_km2" << YAML::Value << cfg.latency.gateway_density;
    e << YAML::Key << "c1_ms" << YAML::Value << cfg.latency.c1_ms;
    e << YAML::Key << "c2_ms" << YAML::Value << cfg.latency.c2_ms;
    e << YAML::EndMap;

    e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    if (!cfg.output_path.empty()) e << YAML::Key << "path" << YAML::Value << cfg.output_path;
    e << YAML::Key << "format" << YAML::Value << to_string(cfg.output_format);
    e << YAML::EndMap;

    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

bool operator==(const TierSpec& a, const TierSpec& b) {
    return a.name == b.name && a.power_dbm == b.power_dbm && a.sir_db == b.sir_db &&
           a.density_per_km2 == b.density_per_km2 && a.density_ratio == b.density_ratio &&
           a.cache_capacity == b.cache_capacity;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    const auto zipf_eq = [](const std::optional<ZipfParams>& x, const std::optional<ZipfParams>& y) {
        if (x.has_value() != y.has_value()) return false;
        return !x || (x->num_files == y->num_files && x->exponent == y->exponent);
    };
    const auto sweep_eq = [](const std::optional<SweepSpec>& x, const std::optional<SweepSpec>& y) {
        if (x.has_value() != y.has_value()) return false;
        return !x || (x->parameter == y->parameter && x->values == y->values);
    };
    const SimConfig& sa = a.simulation.config;
    const SimConfig& sb = b.simulation.config;
    const ReferenceOptions& ra = a.reference;
    const ReferenceOptions& rb = b.reference;
    return a.path_loss_exponent == b.path_loss_exponent && a.base_density_per_km2 == b.base_density_per_km2 &&
           a.tiers == b.tiers && zipf_eq(a.zipf, b.zipf) && a.popularity == b.popularity && a.policies == b.policies &&
           a.placement == b.placement && a.hcp_variant == b.hcp_variant && ra.seed == rb.seed &&
           ra.restarts == rb.restarts && ra.inner_iterations == rb.inner_iterations &&
           ra.dual_sweeps == rb.dual_sweeps && ra.dual_bisections == rb.dual_bisections &&
           ra.polish_iterations == rb.polish_iterations && sweep_eq(a.sweep, b.sweep) &&
           a.simulation.enabled == b.simulation.enabled && sa.trials == sb.trials && sa.seed == sb.seed &&
           sa.region_radius_km == sb.region_radius_km && sa.mode == sb.mode && sa.far_field == sb.far_field &&
           sa.threads == sb.threads && sa.target_file == sb.target_file &&
           a.latency.bs_density == b.latency.bs_density && a.latency.gateway_density == b.latency.gateway_density &&
           a.latency.c1_ms == b.latency.c1_ms && a.latency.c2_ms == b.latency.c2_ms &&
           a.output_path == b.output_path && a.output_format == b.output_format;
}

}  // namespace hetcache
