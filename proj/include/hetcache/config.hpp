#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hetcache/baselines.hpp"
#include "hetcache/model.hpp"
#include "hetcache/placement.hpp"
#include "hetcache/sim.hpp"

namespace hetcache {

/// One tier as written in a config file (dBm, dB, either an absolute density
/// or a ratio to network.base_density_per_km2).
struct TierSpec {
    std::string name;
    double power_dbm = 0.0;
    double sir_db = 0.0;
    std::optional<double> density_per_km2;
    std::optional<double> density_ratio;
    double cache_capacity = 0.0;
};

struct SweepSpec {
    std::string parameter;
    std::vector<double> values;
};

struct SimulationSpec {
    bool enabled = false;
    SimConfig config;
};

enum class OutputFormat { Csv, Json };

struct ExperimentConfig {
    double path_loss_exponent = 3.0;
    std::optional<double> base_density_per_km2;
    std::vector<TierSpec> tiers;

    std::optional<ZipfParams> zipf;
    std::optional<std::vector<double>> popularity;

    std::vector<std::string> policies;
    std::optional<std::vector<std::vector<double>>> placement;  // for explicit-matrix
    HcpInterference hcp_variant = HcpInterference::SingleTier;
    ReferenceOptions reference;

    std::optional<SweepSpec> sweep;
    SimulationSpec simulation;
    LatencyParams latency;

    std::string output_path;
    OutputFormat output_format = OutputFormat::Csv;
};

/// Policy names accepted in `policies`.
const std::vector<std::string>& known_policies();

ExperimentConfig parse_config(const std::string& text);
/// Reads and parses a file. ParseError on I/O or syntax problems, ValidationError otherwise.
ExperimentConfig load_config(const std::string& path);
/// Checks every field; ValidationError names the first offending one.
void validate_config(const ExperimentConfig& cfg);
/// YAML text that parses back to an equal configuration.
std::string serialize_config(const ExperimentConfig& cfg);

/// Linear-unit model and the popularity profile a config describes.
NetworkModel build_model(const ExperimentConfig& cfg);
PopularityProfile build_popularity(const ExperimentConfig& cfg);

/// Copy of cfg with the sweep parameter set to value. Parameter paths:
///   network.path_loss_exponent, network.base_density_per_km2,
///   network.tiers[i].{power_dbm,sir_db,density_per_km2,density_ratio,cache_capacity},
///   network.all_tiers.sir_db, network.all_tiers.rate_bits_per_hz (sir = 2^r - 1),
///   popularity.zipf.exponent, popularity.zipf.num_files, placement[m][k].
ExperimentConfig apply_sweep_value(const ExperimentConfig& cfg, const std::string& parameter, double value);

OutputFormat parse_output_format(const std::string& name);
std::string to_string(OutputFormat f);

bool operator==(const TierSpec& a, const TierSpec& b);
bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace hetcache
