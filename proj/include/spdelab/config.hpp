#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spdelab/experiments.hpp"
#include "spdelab/mesh.hpp"
#include "spdelab/model.hpp"
#include "spdelab/nonparametric.hpp"
#include "spdelab/simulator.hpp"

namespace spdelab {

struct OutputSpec {
    std::filesystem::path dir = "out";
    bool csv = true;
    bool json = false;
};

struct McSection {
    std::vector<double> nus;
    std::size_t runs = 100;
    std::uint64_t base_seed = 1;
    bool paired_seeds = false;
    std::size_t threads = 0;
    double max_blowup_fraction = 0.1;
    /// Additional rate fit restricted to nu <= rate_max_nu.
    std::optional<double> rate_max_nu;
};

/// Parsed run configuration. Every numeric constraint is checked on load and
/// reported with the JSON path of the offending value.
struct RunConfig {
    ModelSpec model;
    GridSpec grid;
    EstimatorSelection estimator;
    double alpha_bar = 0.05;
    /// Evaluation points and bandwidth policy for estimate-nonparam.
    NonparamSpec nonparam;
    McSection mc;
    std::optional<MeshPolicy> mesh_policy;
    SimulationOptions simulation;
    std::uint64_t seed = 1;
    OutputSpec output;

    MCConfig mc_config() const;
    KnownPhysics physics() const;
};

/// Strict parse: unknown keys and violated invariants throw Error(Config) whose
/// message starts with the JSON path, e.g. "/model/alpha: ...".
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace spdelab
