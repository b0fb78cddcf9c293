#pragma once

#include "stofv/harness.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stofv {

struct GridConfig {
    int dim = 1;
    std::size_t m = 32;
};

struct FluxConfig {
    std::string name = "burgers";      ///< burgers | linear | cubic
    std::vector<double> velocity;      ///< linear only, one entry per axis
    std::string scheme = "godunov";    ///< godunov | rusanov | engquist_osher
    double viscosity = 0.0;            ///< Rusanov λ; 0 selects L_A
    double lipschitz = 0.0;            ///< declared L_A; 0 keeps the built-in value
};

struct NoiseModeConfig {
    double sigma = 0.0;
    int exponent = 1;
    std::string shape = "sine";        ///< constant | sine | cosine
    std::vector<int> frequency{1};
};

struct NoiseConfig {
    std::vector<NoiseModeConfig> modes;
    std::uint64_t seed = 1;            ///< master seed
};

struct TimeConfig {
    double T = 0.25;
    double theta = 0.5;
    double dt = 0.0;                   ///< 0 selects the CFL step (1-θ)α²h/(2L_A)
};

struct InitialConfig {
    std::string name = "sine";         ///< constant | sine | riemann | random | bump
    double value = 0.0;                ///< constant
    double amplitude = 0.5;            ///< sine, random, bump
    std::vector<int> frequency{1};     ///< sine
    double left = 1.0;                 ///< riemann
    double right = 0.0;                ///< riemann
    double x0 = 0.5;                   ///< riemann interface; bump center (first axis)
    double radius = 0.25;              ///< bump
    std::uint64_t seed = 7;            ///< random
    std::size_t pieces = 0;            ///< random: pieces per axis, 0 selects grid.m
    std::size_t quad_order = 4;
};

struct DiagnosticsConfig {
    bool enabled = true;
    bool steps = true;
};

struct OutputConfig {
    std::string dir = "out";
    std::vector<double> snapshots;     ///< times written by `run`; T is always written
};

struct EnsembleSection {
    std::size_t M = 100;
    unsigned threads = 0;              ///< 0 defers to --threads, then STOFV_THREADS
};

struct RefinementConfig {
    std::vector<std::size_t> levels{8, 16, 32, 64};
    std::size_t M = 64;
    double p = 1.0;
};

struct ConvergeConfig {
    std::vector<std::size_t> levels{16, 32, 64, 128};
};

struct RunConfig {
    GridConfig grid;
    FluxConfig flux;
    NoiseConfig noise;
    TimeConfig time;
    InitialConfig initial;
    DiagnosticsConfig diagnostics;
    OutputConfig output;
    EnsembleSection ensemble;
    RefinementConfig refinement;
    ConvergeConfig converge;
};

/// Canonical JSON form; keys in declaration order.
nlohmann::ordered_json to_json(const RunConfig& config);
/// Strict parse: unknown keys and ill-typed values raise ConfigError. Missing keys keep defaults.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
/// Applies `a.b.c=value` overrides; the value is read as JSON when it parses, else as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);
/// Checks ranges and name resolution. Throws ConfigError.
void validate(const RunConfig& config);

/// 64-bit FNV-1a of the canonical dump (output.dir excluded), as 16 hex digits.
std::string config_hash(const RunConfig& config);

FluxFunction build_flux(const RunConfig& config);
MonotoneFaceFlux build_numerical_flux(const RunConfig& config);
NoiseModel build_noise(const RunConfig& config);
Scheme build_scheme(const RunConfig& config);
Scheme build_scheme(const RunConfig& config, std::size_t m);
InitialData build_initial(const RunConfig& config);
TimeGrid build_time_grid(const RunConfig& config, const Scheme& scheme);
/// Exact reference for the deterministic problem: Riemann data with Burgers in 1D, or any data with a linear flux.
ReferenceSolution build_reference(const RunConfig& config);

}  // namespace stofv
