#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bohmsemi/bohmian.hpp"
#include "bohmsemi/minisuperspace.hpp"

namespace bohmsemi::io {

struct GridSpec {
    double min = -10.0;
    double max = 10.0;
    std::size_t n = 256;
};

struct PacketSpec {
    double center = 0.0;
    double sigma = 1.0;
    double momentum = 0.0;
};

struct SeedPoint {
    double phi = 0.0;
    double alpha = 0.0;
    double tau = 0.0;
    bool highlight = false;
};

struct MiniConfig {
    std::string task = "trajectories";  // trajectories | compare | sc-ensemble
    mini::WDWParams packet{};
    double dtau = 0.01;
    mini::TauSpan span{0.0, 20.0};
    mini::StepPolicy step{};
    std::vector<SeedPoint> seeds;
    mini::ClassifyOptions classify{};
    // compare and sc-ensemble
    double phi0 = -8.0;
    double alpha0 = -8.0;
    double tau0 = 0.0;
    double window = 2.0;
    std::size_t sample_count = 100;
    std::optional<std::array<double, 4>> view;  // phi_min, phi_max, alpha_min, alpha_max
    std::string title;
};

struct TwoParticleConfig {
    GridSpec x1{-20.0, 20.0, 256};
    GridSpec x2{-4.0, 4.0, 128};
    double m1 = 1.0;
    double m2 = 50.0;
    std::string coupling = "bilinear";  // bilinear | harmonic
    double strength = 0.5;
    std::vector<PacketSpec> chi0;
    PacketSpec env0{0.0, 0.5, 0.0};
    double X1 = 0.0;
    double X2 = 0.0;
    double dt = 0.01;
    std::size_t steps = 100;
    std::size_t snapshot_stride = 0;
    NodePolicy policy{};
    std::vector<double> ratio_sweep;  // m2 values for an interaction-ratio sweep
};

struct SNConfig {
    GridSpec grid{-30.0, 30.0, 1024};
    double G = 1.0;
    double m = 1.0;
    std::optional<double> eps_soft;  // default: first packet sigma / 10
    std::vector<PacketSpec> packets;
    double X = 0.0;
    std::string scheme = "both";  // meanfield | bohmian | both
    double dt = 0.01;
    std::size_t steps = 100;
    std::size_t snapshot_stride = 0;
    NodePolicy policy{};
};

struct EquivarianceConfig {
    GridSpec grid{-20.0, 20.0, 801};
    PacketSpec packet{};
    double mass = 1.0;
    std::string potential = "free";  // free | harmonic
    double omega = 1.0;
    std::size_t count = 10000;
    double T = 2.0;
    double dt = 0.0;
    NodePolicy policy{};
};

struct ScenarioConfig {
    std::string kind;  // two-particle | schroedinger-newton | minisuperspace | equivariance
    std::uint64_t seed = 0;
    std::string output;
    std::size_t max_flagged_steps = 100000;
    std::optional<MiniConfig> minisuperspace;
    std::optional<TwoParticleConfig> two_particle;
    std::optional<SNConfig> schroedinger_newton;
    std::optional<EquivarianceConfig> equivariance;
    nlohmann::json raw;  // the document as read
};

/// Parses and validates; throws ConfigError naming the offending field.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config(const std::string& path);

}  // namespace bohmsemi::io
