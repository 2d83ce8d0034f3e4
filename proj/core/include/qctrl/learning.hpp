#pragma once

// Simulated closed-loop learning: a population of piecewise-constant field
// candidates, measurement-based fitness with optional binomial shot noise,
// and elitist tournament selection / uniform crossover / Gaussian mutation.
//
// Determinism contract: every random draw comes from a sub-stream derived
// from (seed, generation, individual index), so evaluation order and
// parallelism cannot change results.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "qctrl/grape.hpp"

namespace qctrl {

inline constexpr std::uint64_t kUnlimitedShots = 0;

struct Individual {
    Eigen::VectorXd genes; // flattened K x M field values (row-major: slice-major)
    std::optional<double> fitness;
};

struct LearningConfig {
    int population = 2;
    int generations = 1;
    int elitism = 1;
    int tournament = 2;
    double crossover_rate = 0.7;
    double mutation_sigma = 0.1;
    std::uint64_t shots = kUnlimitedShots;
    std::uint64_t seed = 0;
    double f_max = 1.0;

    // schedule grid the genes are decoded onto
    double t0 = 0.0;
    double dt = 0.1;
    Eigen::Index slices = 1;
};

struct FitnessRecord {
    int generation = 0;
    double best = 0.0;
    double mean = 0.0;
    double worst = 0.0;
    Eigen::VectorXd best_genes;
};

// Deterministic sub-stream engine for (seed, generation, index, salt).
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t generation,
                          std::uint64_t index, std::uint64_t salt = 0);

PulseSchedule genes_to_schedule(const Eigen::VectorXd& genes, const LearningConfig& cfg,
                                const ControlSystem& sys);

// One simulated experiment: fresh copy from rho0, propagate, measure.
// shots == kUnlimitedShots returns Tr[A rho(t_F)] exactly; finite shots
// returns a Binomial(shots, p)/shots sample.  GATE objectives reject finite
// shots (a gate fidelity is not a single-observable measurement).
double measure_fitness(const ControlSystem& sys, const Individual& ind,
                       const ObjectiveSpec& obj, const LearningConfig& cfg,
                       std::uint64_t shots, std::mt19937_64& rng);

// Elites copied unchanged, remainder bred by tournament selection, uniform
// crossover, per-gene Gaussian mutation, clipped to +-f_max.
std::vector<Individual> next_generation(const std::vector<Individual>& pop,
                                        const LearningConfig& cfg, int generation);

struct LearningResult {
    Individual best;
    std::vector<FitnessRecord> records;
};

LearningResult run_learning(const ControlSystem& sys, const ObjectiveSpec& obj,
                            const LearningConfig& cfg);

} // namespace qctrl
