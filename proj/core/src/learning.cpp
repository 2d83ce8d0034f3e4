#include "qctrl/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qctrl {

namespace {

// salts keep the init / evaluation / breeding streams disjoint
constexpr std::uint64_t kSaltInit = 0xA5;
constexpr std::uint64_t kSaltEval = 0xB6;
constexpr std::uint64_t kSaltBreed = 0xC7;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

void check_config(const LearningConfig& cfg, const ControlSystem& sys) {
    if (cfg.population < 2)
        throw NumericError("learning: population must be >= 2");
    if (cfg.generations < 1)
        throw NumericError("learning: generations must be >= 1");
    if (cfg.elitism < 0 || cfg.elitism >= cfg.population)
        throw NumericError("learning: elitism must satisfy 0 <= e < population");
    if (cfg.tournament < 1)
        throw NumericError("learning: tournament size must be >= 1");
    if (cfg.crossover_rate < 0.0 || cfg.crossover_rate > 1.0)
        throw NumericError("learning: crossover_rate must be in [0,1]");
    if (!(cfg.mutation_sigma > 0.0))
        throw NumericError("learning: mutation_sigma must be positive");
    if (!(cfg.f_max > 0.0))
        throw NumericError("learning: f_max must be positive");
    if (cfg.slices < 1)
        throw NumericError("learning: need at least one slice");
    if (sys.num_controls() == 0)
        throw NumericError("learning: system has no controls to shape");
}

// indices sorted by fitness descending, index ascending on ties
std::vector<std::size_t> ranking(const std::vector<Individual>& pop) {
    std::vector<std::size_t> idx(pop.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (*pop[a].fitness != *pop[b].fitness)
            return *pop[a].fitness > *pop[b].fitness;
        return a < b;
    });
    return idx;
}

} // namespace

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t generation,
                          std::uint64_t index, std::uint64_t salt) {
    std::uint64_t s = splitmix64(seed);
    s = splitmix64(s ^ generation);
    s = splitmix64(s ^ index);
    s = splitmix64(s ^ salt);
    return std::mt19937_64(s);
}

PulseSchedule genes_to_schedule(const Eigen::VectorXd& genes, const LearningConfig& cfg,
                                const ControlSystem& sys) {
    const auto m = static_cast<Eigen::Index>(sys.num_controls());
    if (genes.size() != cfg.slices * m)
        throw NumericError("learning: gene count differs from slices * controls");
    Eigen::MatrixXd values(cfg.slices, m);
    for (Eigen::Index k = 0; k < cfg.slices; ++k)
        for (Eigen::Index c = 0; c < m; ++c)
            values(k, c) = genes(k * m + c);
    return PulseSchedule(cfg.t0, cfg.dt, std::move(values), cfg.f_max);
}

double measure_fitness(const ControlSystem& sys, const Individual& ind,
                       const ObjectiveSpec& obj, const LearningConfig& cfg,
                       std::uint64_t shots, std::mt19937_64& rng) {
    if (obj.kind == ObjectiveKind::GATE && shots != kUnlimitedShots)
        throw NumericError("measure_fitness: finite shots require an OBSERVABLE objective");
    const PulseSchedule sched = genes_to_schedule(ind.genes, cfg, sys);

    double p;
    if (obj.kind == ObjectiveKind::OBSERVABLE) {
        const DensityTrajectory traj = propagate_density(
            sys, sched, *obj.rho0, std::max<Eigen::Index>(sched.num_slices(), 1));
        p = (obj.observable->matrix() * traj.states.back()).trace().real();
    } else {
        p = gate_fidelity(total_propagator(sys, sched), *obj.target_gate);
    }
    if (shots == kUnlimitedShots)
        return p;

    const double clipped = std::clamp(p, 0.0, 1.0);
    std::binomial_distribution<std::uint64_t> dist(shots, clipped);
    return static_cast<double>(dist(rng)) / static_cast<double>(shots);
}

std::vector<Individual> next_generation(const std::vector<Individual>& pop,
                                        const LearningConfig& cfg, int generation) {
    if (pop.size() != static_cast<std::size_t>(cfg.population))
        throw NumericError("next_generation: population size differs from config");
    for (const auto& ind : pop)
        if (!ind.fitness)
            throw NumericError("next_generation: unevaluated fitness in population");

    const std::vector<std::size_t> rank = ranking(pop);
    std::vector<Individual> next;
    next.reserve(pop.size());
    for (int e = 0; e < cfg.elitism; ++e)
        next.push_back(pop[rank[static_cast<std::size_t>(e)]]);

    auto tournament_pick = [&](std::mt19937_64& rng) -> const Individual& {
        std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
        std::size_t best = pick(rng);
        for (int t = 1; t < cfg.tournament; ++t) {
            const std::size_t cand = pick(rng);
            if (*pop[cand].fitness > *pop[best].fitness ||
                (*pop[cand].fitness == *pop[best].fitness && cand < best))
                best = cand;
        }
        return pop[best];
    };

    for (std::size_t i = next.size(); i < pop.size(); ++i) {
        std::mt19937_64 rng = substream(cfg.seed, static_cast<std::uint64_t>(generation),
                                        i, kSaltBreed);
        const Individual& a = tournament_pick(rng);
        const Individual& b = tournament_pick(rng);

        Individual child;
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        if (unit(rng) < cfg.crossover_rate) {
            child.genes = a.genes;
            for (Eigen::Index g = 0; g < child.genes.size(); ++g)
                if (unit(rng) < 0.5)
                    child.genes(g) = b.genes(g);
        } else {
            child.genes = (*a.fitness >= *b.fitness) ? a.genes : b.genes;
        }
        std::normal_distribution<double> noise(0.0, cfg.mutation_sigma);
        for (Eigen::Index g = 0; g < child.genes.size(); ++g)
            child.genes(g) = std::clamp(child.genes(g) + noise(rng), -cfg.f_max, cfg.f_max);
        next.push_back(std::move(child));
    }
    return next;
}

LearningResult run_learning(const ControlSystem& sys, const ObjectiveSpec& obj,
                            const LearningConfig& cfg) {
    check_config(cfg, sys);
    const Eigen::Index genes = cfg.slices * static_cast<Eigen::Index>(sys.num_controls());

    std::vector<Individual> pop;
    for (int i = 0; i < cfg.population; ++i) {
        std::mt19937_64 rng = substream(cfg.seed, 0, static_cast<std::uint64_t>(i), kSaltInit);
        std::uniform_real_distribution<double> unif(-cfg.f_max, cfg.f_max);
        Individual ind;
        ind.genes.resize(genes);
        for (Eigen::Index g = 0; g < genes; ++g)
            ind.genes(g) = unif(rng);
        pop.push_back(std::move(ind));
    }

    LearningResult result;
    std::vector<Individual> generation_best;
    for (int gen = 0; gen < cfg.generations; ++gen) {
        for (std::size_t i = 0; i < pop.size(); ++i) {
            if (pop[i].fitness)
                continue; // elites keep their measured fitness
            std::mt19937_64 rng = substream(cfg.seed, static_cast<std::uint64_t>(gen), i,
                                            kSaltEval);
            pop[i].fitness = measure_fitness(sys, pop[i], obj, cfg, cfg.shots, rng);
        }
        const std::vector<std::size_t> rank = ranking(pop);
        FitnessRecord rec;
        rec.generation = gen;
        rec.best = *pop[rank.front()].fitness;
        rec.worst = *pop[rank.back()].fitness;
        rec.mean = 0.0;
        for (const auto& ind : pop)
            rec.mean += *ind.fitness;
        rec.mean /= static_cast<double>(pop.size());
        rec.best_genes = pop[rank.front()].genes;
        result.records.push_back(std::move(rec));
        generation_best.push_back(pop[rank.front()]);

        if (gen + 1 < cfg.generations)
            pop = next_generation(pop, cfg, gen);
    }

    if (cfg.shots == kUnlimitedShots) {
        const auto it = std::max_element(
            generation_best.begin(), generation_best.end(),
            [](const Individual& a, const Individual& b) { return *a.fitness < *b.fitness; });
        result.best = *it;
    } else {
        // noisy fitnesses are not comparable across generations; re-evaluate
        // the per-generation champions without shot noise
        double best_true = -std::numeric_limits<double>::infinity();
        std::mt19937_64 dummy(0);
        for (const Individual& cand : generation_best) {
            const double f = measure_fitness(sys, cand, obj, cfg, kUnlimitedShots, dummy);
            if (f > best_true) {
                best_true = f;
                result.best = cand;
                result.best.fitness = f;
            }
        }
    }
    return result;
}

} // namespace qctrl
