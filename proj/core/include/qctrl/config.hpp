#pragma once

// Run configuration: a single JSON document with nested blocks.  Complex
// numbers are two-element arrays [re, im]; level pairs are 1-based.
// Validation errors cite the offending key path.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qctrl/dynamics.hpp"
#include "qctrl/geometric.hpp"
#include "qctrl/grape.hpp"
#include "qctrl/learning.hpp"
#include "qctrl/stirap.hpp"

namespace qctrl {

struct SystemBlock {
    Eigen::Index dim = 0;
    Matrix drift;
    std::vector<Matrix> controls;
    std::vector<std::string> labels;
};

struct FieldInit {
    enum class Kind { ZERO, RANDOM, EXPLICIT } kind = Kind::ZERO;
    double amplitude = 0.0;     // RANDOM: uniform in [-amplitude, amplitude]
    Eigen::MatrixXd values;     // EXPLICIT
};

struct ScheduleBlock {
    double t0 = 0.0;
    double dt = 0.0;
    Eigen::Index slices = 0;
    FieldInit fields;
};

struct SimulateTask {
    Vector initial_ket;
    Eigen::Index record_every = 1;
};

struct OpenSimulateTask {
    Matrix initial_density;
    std::vector<LindbladChannel> channels;
    Eigen::Index substeps = 10;
    Eigen::Index record_every = 1;
};

struct ControllabilityTask {
    double tol = 1e-9;
};

struct DecomposeTask {
    Matrix unitary;
    double f_max = 1.0;
    double dt = 0.01;
};

struct RwaProbeTask {
    std::map<LevelPair, double> dipoles;
    RwaProbeSpec spec;
};

struct GrapeTask {
    ObjectiveSpec objective;
    OptimizeOptions options;
};

struct StirapTask {
    StirapParams params;
};

struct LearnTask {
    ObjectiveSpec objective;
    LearningConfig config; // grid fields filled from the schedule block
};

using TaskSpec = std::variant<SimulateTask, OpenSimulateTask, ControllabilityTask,
                              DecomposeTask, RwaProbeTask, GrapeTask, StirapTask, LearnTask>;

struct OutputBlock {
    std::string dir = "out";
    std::vector<std::string> formats = {"csv"};
};

struct RunConfig {
    std::optional<SystemBlock> system;
    std::optional<ScheduleBlock> schedule;
    std::string task_name;
    TaskSpec task;
    OutputBlock output;
    std::uint64_t seed = 0;
};

// Throws ConfigError with the offending key path on any violation.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<inline>");

const std::vector<std::string>& known_tasks();

} // namespace qctrl
