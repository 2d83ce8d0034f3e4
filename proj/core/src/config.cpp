#include "qctrl/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qctrl {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object())
        fail(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end())
        fail(path + "." + key, "missing required key");
    return *it;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number())
        fail(path, "expected a number");
    return j.get<double>();
}

Eigen::Index as_index(const json& j, const std::string& path) {
    if (!j.is_number_integer())
        fail(path, "expected an integer");
    return j.get<Eigen::Index>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string())
        fail(path, "expected a string");
    return j.get<std::string>();
}

Complex as_complex(const json& j, const std::string& path) {
    if (j.is_number())
        return Complex(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return Complex(j[0].get<double>(), j[1].get<double>());
    fail(path, "expected a number or a [re, im] pair");
}

Matrix as_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty())
        fail(path, "expected a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    Matrix m;
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        const std::string rpath = path + "[" + std::to_string(r) + "]";
        if (!row.is_array())
            fail(rpath, "expected an array of entries");
        if (r == 0)
            m.resize(rows, static_cast<Eigen::Index>(row.size()));
        if (static_cast<Eigen::Index>(row.size()) != m.cols())
            fail(rpath, "ragged matrix rows");
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            m(r, c) = as_complex(row[static_cast<std::size_t>(c)],
                                 rpath + "[" + std::to_string(c) + "]");
    }
    return m;
}

Matrix as_square_matrix(const json& j, Eigen::Index dim, const std::string& path) {
    Matrix m = as_matrix(j, path);
    if (m.rows() != dim || m.cols() != dim) {
        std::ostringstream os;
        os << "expected a " << dim << "x" << dim << " matrix, got "
           << m.rows() << "x" << m.cols();
        fail(path, os.str());
    }
    return m;
}

Vector as_ket(const json& j, Eigen::Index dim, const std::string& path) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != dim) {
        std::ostringstream os;
        os << "expected " << dim << " amplitudes";
        fail(path, os.str());
    }
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        v(i) = as_complex(j[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
    return v;
}

SystemBlock parse_system(const json& j, const std::string& path) {
    SystemBlock sys;
    sys.dim = as_index(require(j, "dim", path), path + ".dim");
    if (sys.dim < 1)
        fail(path + ".dim", "dimension must be positive");
    sys.drift = as_square_matrix(require(j, "drift", path), sys.dim, path + ".drift");
    if (j.contains("controls")) {
        const json& ctrls = j["controls"];
        if (!ctrls.is_array())
            fail(path + ".controls", "expected an array of matrices");
        for (std::size_t m = 0; m < ctrls.size(); ++m)
            sys.controls.push_back(as_square_matrix(
                ctrls[m], sys.dim, path + ".controls[" + std::to_string(m) + "]"));
    }
    if (j.contains("labels")) {
        const json& labels = j["labels"];
        if (!labels.is_array() || labels.size() != sys.controls.size())
            fail(path + ".labels", "expected one label per control");
        for (std::size_t m = 0; m < labels.size(); ++m)
            sys.labels.push_back(as_string(labels[m], path + ".labels[" + std::to_string(m) + "]"));
    }
    return sys;
}

ScheduleBlock parse_schedule(const json& j, const std::string& path) {
    ScheduleBlock s;
    s.t0 = j.contains("t0") ? as_number(j["t0"], path + ".t0") : 0.0;
    s.dt = as_number(require(j, "dt", path), path + ".dt");
    if (!(s.dt > 0.0))
        fail(path + ".dt", "dt must be positive");
    s.slices = as_index(require(j, "slices", path), path + ".slices");
    if (s.slices < 0)
        fail(path + ".slices", "slice count must be non-negative");
    if (j.contains("fields")) {
        const json& f = j["fields"];
        if (f.is_string()) {
            const std::string kind = f.get<std::string>();
            if (kind == "zero")
                s.fields.kind = FieldInit::Kind::ZERO;
            else
                fail(path + ".fields", "unknown field init '" + kind + "' (use \"zero\")");
        } else if (f.is_object() && f.contains("random")) {
            s.fields.kind = FieldInit::Kind::RANDOM;
            s.fields.amplitude = as_number(f["random"], path + ".fields.random");
            if (!(s.fields.amplitude > 0.0))
                fail(path + ".fields.random", "amplitude must be positive");
        } else if (f.is_array()) {
            s.fields.kind = FieldInit::Kind::EXPLICIT;
            const Matrix m = as_matrix(f, path + ".fields");
            if (m.imag().cwiseAbs().maxCoeff() > 0.0)
                fail(path + ".fields", "field values must be real");
            if (m.rows() != s.slices)
                fail(path + ".fields", "expected one row per slice");
            s.fields.values = m.real();
        } else {
            fail(path + ".fields", "expected \"zero\", {\"random\": f0} or a K x M array");
        }
    }
    return s;
}

LevelPair as_pair(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        fail(path, "expected a [n, n'] level pair (1-based)");
    return {j[0].get<int>(), j[1].get<int>()};
}

ObjectiveSpec parse_objective(const json& j, const SystemBlock& sys, const std::string& path) {
    const std::string kind = as_string(require(j, "kind", path), path + ".kind");
    Eigen::VectorXd lambdas = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sys.controls.size()));
    if (j.contains("lambdas")) {
        const json& l = j["lambdas"];
        if (!l.is_array() || l.size() != sys.controls.size())
            fail(path + ".lambdas", "expected one penalty weight per control");
        for (std::size_t m = 0; m < l.size(); ++m)
            lambdas(static_cast<Eigen::Index>(m)) =
                as_number(l[m], path + ".lambdas[" + std::to_string(m) + "]");
    }
    if (kind == "observable") {
        const Matrix a = as_square_matrix(require(j, "observable", path), sys.dim,
                                          path + ".observable");
        Matrix rho0;
        if (j.contains("rho0")) {
            rho0 = as_square_matrix(j["rho0"], sys.dim, path + ".rho0");
        } else if (j.contains("initial")) {
            const Vector psi = as_ket(j["initial"], sys.dim, path + ".initial");
            rho0 = psi * psi.adjoint();
        } else {
            fail(path, "observable objective needs rho0 or initial");
        }
        try {
            return observable_objective(HermitianOperator(a), validate_density(rho0),
                                        std::move(lambdas));
        } catch (const NumericError& e) {
            fail(path, e.what());
        }
    }
    if (kind == "gate") {
        const Matrix target = as_square_matrix(require(j, "target", path), sys.dim,
                                               path + ".target");
        return gate_objective(target, std::move(lambdas));
    }
    fail(path + ".kind", "unknown objective kind '" + kind + "' (observable | gate)");
}

} // namespace

const std::vector<std::string>& known_tasks() {
    static const std::vector<std::string> tasks = {
        "simulate", "open-simulate", "controllability", "decompose",
        "rwa-probe", "grape", "stirap", "learn"};
    return tasks;
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(origin + ": invalid JSON: " + e.what());
    }
    if (!root.is_object())
        throw ConfigError(origin + ": top level must be an object");

    RunConfig cfg;
    if (root.contains("system"))
        cfg.system = parse_system(root["system"], "system");
    if (root.contains("schedule"))
        cfg.schedule = parse_schedule(root["schedule"], "schedule");
    if (root.contains("output")) {
        const json& out = root["output"];
        if (out.contains("dir"))
            cfg.output.dir = as_string(out["dir"], "output.dir");
        if (out.contains("formats")) {
            cfg.output.formats.clear();
            for (std::size_t i = 0; i < out["formats"].size(); ++i)
                cfg.output.formats.push_back(
                    as_string(out["formats"][i], "output.formats[" + std::to_string(i) + "]"));
        }
    }

    const json& task = require(root, "task", "");
    cfg.task_name = as_string(require(task, "name", "task"), "task.name");

    const bool has_seed = root.contains("seed");
    if (has_seed) {
        if (!root["seed"].is_number_integer())
            throw ConfigError("seed: expected an integer");
        cfg.seed = root["seed"].get<std::uint64_t>();
    }

    auto need_system = [&]() -> const SystemBlock& {
        if (!cfg.system)
            throw ConfigError("system: required by task '" + cfg.task_name + "'");
        return *cfg.system;
    };
    auto need_schedule = [&]() -> const ScheduleBlock& {
        if (!cfg.schedule)
            throw ConfigError("schedule: required by task '" + cfg.task_name + "'");
        return *cfg.schedule;
    };

    if (cfg.task_name == "simulate") {
        const SystemBlock& sys = need_system();
        need_schedule();
        SimulateTask t;
        t.initial_ket = as_ket(require(task, "initial", "task"), sys.dim, "task.initial");
        if (task.contains("record_every"))
            t.record_every = as_index(task["record_every"], "task.record_every");
        cfg.task = std::move(t);
    } else if (cfg.task_name == "open-simulate") {
        const SystemBlock& sys = need_system();
        need_schedule();
        OpenSimulateTask t;
        if (task.contains("initial_density")) {
            t.initial_density = as_square_matrix(task["initial_density"], sys.dim,
                                                 "task.initial_density");
        } else {
            const Vector psi = as_ket(require(task, "initial", "task"), sys.dim, "task.initial");
            t.initial_density = psi * psi.adjoint();
        }
        const json& chans = require(task, "channels", "task");
        if (!chans.is_array())
            throw ConfigError("task.channels: expected an array");
        for (std::size_t c = 0; c < chans.size(); ++c) {
            const std::string cpath = "task.channels[" + std::to_string(c) + "]";
            LindbladChannel ch;
            ch.op = as_square_matrix(require(chans[c], "operator", cpath), sys.dim,
                                     cpath + ".operator");
            ch.rate = as_number(require(chans[c], "rate", cpath), cpath + ".rate");
            if (ch.rate < 0.0)
                fail(cpath + ".rate", "rate must be non-negative");
            t.channels.push_back(std::move(ch));
        }
        if (task.contains("substeps"))
            t.substeps = as_index(task["substeps"], "task.substeps");
        if (task.contains("record_every"))
            t.record_every = as_index(task["record_every"], "task.record_every");
        cfg.task = std::move(t);
    } else if (cfg.task_name == "controllability") {
        need_system();
        ControllabilityTask t;
        if (task.contains("tol"))
            t.tol = as_number(task["tol"], "task.tol");
        cfg.task = std::move(t);
    } else if (cfg.task_name == "decompose") {
        DecomposeTask t;
        t.unitary = as_matrix(require(task, "unitary", "task"), "task.unitary");
        if (t.unitary.rows() != 2 || t.unitary.cols() != 2)
            throw ConfigError("task.unitary: expected a 2x2 matrix");
        if (task.contains("f_max"))
            t.f_max = as_number(task["f_max"], "task.f_max");
        if (task.contains("dt"))
            t.dt = as_number(task["dt"], "task.dt");
        cfg.task = std::move(t);
    } else if (cfg.task_name == "rwa-probe") {
        need_system();
        RwaProbeTask t;
        const json& dip = require(task, "dipoles", "task");
        if (!dip.is_array())
            throw ConfigError("task.dipoles: expected an array of {pair, d}");
        for (std::size_t i = 0; i < dip.size(); ++i) {
            const std::string dpath = "task.dipoles[" + std::to_string(i) + "]";
            const LevelPair p = as_pair(require(dip[i], "pair", dpath), dpath + ".pair");
            t.dipoles[p] = as_number(require(dip[i], "d", dpath), dpath + ".d");
        }
        t.spec.pair = as_pair(require(task, "pair", "task"), "task.pair");
        t.spec.amplitude = as_number(require(task, "amplitude", "task"), "task.amplitude");
        if (task.contains("phase"))
            t.spec.phase = as_number(task["phase"], "task.phase");
        t.spec.duration = as_number(require(task, "duration", "task"), "task.duration");
        t.spec.lab_slices = as_index(require(task, "lab_slices", "task"), "task.lab_slices");
        cfg.task = std::move(t);
    } else if (cfg.task_name == "grape") {
        const SystemBlock& sys = need_system();
        need_schedule();
        GrapeTask t;
        t.objective = parse_objective(require(task, "objective", "task"), sys, "task.objective");
        if (task.contains("max_iter"))
            t.options.max_iter = static_cast<int>(as_index(task["max_iter"], "task.max_iter"));
        if (task.contains("step"))
            t.options.step = as_number(task["step"], "task.step");
        if (task.contains("tol_grad"))
            t.options.tol_grad = as_number(task["tol_grad"], "task.tol_grad");
        if (cfg.schedule->fields.kind == FieldInit::Kind::RANDOM && !has_seed)
            throw ConfigError("seed: required when schedule.fields is random");
        cfg.task = std::move(t);
    } else if (cfg.task_name == "stirap") {
        StirapTask t;
        t.params.omega0 = as_number(require(task, "omega0", "task"), "task.omega0");
        t.params.width = as_number(require(task, "width", "task"), "task.width");
        t.params.delay = as_number(require(task, "delay", "task"), "task.delay");
        t.params.t0 = as_number(require(task, "t0", "task"), "task.t0");
        t.params.tF = as_number(require(task, "tF", "task"), "task.tF");
        t.params.slices = as_index(require(task, "slices", "task"), "task.slices");
        cfg.task = std::move(t);
    } else if (cfg.task_name == "learn") {
        const SystemBlock& sys = need_system();
        const ScheduleBlock& sched = need_schedule();
        if (!has_seed)
            throw ConfigError("seed: required for the stochastic 'learn' task");
        LearnTask t;
        t.objective = parse_objective(require(task, "objective", "task"), sys, "task.objective");
        t.config.population = static_cast<int>(
            as_index(require(task, "population", "task"), "task.population"));
        t.config.generations = static_cast<int>(
            as_index(require(task, "generations", "task"), "task.generations"));
        if (task.contains("elitism"))
            t.config.elitism = static_cast<int>(as_index(task["elitism"], "task.elitism"));
        if (task.contains("tournament"))
            t.config.tournament = static_cast<int>(as_index(task["tournament"], "task.tournament"));
        if (task.contains("crossover_rate"))
            t.config.crossover_rate = as_number(task["crossover_rate"], "task.crossover_rate");
        if (task.contains("mutation_sigma"))
            t.config.mutation_sigma = as_number(task["mutation_sigma"], "task.mutation_sigma");
        if (task.contains("shots")) {
            const json& s = task["shots"];
            if (s.is_string() && s.get<std::string>() == "unlimited")
                t.config.shots = kUnlimitedShots;
            else if (s.is_number_integer() && s.get<std::int64_t>() > 0)
                t.config.shots = s.get<std::uint64_t>();
            else
                throw ConfigError("task.shots: expected a positive integer or \"unlimited\"");
        }
        t.config.f_max = as_number(require(task, "f_max", "task"), "task.f_max");
        t.config.seed = cfg.seed;
        t.config.t0 = sched.t0;
        t.config.dt = sched.dt;
        t.config.slices = sched.slices;
        cfg.task = std::move(t);
    } else {
        std::string valid;
        for (const auto& name : known_tasks())
            valid += (valid.empty() ? "" : ", ") + name;
        throw ConfigError("task.name: unknown task '" + cfg.task_name + "' (valid: " + valid + ")");
    }

    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw ConfigError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), path);
}

} // namespace qctrl
