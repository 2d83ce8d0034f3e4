#include "qctrl/run.hpp"

#include <ostream>
#include <sstream>

#include "qctrl/controllability.hpp"
#include "qctrl/io.hpp"

namespace qctrl {

namespace {

ControlSystem build_system(const SystemBlock& blk) {
    try {
        std::vector<HermitianOperator> controls;
        for (const auto& c : blk.controls)
            controls.emplace_back(c, 1e-10);
        return ControlSystem(HermitianOperator(blk.drift, 1e-10), std::move(controls),
                             blk.labels);
    } catch (const NumericError& e) {
        throw ConfigError(std::string("system: ") + e.what());
    }
}

PulseSchedule build_schedule(const ScheduleBlock& blk, std::size_t num_fields,
                             std::uint64_t seed) {
    const auto m = static_cast<Eigen::Index>(num_fields);
    switch (blk.fields.kind) {
        case FieldInit::Kind::ZERO:
            return PulseSchedule::zero(blk.t0, blk.dt, blk.slices, m);
        case FieldInit::Kind::RANDOM: {
            std::mt19937_64 rng = substream(seed, 0, 0, 0xF1E1D5);
            std::uniform_real_distribution<double> unif(-blk.fields.amplitude,
                                                        blk.fields.amplitude);
            Eigen::MatrixXd values(blk.slices, m);
            for (Eigen::Index k = 0; k < blk.slices; ++k)
                for (Eigen::Index c = 0; c < m; ++c)
                    values(k, c) = unif(rng);
            return PulseSchedule(blk.t0, blk.dt, std::move(values));
        }
        case FieldInit::Kind::EXPLICIT:
            if (blk.fields.values.cols() != m)
                throw ConfigError("schedule.fields: expected one column per control");
            return PulseSchedule(blk.t0, blk.dt, blk.fields.values);
    }
    throw ConfigError("schedule.fields: invalid field init");
}

std::string schedule_csv(const PulseSchedule& sched, const std::vector<std::string>& labels) {
    std::vector<std::string> header = {"k", "t"};
    for (Eigen::Index m = 0; m < sched.num_fields(); ++m)
        header.push_back(static_cast<std::size_t>(m) < labels.size()
                             ? labels[static_cast<std::size_t>(m)]
                             : "f" + std::to_string(m + 1));
    std::string csv = csv_row(header);
    for (Eigen::Index k = 0; k < sched.num_slices(); ++k) {
        std::vector<double> row = {static_cast<double>(k), sched.boundary_time(k)};
        for (Eigen::Index m = 0; m < sched.num_fields(); ++m)
            row.push_back(sched.values()(k, m));
        csv += csv_numeric_row(row);
    }
    return csv;
}

std::string population_header(Eigen::Index dim, const std::string& prefix = "p") {
    std::vector<std::string> header = {"t"};
    for (Eigen::Index i = 0; i < dim; ++i)
        header.push_back(prefix + std::to_string(i + 1));
    return csv_row(header);
}

std::string ket_trajectory_csv(const KetTrajectory& traj) {
    std::string csv = population_header(traj.states.front().size());
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
        std::vector<double> row = {traj.times[s]};
        const Eigen::VectorXd pops = traj.states[s].cwiseAbs2();
        for (Eigen::Index i = 0; i < pops.size(); ++i)
            row.push_back(pops(i));
        csv += csv_numeric_row(row);
    }
    return csv;
}

std::string density_trajectory_csv(const DensityTrajectory& traj) {
    std::string csv = population_header(traj.states.front().rows());
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
        std::vector<double> row = {traj.times[s]};
        for (Eigen::Index i = 0; i < traj.states[s].rows(); ++i)
            row.push_back(traj.states[s](i, i).real());
        csv += csv_numeric_row(row);
    }
    return csv;
}

struct TaskRunner {
    const RunConfig& cfg;
    std::ostream& out;
    bool verbose;
    std::vector<Artifact> artifacts;

    void operator()(const SimulateTask& t) {
        const ControlSystem sys = build_system(*cfg.system);
        const PulseSchedule sched = build_schedule(*cfg.schedule, sys.num_controls(), cfg.seed);
        const KetTrajectory traj =
            propagate_ket(sys, sched, Ket(t.initial_ket), t.record_every);
        artifacts.push_back({"trajectory.csv", ket_trajectory_csv(traj)});
        out << "simulate: " << traj.states.size() << " samples, final norm "
            << format_number(traj.states.back().norm()) << "\n";
    }

    void operator()(const OpenSimulateTask& t) {
        const ControlSystem sys = build_system(*cfg.system);
        const PulseSchedule sched = build_schedule(*cfg.schedule, sys.num_controls(), cfg.seed);
        const DensityTrajectory traj = propagate_open(
            sys, sched, t.channels, validate_density(t.initial_density), t.substeps,
            t.record_every);
        artifacts.push_back({"trajectory.csv", density_trajectory_csv(traj)});
        out << "open-simulate: " << traj.states.size() << " samples, final trace "
            << format_number(traj.states.back().trace().real()) << "\n";
    }

    void operator()(const ControllabilityTask& t) {
        const ControlSystem sys = build_system(*cfg.system);
        const ControllabilityVerdict v = is_controllable(sys, t.tol);
        const LieBasis lie = generate_lie_algebra(sys, 0, t.tol);
        std::ostringstream rep;
        rep << "verdict=" << to_string(v.kind) << "\n"
            << "dim=" << v.lie_dimension << "\n"
            << "required=" << v.required << "\n"
            << "closed=" << (lie.closed ? "true" : "false") << "\n";
        artifacts.push_back({"report.txt", rep.str()});
        out << to_string(v.kind) << " dim=" << v.lie_dimension
            << " required=" << v.required << "\n";
        if (sys.num_controls() > 0) {
            const OrthogonalityReport og = orthogonality_check(sys.controls(), t.tol);
            std::string gram;
            for (Eigen::Index r = 0; r < og.gram.rows(); ++r) {
                std::vector<double> row(og.gram.cols());
                for (Eigen::Index c = 0; c < og.gram.cols(); ++c)
                    row[static_cast<std::size_t>(c)] = og.gram(r, c);
                gram += csv_numeric_row(row);
            }
            artifacts.push_back({"gram.csv", gram});
        }
    }

    void operator()(const DecomposeTask& t) {
        const std::vector<RotationStep> steps = decompose_su2(t.unitary);
        std::string csv = csv_row({"step", "generator", "axis", "coefficient",
                                   "duration", "amplitude"});
        for (std::size_t i = 0; i < steps.size(); ++i) {
            const char* axis = steps[i].generator == kGeneratorY ? "y" : "x";
            csv += std::to_string(i) + "," + std::to_string(steps[i].generator) + "," + axis +
                   "," + format_number(steps[i].coefficient) + "," +
                   format_number(steps[i].duration) + "," +
                   format_number(steps[i].amplitude) + "\n";
        }
        artifacts.push_back({"steps.csv", csv});
        const PulseSchedule sched = pulses_from_steps(steps, t.f_max, t.dt);
        artifacts.push_back({"schedule.csv", schedule_csv(sched, {"f_y", "f_x"})});
        out << "decompose: " << steps.size() << " steps, " << sched.num_slices()
            << " slices\n";
    }

    void operator()(const RwaProbeTask& t) {
        const ControlSystem sys = build_system(*cfg.system);
        const TransitionTable table = transition_table(sys.drift(), t.dipoles);
        const RwaProbeReport rep = rwa_consistency_probe(table, t.spec);
        const Eigen::Index n = table.dim();
        std::vector<std::string> header = {"t"};
        for (Eigen::Index i = 0; i < n; ++i)
            header.push_back("p_lab" + std::to_string(i + 1));
        for (Eigen::Index i = 0; i < n; ++i)
            header.push_back("p_rwa" + std::to_string(i + 1));
        std::string csv = csv_row(header);
        for (std::size_t s = 0; s < rep.times.size(); ++s) {
            std::vector<double> row = {rep.times[s]};
            for (Eigen::Index i = 0; i < n; ++i)
                row.push_back(rep.lab_populations[s](i));
            for (Eigen::Index i = 0; i < n; ++i)
                row.push_back(rep.rwa_populations[s](i));
            csv += csv_numeric_row(row);
        }
        artifacts.push_back({"probe.csv", csv});
        artifacts.push_back({"report.txt", "max_population_deviation=" +
                                               format_number(rep.max_population_deviation) +
                                               "\n"});
        out << "rwa-probe: max population deviation "
            << format_number(rep.max_population_deviation) << "\n";
    }

    void operator()(const GrapeTask& t) {
        const ControlSystem sys = build_system(*cfg.system);
        const PulseSchedule sched0 = build_schedule(*cfg.schedule, sys.num_controls(), cfg.seed);
        const OptimizeResult res = optimize(sys, sched0, t.objective, t.options);
        artifacts.push_back({"schedule.csv", schedule_csv(res.schedule, sys.labels())});
        std::ostringstream rep;
        rep << "iterations=" << res.report.iterations << "\n"
            << "converged=" << (res.report.converged ? "true" : "false") << "\n"
            << "final_a_term=" << format_number(res.report.final_a_term) << "\n"
            << "final_cost=" << format_number(res.report.final_cost) << "\n"
            << "j_history\n";
        for (double j : res.report.j_history)
            rep << format_number(j) << "\n";
        artifacts.push_back({"report.txt", rep.str()});
        out << "grape: " << res.report.iterations << " iterations, objective "
            << format_number(res.report.final_a_term) << "\n";
    }

    void operator()(const StirapTask& t) {
        const StirapResult res = simulate_stirap(t.params);
        std::string csv = csv_row({"t", "p1", "p2", "p3", "dark"});
        for (std::size_t s = 0; s < res.times.size(); ++s)
            csv += csv_numeric_row({res.times[s], res.populations[s](0), res.populations[s](1),
                                    res.populations[s](2), res.dark_overlap[s]});
        artifacts.push_back({"populations.csv", csv});

        const PulseSchedule sched = stirap_schedule(t.params);
        std::vector<HermitianOperator> hams;
        std::vector<double> times;
        for (Eigen::Index k = 0; k < sched.num_slices(); ++k) {
            hams.push_back(lambda_rwa(sched.values()(k, 0), sched.values()(k, 1)));
            times.push_back(sched.midpoint_time(k));
        }
        const EigenFrame frame = eigenframe(hams, times);
        std::string eig = csv_row({"t", "eps1", "eps2", "eps3"});
        for (std::size_t s = 0; s < frame.times.size(); ++s)
            eig += csv_numeric_row({frame.times[s], frame.eigenvalues[s](0),
                                    frame.eigenvalues[s](1), frame.eigenvalues[s](2)});
        artifacts.push_back({"eigenvalues.csv", eig});

        std::ostringstream rep;
        rep << "efficiency=" << format_number(res.efficiency) << "\n"
            << "max_intermediate=" << format_number(res.max_intermediate) << "\n"
            << "dark_overlap_min=" << format_number(res.dark_overlap_min) << "\n"
            << "adiabaticity_margin=" << format_number(adiabaticity_margin(frame)) << "\n";
        artifacts.push_back({"report.txt", rep.str()});
        out << "stirap: efficiency " << format_number(res.efficiency)
            << ", max intermediate " << format_number(res.max_intermediate) << "\n";
    }

    void operator()(const LearnTask& t) {
        const ControlSystem sys = build_system(*cfg.system);
        const LearningResult res = run_learning(sys, t.objective, t.config);
        std::string csv = csv_row({"gen", "best", "mean", "worst"});
        for (const auto& rec : res.records)
            csv += csv_numeric_row({static_cast<double>(rec.generation), rec.best, rec.mean,
                                    rec.worst});
        artifacts.push_back({"generations.csv", csv});
        const PulseSchedule best = genes_to_schedule(res.best.genes, t.config, sys);
        artifacts.push_back({"best_field.csv", schedule_csv(best, sys.labels())});
        artifacts.push_back({"report.txt",
                             "best_fitness=" + format_number(*res.best.fitness) + "\n"});
        out << "learn: best fitness " << format_number(*res.best.fitness) << "\n";
    }
};

} // namespace

void run_task(const RunConfig& cfg, const RunOptions& opts, std::ostream& out) {
    TaskRunner runner{cfg, out, opts.verbose, {}};
    std::visit(runner, cfg.task);
    const std::string dir = opts.out_dir.empty() ? cfg.output.dir : opts.out_dir;
    const std::vector<ManifestEntry> manifest = write_outputs(runner.artifacts, dir);
    if (opts.verbose)
        for (const auto& e : manifest)
            out << e.filename << " (" << e.bytes << " bytes)\n";
}

int run(const RunConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        run_task(cfg, opts, out);
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}

} // namespace qctrl
