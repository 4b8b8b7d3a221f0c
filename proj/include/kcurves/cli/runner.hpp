#pragma once

#include <yaml-cpp/yaml.h>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kcurves/cli/config.hpp"
#include "kcurves/cli/csv.hpp"
#include "kcurves/datasets.hpp"
#include "kcurves/experiments.hpp"
#include "kcurves/fitting.hpp"
#include "kcurves/geometry.hpp"
#include "kcurves/lattice_theory.hpp"
#include "kcurves/parallel.hpp"
#include "kcurves/random.hpp"
#include "kcurves/spectral_predict.hpp"
#include "kcurves/version.hpp"

namespace kcurves::cli {

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"teacher-student", "lattice-mse",      "kpca",         "appendix-h",
                                                "effdim",          "realdata-regress", "realdata-svm", "fit"};
    return names;
}

struct RunOptions {
    std::filesystem::path config;
    std::optional<std::filesystem::path> output;  // overrides the config's `output`
    std::optional<std::uint64_t> seed;            // overrides the config's `seed`
    bool resume = false;
};

struct NamedFit {
    std::string name;
    ExponentFit fit;
};

struct RunResult {
    std::filesystem::path csv;
    std::filesystem::path metadata;
    CsvTable table;
    std::vector<NamedFit> fits;
    YAML::Node results{YAML::NodeType::Map};
    double max_jitter = 0.0;
};

inline std::filesystem::path metadata_path(const std::filesystem::path& csv) { return csv.string() + ".meta.yaml"; }
inline std::filesystem::path cells_path(const std::filesystem::path& csv) { return csv.string() + ".cells"; }

/// Completed sweep cells, one line per cell: `index jitter count v_1 ... v_count`. The first
/// line fingerprints the resolved config so a stale file is never mixed into another sweep.
class CellStore {
public:
    CellStore(std::filesystem::path path, std::uint64_t fingerprint, bool resume) : path_(std::move(path)) {
        const std::string header = "# kcurves cells " + std::to_string(fingerprint);
        if (resume && std::filesystem::exists(path_)) {
            std::ifstream in(path_);
            std::string line;
            if (!std::getline(in, line) || line != header)
                throw ConfigError("--resume: " + path_.string() + " belongs to a different configuration", 0);
            while (std::getline(in, line)) {
                std::istringstream ss(line);
                std::size_t index = 0, count = 0;
                CellResult cell;
                if (!(ss >> index >> cell.jitter >> count)) break;  // torn final line
                cell.values.resize(count);
                bool ok = true;
                for (auto& v : cell.values) ok = ok && static_cast<bool>(ss >> v);
                if (!ok) break;
                done_[index] = std::move(cell);
            }
            out_.open(path_, std::ios::app);
        } else {
            if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
            out_.open(path_, std::ios::trunc);
            out_ << header << '\n';
        }
        if (!out_) throw ConfigError("cannot write " + path_.string(), 0);
        out_.flush();
    }

    [[nodiscard]] const CellResult* find(std::size_t index) const {
        const auto it = done_.find(index);
        return it == done_.end() ? nullptr : &it->second;
    }

    [[nodiscard]] std::size_t restored() const { return done_.size(); }

    void put(std::size_t index, const CellResult& cell) {
        std::string line = std::to_string(index) + " " + format_double(cell.jitter) + " " + std::to_string(cell.values.size());
        for (double v : cell.values) line += " " + format_double(v);
        std::lock_guard lock(mutex_);
        out_ << line << '\n';
        out_.flush();
    }

private:
    std::filesystem::path path_;
    std::map<std::size_t, CellResult> done_;
    std::ofstream out_;
    std::mutex mutex_;
};

/// State shared by every subcommand: master seed, output paths, and the cell sweep engine.
class Context {
public:
    Context(std::string command, std::uint64_t seed, std::filesystem::path output, bool resume)
        : command_(std::move(command)), seed_(seed), output_(std::move(output)), resume_(resume) {}

    [[nodiscard]] const std::string& command() const { return command_; }
    [[nodiscard]] std::uint64_t seed() const { return seed_; }
    [[nodiscard]] const std::filesystem::path& output() const { return output_; }

    /// Closes the config (unknown keys become errors) and opens the cell store.
    void begin(Section& top) {
        resolved_ = top.finish();
        YAML::Emitter e;
        e << resolved_;
        store_.emplace(cells_path(output_), stable_hash(command_ + "\n" + e.c_str()), resume_);
    }

    [[nodiscard]] const YAML::Node& resolved() const { return resolved_; }

    /// Runs fn(i) for every cell not already in the store; results come back in index order.
    std::vector<CellResult> cells(std::size_t count, const std::function<CellResult(std::size_t)>& fn) {
        if (!store_) throw ConfigError("internal: cells() before begin()", 0);
        std::vector<CellResult> out(count);
        std::vector<std::size_t> todo;
        for (std::size_t i = 0; i < count; ++i) {
            if (const CellResult* c = store_->find(i)) out[i] = *c;
            else todo.push_back(i);
        }
        parallel_for(0, todo.size(), [&](std::size_t k) {
            const std::size_t i = todo[k];
            out[i] = fn(i);
            store_->put(i, out[i]);
        });
        return out;
    }

private:
    std::string command_;
    std::uint64_t seed_;
    std::filesystem::path output_;
    bool resume_;
    YAML::Node resolved_;
    std::optional<CellStore> store_;
};

namespace detail {

inline double max_jitter(const std::vector<CellResult>& cells) {
    double j = 0.0;
    for (const auto& c : cells) j = std::max(j, c.jitter);
    return j;
}

inline LabeledDataset load_dataset(Section& s) {
    const auto kind = s.require<std::string>("kind");
    if (kind == "mnist") {
        const auto images = existing_path(s, "images");
        const auto labels = existing_path(s, "labels");
        return load_mnist(images, labels);
    }
    if (kind == "cifar") {
        const auto batches = s.require<std::vector<std::string>>("batches");
        std::vector<std::filesystem::path> paths;
        for (const auto& b : batches) {
            if (!std::filesystem::exists(b)) s.fail("batches", "file not found: " + b);
            paths.emplace_back(b);
        }
        const auto group = s.get<std::vector<int>>("positive_classes", {0, 1, 2, 3, 4});
        BinarizeScheme scheme;
        try {
            scheme = BinarizeScheme::cifar_split(group);
        } catch (const DomainError& e) {
            s.fail("positive_classes", e.what());
        }
        return load_cifar(paths, scheme);
    }
    s.fail("kind", "expected mnist or cifar");
}

inline ExponentFit fit_curve(const LearningCurve& c, const std::optional<FitWindow>& window) {
    const auto xs = c.ns();
    const auto ys = c.means();
    return fit_power_law(xs, ys, window.value_or(FitWindow::last_decade(xs)));
}

}  // namespace detail

inline RunResult run_teacher_student(Section& top, Context& ctx) {
    const KernelSpec teacher = kernel_at(top, "teacher");
    const KernelSpec student = kernel_at(top, "student");
    const auto dims = top.require<std::vector<int>>("d");
    for (int d : dims)
        if (d < 1) top.fail("d", "dimensions must be >= 1");
    const bool sigma_from_d = top.get<bool>("sigma_from_d", false);
    const auto n_grid = size_grid(top, "n_grid");
    const auto n_test = top.get<std::size_t>("n_test", 1000);
    const auto replicas = top.get<std::size_t>("replicas", 10);
    const auto ridge = top.get<double>("ridge", 0.0);
    const auto window = fit_window(top);
    if (replicas < 1) top.fail("replicas", "must be >= 1");
    if (n_test < 1) top.fail("n_test", "must be >= 1");
    ctx.begin(top);

    auto spec_for = [&](int d) {
        TeacherStudentSpec spec{teacher, student, d, n_grid, n_test, ridge};
        if (sigma_from_d) spec.teacher.sigma = spec.student.sigma = d;
        return spec;
    };
    const auto cells = ctx.cells(dims.size() * replicas, [&](std::size_t c) {
        const std::size_t di = c / replicas, r = c % replicas;
        const int d = dims[di];
        return teacher_student_replica(spec_for(d), cell_seed(ctx.seed(), ctx.command(), {static_cast<std::uint64_t>(d), r}));
    });

    RunResult res;
    res.table.extra_columns = {"d"};
    res.max_jitter = detail::max_jitter(cells);
    for (std::size_t di = 0; di < dims.size(); ++di) {
        const std::span<const CellResult> mine(cells.data() + di * replicas, replicas);
        const LearningCurve curve = aggregate(n_grid, mine);
        for (const auto& p : curve.points) res.table.add(p, {static_cast<double>(dims[di])});
        if (n_grid.size() >= 3) {
            try {
                res.fits.push_back({"d=" + std::to_string(dims[di]), detail::fit_curve(curve, window)});
            } catch (const FitError&) {
            }
        }
    }
    return res;
}

inline RunResult run_lattice_mse(Section& top, Context& ctx) {
    const KernelSpec teacher = kernel_at(top, "teacher");
    const KernelSpec student = kernel_at(top, "student");
    const int d = top.require<int>("d");
    if (d < 1) top.fail("d", "must be >= 1");
    const double L = top.get<double>("L", 1.0);
    if (!(L > 0.0)) top.fail("L", "must be positive");
    const auto m_grid = size_grid(top, "m");
    const StarSumConfig cfg = top.with("star_sum", [](Section& s) { return star_sum_config(s); });
    const auto window = fit_window(top);
    ctx.begin(top);

    const auto cells = ctx.cells(m_grid.size(), [&](std::size_t i) {
        return CellResult{{exact_lattice_mse(teacher, student, d, L, m_grid[i], cfg)}, 0.0};
    });
    RunResult res;
    res.table.extra_columns = {"m"};
    LearningCurve curve;
    for (std::size_t i = 0; i < m_grid.size(); ++i) {
        const CurvePoint p{std::pow(static_cast<double>(m_grid[i]), d), cells[i].values[0], 0.0, 1};
        curve.points.push_back(p);
        res.table.add(p, {static_cast<double>(m_grid[i])});
    }
    if (m_grid.size() >= 3) res.fits.push_back({"lattice", detail::fit_curve(curve, window)});
    const double beta = theorem_beta(spectral_exponent(teacher, d), spectral_exponent(student, d), d);
    res.results["theorem_beta"] = std::isinf(beta) ? std::string("inf") : format_double(beta);
    return res;
}

inline RunResult run_kpca(Section& top, Context& ctx) {
    const auto source = top.get<std::string>("source", "synthetic");
    const KernelSpec student = kernel_at(top, "student");
    const auto n_tilde = top.require<std::size_t>("n_tilde");
    if (n_tilde < 3) top.fail("n_tilde", "must be >= 3");
    const auto window = fit_window(top);
    RunResult res;
    std::function<CellResult()> compute;
    std::size_t draws = 1;
    if (source == "synthetic") {
        const KernelSpec teacher = kernel_at(top, "teacher");
        const int d = top.require<int>("d");
        if (d < 1) top.fail("d", "must be >= 1");
        draws = top.get<std::size_t>("draws", 1);
        if (draws < 1) top.fail("draws", "must be >= 1");
        ctx.begin(top);
        compute = [&, teacher, d] {
            const KpcaResult k = kpca_synthetic(teacher, student, d, n_tilde, cell_seed(ctx.seed(), ctx.command(), {0}),
                                                window, draws);
            CellResult c;
            for (const auto& p : k.tail.points) c.values.push_back(p.mean);
            for (Eigen::Index i = 0; i < k.decomposition.eigenvalues.size(); ++i) c.values.push_back(k.decomposition.eigenvalues(i));
            return c;
        };
    } else if (source == "dataset") {
        const LabeledDataset data = top.with("dataset", [](Section& s) { return detail::load_dataset(s); });
        if (n_tilde > data.points.size()) top.fail("n_tilde", "larger than the dataset");
        ctx.begin(top);
        compute = [&, data] {
            Rng rng = make_rng(cell_seed(ctx.seed(), ctx.command(), {0}));
            const auto idx = sample_without_replacement(data.points.size(), n_tilde, rng);
            Eigen::VectorXd y(static_cast<Eigen::Index>(n_tilde));
            for (std::size_t i = 0; i < n_tilde; ++i) y(static_cast<Eigen::Index>(i)) = data.labels(static_cast<Eigen::Index>(idx[i]));
            const KpcaResult k = kpca_from_labels(student, data.points.subset(idx), y, window);
            CellResult c;
            for (const auto& p : k.tail.points) c.values.push_back(p.mean);
            for (Eigen::Index i = 0; i < k.decomposition.eigenvalues.size(); ++i) c.values.push_back(k.decomposition.eigenvalues(i));
            return c;
        };
    } else {
        top.fail("source", "expected synthetic or dataset");
    }
    const auto cells = ctx.cells(1, [&](std::size_t) { return compute(); });
    res.table.extra_columns = {"eigenvalue"};
    LearningCurve tail;
    for (std::size_t r = 0; r < n_tilde; ++r) {
        const CurvePoint p{static_cast<double>(r + 1), cells[0].values[r], 0.0, draws};
        tail.points.push_back(p);
        res.table.add(p, {cells[0].values[n_tilde + r]});
    }
    const BetaEstimate b = beta_from_tail(tail, window);
    res.fits.push_back({"tail", b.fit});
    res.results["beta_hat"] = format_double(b.beta);
    return res;
}

inline RunResult run_appendix_h(Section& top, Context& ctx) {
    const KernelSpec teacher = kernel_at(top, "teacher");
    const KernelSpec student = kernel_at(top, "student");
    const int d = top.require<int>("d");
    if (d < 1) top.fail("d", "must be >= 1");
    const auto modes = top.get<std::size_t>("modes", 100000);
    const auto n_grid = size_grid(top, "n_grid");
    if (n_grid.back() >= modes) top.fail("n_grid", "every n must stay below the number of modes");
    const auto window = fit_window(top);
    const SpectralTail at = spectral_exponent(teacher, d), as = spectral_exponent(student, d);
    SpectralWeights sw;
    try {
        sw = power_law_weights(at.alpha, as.alpha, d, modes);
    } catch (const DomainError& e) {
        top.fail("teacher", e.what());
    }
    ctx.begin(top);
    const auto cells = ctx.cells(n_grid.size(), [&](std::size_t i) {
        const auto p = selfconsistent_point(sw, static_cast<double>(n_grid[i]));
        return CellResult{{p.mse, p.t, p.gamma}, 0.0};
    });
    RunResult res;
    res.table.extra_columns = {"t", "gamma"};
    LearningCurve curve;
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        const CurvePoint p{static_cast<double>(n_grid[i]), cells[i].values[0], 0.0, 1};
        curve.points.push_back(p);
        res.table.add(p, {cells[i].values[1], cells[i].values[2]});
    }
    if (n_grid.size() >= 3) res.fits.push_back({"selfconsistent", detail::fit_curve(curve, window)});
    const double theta = density_exponent(as.alpha, d);
    const double q = weight_exponent(theta, density_exponent(at.alpha, d));
    res.results["theta"] = format_double(theta);
    res.results["q"] = format_double(q);
    res.results["asymptotic_exponent"] = format_double(asymptotic_exponent(theta, q));
    res.results["theorem_beta"] = format_double(theorem_beta(at, as, d));
    return res;
}

inline RunResult run_effdim(Section& top, Context& ctx) {
    const auto source = top.get<std::string>("source", "hypersphere");
    PointCloud pool;
    if (source == "hypersphere") {
        const int d = top.require<int>("d");
        if (d < 1) top.fail("d", "must be >= 1");
        const auto n = top.require<std::size_t>("n");
        pool = sample_hypersphere(n, d, cell_seed(ctx.seed(), "effdim-pool", {}));
    } else if (source == "dataset") {
        pool = top.with("dataset", [](Section& s) { return detail::load_dataset(s); }).points;
    } else {
        top.fail("source", "expected hypersphere or dataset");
    }
    const auto sizes = size_grid(top, "sizes");
    if (sizes.size() < 3) top.fail("sizes", "need at least three subset sizes");
    if (sizes.front() < 2 || sizes.back() > pool.size()) top.fail("sizes", "subset sizes must lie in [2, pool size]");
    const auto replicas = top.get<std::size_t>("replicas", 10);
    if (replicas < 1) top.fail("replicas", "must be >= 1");
    const auto window = fit_window(top);
    ctx.begin(top);
    const auto cells = ctx.cells(sizes.size(), [&](std::size_t s) {
        return CellResult{nn_replica_means(pool, sizes[s], replicas, cell_seed(ctx.seed(), ctx.command(), {s})), 0.0};
    });
    RunResult res;
    LearningCurve curve;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        const CurvePoint p = summarize(static_cast<double>(sizes[s]), cells[s].values);
        curve.points.push_back(p);
        res.table.add(p);
    }
    const ExponentFit fit = detail::fit_curve(curve, window);
    res.fits.push_back({"nn_distance", fit});
    res.results["d_eff"] = format_double(-1.0 / fit.exponent);
    return res;
}

inline RunResult run_realdata(Section& top, Context& ctx, RealDataTask task) {
    const LabeledDataset data = top.with("dataset", [](Section& s) { return detail::load_dataset(s); });
    RealDataSpec spec;
    spec.task = task;
    spec.student = kernel_at(top, "student");
    spec.n_grid = size_grid(top, "n_grid");
    spec.n_test = top.get<std::size_t>("n_test", 1000);
    const auto replicas = top.get<std::size_t>("replicas", 10);
    if (replicas < 1) top.fail("replicas", "must be >= 1");
    if (spec.n_grid.back() + spec.n_test > data.points.size()) top.fail("n_grid", "n_max + n_test exceeds the dataset size");
    if (task == RealDataTask::Svm) {
        spec.svm = top.with("svm", [](Section& s) {
            SvmOptions o;
            o.C = s.get<double>("C", o.C);
            o.tol = s.get<double>("tol", o.tol);
            o.max_updates_per_point = s.get<double>("max_updates_per_point", o.max_updates_per_point);
            if (!(o.C > 0.0) || !(o.tol > 0.0)) s.fail("C", "C and tol must be positive");
            return o;
        });
    }
    const auto window = fit_window(top);
    ctx.begin(top);
    const auto cells = ctx.cells(replicas, [&](std::size_t r) {
        return realdata_replica(data, spec, cell_seed(ctx.seed(), ctx.command(), {r}));
    });
    RunResult res;
    res.max_jitter = detail::max_jitter(cells);
    const LearningCurve curve = aggregate(spec.n_grid, cells);
    for (const auto& p : curve.points) res.table.add(p);
    if (spec.n_grid.size() >= 3) {
        try {
            res.fits.push_back({task == RealDataTask::Svm ? "error_rate" : "mse", detail::fit_curve(curve, window)});
        } catch (const Error&) {
            // an error rate of exactly zero has no logarithm
        }
    }
    return res;
}

/// Re-fits a stored curve; writes its local log-log slopes as the output CSV. Curves that
/// carry a `d` column are fitted per dimension.
inline RunResult run_fit(Section& top, Context& ctx) {
    const auto input = existing_path(top, "input");
    const auto window = fit_window(top);
    ctx.begin(top);
    const CsvTable in = read_csv(input);
    std::map<double, LearningCurve> groups;
    const bool by_d = !in.extra_columns.empty() && in.extra_columns[0] == "d";
    for (const auto& r : in.rows) groups[by_d ? r.extra[0] : 0.0].points.push_back(r.point);
    RunResult res;
    if (by_d) res.table.extra_columns = {"d"};
    for (const auto& [d, curve] : groups) {
        const auto xs = curve.ns();
        const auto ys = curve.means();
        for (const auto& s : local_slopes(xs, ys)) {
            const CurvePoint p{s.x_mid, s.slope, 0.0, 1};
            if (by_d) res.table.add(p, {d});
            else res.table.add(p);
        }
        res.fits.push_back({by_d ? "d=" + format_double(d) : "curve", detail::fit_curve(curve, window)});
    }
    return res;
}

inline void write_metadata(const RunResult& res, const Context& ctx, double wall_seconds) {
    YAML::Emitter e;
    e << YAML::BeginMap;
    e << YAML::Key << "command" << YAML::Value << ctx.command();
    e << YAML::Key << "version" << YAML::Value << kVersion;
    e << YAML::Key << "seed" << YAML::Value << ctx.seed();
    e << YAML::Key << "workers" << YAML::Value << worker_count();
    e << YAML::Key << "wall_time_seconds" << YAML::Value << format_double(wall_seconds);
    e << YAML::Key << "max_jitter" << YAML::Value << format_double(res.max_jitter);
    e << YAML::Key << "csv" << YAML::Value << res.csv.filename().string();
    e << YAML::Key << "config" << YAML::Value << ctx.resolved();
    e << YAML::Key << "fits" << YAML::Value << YAML::BeginSeq;
    for (const auto& f : res.fits) {
        e << YAML::BeginMap;
        e << YAML::Key << "name" << YAML::Value << f.name;
        e << YAML::Key << "exponent" << YAML::Value << format_double(f.fit.exponent);
        e << YAML::Key << "log_prefactor" << YAML::Value << format_double(f.fit.log_prefactor);
        e << YAML::Key << "window" << YAML::Value << YAML::Flow << YAML::BeginSeq << format_double(f.fit.window.lo)
          << format_double(f.fit.window.hi) << YAML::EndSeq;
        e << YAML::Key << "r_squared" << YAML::Value << format_double(f.fit.r_squared);
        e << YAML::Key << "points" << YAML::Value << f.fit.points;
        e << YAML::EndMap;
    }
    e << YAML::EndSeq;
    e << YAML::Key << "results" << YAML::Value << res.results;
    e << YAML::EndMap;
    write_text(res.metadata, std::string(e.c_str()) + "\n");
}

/// Runs `command` on the config file; writes the CSV and its metadata next to each other.
inline RunResult run(const std::string& command, const RunOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    Section top(load_config_file(opt.config), "");
    std::uint64_t seed = top.get<std::uint64_t>("seed", 0);
    if (opt.seed) top.set("seed", seed = *opt.seed);
    std::string output = top.get<std::string>("output", "");
    if (opt.output) top.set("output", output = opt.output->string());
    if (output.empty()) throw ConfigError("no output path: set `output` in the config or pass --output", 0);
    Context ctx(command, seed, output, opt.resume);

    RunResult res;
    if (command == "teacher-student") res = run_teacher_student(top, ctx);
    else if (command == "lattice-mse") res = run_lattice_mse(top, ctx);
    else if (command == "kpca") res = run_kpca(top, ctx);
    else if (command == "appendix-h") res = run_appendix_h(top, ctx);
    else if (command == "effdim") res = run_effdim(top, ctx);
    else if (command == "realdata-regress") res = run_realdata(top, ctx, RealDataTask::Regression);
    else if (command == "realdata-svm") res = run_realdata(top, ctx, RealDataTask::Svm);
    else if (command == "fit") res = run_fit(top, ctx);
    else throw ConfigError("unknown subcommand '" + command + "'", 0);

    res.csv = ctx.output();
    res.metadata = metadata_path(res.csv);
    write_text(res.csv, res.table.str());
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_metadata(res, ctx, wall);
    return res;
}

}  // namespace kcurves::cli
