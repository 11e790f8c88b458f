#include "gqc/cli/commands.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "gqc/features/features.hpp"
#include "gqc/parallel.hpp"
#include "gqc/trainer/trainer.hpp"

namespace gqc::cli {

using nlohmann::json;

spanlab::AcceptThresholds default_thresholds(const models::SpinModelSpec& model) {
    spanlab::AcceptThresholds t;
    switch (model.model) {
        case models::SpinModel::MG:
            if (model.n_sites <= 6) {
                t = {0.01, spanlab::OverlapVariant::PROB_SUM, 0.99};
            } else {
                t = {0.005, spanlab::OverlapVariant::AMP_SUM, 0.995};
            }
            break;
        case models::SpinModel::AKLT:
            t = {0.02, spanlab::OverlapVariant::AMP_SUM, 0.995};
            break;
        case models::SpinModel::XXZ:
            t = {0.017, spanlab::OverlapVariant::AMP_SUM, 0.995};
            break;
    }
    return t;
}

double default_rank_eps(const models::SpinModelSpec& model) {
    return model.model == models::SpinModel::XXZ ? 0.03 : 0.05;
}

double default_subset_cap(const models::SpinModelSpec& model) {
    switch (model.model) {
        case models::SpinModel::MG: return model.n_sites >= 10 ? 0.1 : 0.05;
        case models::SpinModel::AKLT: return 0.08;
        case models::SpinModel::XXZ: return 0.1;
    }
    return 0.1;
}

namespace {

std::string timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::ostringstream os;
    os << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_manifest(const fs::path& run_dir, const trainer::TrainConfig& cfg,
                    const trainer::TrainResult& result) {
    json m;
    m["config"] = "config.json";
    m["config_hash"] = hash_label(trainer::config_to_json(cfg));
    m["seed"] = cfg.seed;
    m["model"] = cfg.model.label();
    m["mode"] = trainer::grad_mode_name(cfg.mode);
    m["completed_at"] = timestamp();
    m["converged"] = result.converged;
    m["iterations"] = result.iterations;
    m["e0_reference"] = result.e0_reference;
    m["layout"] = {{"log", "log.csv"},
                   {"final_checkpoint", "checkpoints/final.ckpt"},
                   {"ensemble", "ensemble.bin"},
                   {"certification", "certification/report.json"}};
    std::ofstream f(run_dir / "manifest.json");
    f << m.dump(2) << "\n";
}

} // namespace

fs::path cmd_train(const std::optional<std::string>& config_path,
                   const std::optional<std::string>& preset,
                   const std::optional<std::uint64_t>& seed_override,
                   const fs::path& out_dir) {
    require(config_path.has_value() != preset.has_value(),
            "train: give exactly one of --config or --preset");
    trainer::TrainConfig cfg = config_path ? trainer::load_config(*config_path)
                                           : trainer::load_preset(*preset);
    if (seed_override) cfg.seed = *seed_override;
    cfg.validate();

    fs::create_directories(out_dir);
    const trainer::TrainResult result = trainer::train(cfg, out_dir);
    write_manifest(out_dir, cfg, result);
    return out_dir;
}

fs::path cmd_generate(const fs::path& checkpoint, long count,
                      const std::optional<std::uint64_t>& seed,
                      const fs::path& out_file) {
    require(count >= 0, "generate: count must be non-negative");
    const io::Checkpoint ckpt = io::load_checkpoint(checkpoint);
    const trainer::TrainConfig& cfg = ckpt.config;
    const auto tmpl = trainer::template_for(cfg);
    const auto h = qsim::compile(cfg.model.hamiltonian());
    const std::uint64_t gen_seed = seed.value_or(cfg.seed);

    io::Ensemble ens;
    ens.model = cfg.model;
    ens.depth = cfg.depth;
    ens.n_qubits = cfg.model.n_qubits();
    ens.n_params = tmpl.n_params;
    ens.seed = gen_seed;
    const Eigen::Index d = static_cast<Eigen::Index>(dim_of(ens.n_qubits));
    ens.states.resize(d, count);
    ens.thetas.resize(tmpl.n_params, count);
    ens.energies.resize(count);

    for_each_index(count, [&](long i) {
        Eigen::VectorXd theta0(tmpl.n_params);
        RandomStream prior = substream(gen_seed, "gen_prior", i);
        for (int p = 0; p < tmpl.n_params; ++p) theta0(p) = prior.normal();
        RandomStream eps = substream(gen_seed, "gen_latent", i);
        const auto latent =
            generator::encode(ckpt.params, cfg.network, theta0, eps);
        const Eigen::VectorXd theta =
            generator::decode(ckpt.params, cfg.network, latent.z);
        ansatz::ParamVector tv(theta.data(), theta.data() + theta.size());
        const auto psi = ansatz::prepare(tmpl, tv);
        for (Eigen::Index r = 0; r < d; ++r) ens.states(r, i) = psi.amplitudes[r];
        ens.thetas.col(i) = theta;
        ens.energies(i) = qsim::expectation(psi, h);
    });

    if (out_file.has_parent_path())
        fs::create_directories(out_file.parent_path());
    io::save_ensemble(out_file, ens);
    return out_file;
}

fs::path cmd_certify(const fs::path& ensemble_file, const fs::path& out_dir,
                     const CertifyOptions& opts) {
    const io::Ensemble ens = io::load_ensemble(ensemble_file);
    require(ens.count() > 0, "certify: ensemble is empty");
    fs::create_directories(out_dir);

    const auto h = ens.model.hamiltonian();
    require(ens.n_qubits == h.n_qubits, "certify: ensemble/model mismatch");
    const auto gs = models::exact_diagonalize(h);

    // MG heatmaps use the deterministic dimer-convention basis; the encoded
    // models use the ED basis directly.
    Eigen::MatrixXcd basis = gs.basis;
    if (ens.model.model == models::SpinModel::MG)
        basis = models::mg_reference_basis(ens.n_qubits, gs);

    spanlab::AcceptThresholds thr = default_thresholds(ens.model);
    if (opts.delta_e_rel) thr.delta_e_rel = *opts.delta_e_rel;
    if (opts.variant) thr.variant = *opts.variant;
    if (opts.overlap_cut) thr.overlap_cut = *opts.overlap_cut;
    const double rank_eps = opts.rank_eps.value_or(default_rank_eps(ens.model));
    const double subset_cap =
        opts.subset_cap.value_or(default_subset_cap(ens.model));

    const auto acc =
        spanlab::accept(ens.energies, ens.states, gs.energy, basis, thr);

    json report;
    report["model"] = ens.model.label();
    report["n_qubits"] = ens.n_qubits;
    report["count"] = ens.count();
    report["seed"] = ens.seed;
    report["e0"] = gs.energy;
    report["degeneracy"] = gs.degeneracy;
    report["thresholds"] = {
        {"delta_e_rel", thr.delta_e_rel},
        {"overlap_variant", spanlab::overlap_variant_name(thr.variant)},
        {"overlap_cut", thr.overlap_cut},
        {"rank_eps", rank_eps}};
    report["accepted"] = acc.indices.size();
    report["acceptance_rate"] = acc.rate;
    report["accepted_empty"] = acc.empty;

    if (!acc.empty) {
        Eigen::MatrixXcd c(ens.states.rows(),
                           static_cast<Eigen::Index>(acc.indices.size()));
        for (std::size_t i = 0; i < acc.indices.size(); ++i)
            c.col(i) = ens.states.col(acc.indices[i]);

        const auto rank = spanlab::tolerance_rank(c, rank_eps);
        report["rank"] = rank.rank;
        std::vector<double> sv(rank.normalized_singular_values.data(),
                               rank.normalized_singular_values.data() +
                                   std::min<Eigen::Index>(
                                       rank.normalized_singular_values.size(),
                                       2 * gs.degeneracy));
        report["normalized_singular_values"] = sv;

        if (rank.rank >= gs.degeneracy) {
            const auto metrics =
                spanlab::principal_angles(c, basis, gs.degeneracy);
            std::vector<double> ang(metrics.angles.data(),
                                    metrics.angles.data() + metrics.angles.size());
            report["principal_angles"] = {{"angles", ang},
                                          {"mean", metrics.mean_angle},
                                          {"max", metrics.max_angle},
                                          {"chordal_sq", metrics.chordal_sq}};
            report["incomplete_span"] = metrics.incomplete_span;
        } else {
            report["incomplete_span"] = true;
        }

        const auto dist = spanlab::overlap_distribution(c, basis);
        {
            std::ofstream f(out_dir / "overlaps.csv");
            for (int g = 0; g < gs.degeneracy; ++g)
                f << (g ? "," : "") << "g" << g;
            f << "\n";
            f.precision(12);
            for (Eigen::Index r = 0; r < dist.rows(); ++r) {
                for (Eigen::Index g = 0; g < dist.cols(); ++g)
                    f << (g ? "," : "") << dist(r, g);
                f << "\n";
            }
        }
        report["overlap_table"] = "overlaps.csv";

        const auto subset =
            spanlab::orthogonal_subset(c, gs.degeneracy, subset_cap);
        report["orthogonal_subset"] = {
            {"cap", subset_cap},
            {"found", subset.has_value()},
            {"indices", subset ? json(*subset) : json::array()}};

        // Similarity heatmaps: exact basis vs representative generated
        // states (orthogonal subset first, padded with accepted states).
        std::vector<int> reps;
        if (subset)
            reps = *subset;
        for (Eigen::Index i = 0;
             i < c.cols() && (int)reps.size() < opts.representative_count; ++i)
            if (std::find(reps.begin(), reps.end(), (int)i) == reps.end())
                reps.push_back((int)i);

        std::vector<std::string> heatmap_files;
        const auto kinds = ens.model.model == models::SpinModel::AKLT
                               ? std::vector<features::FeatureKind>{
                                     features::FeatureKind::ONE_BODY,
                                     features::FeatureKind::TWO_BODY_EDGE}
                               : std::vector<features::FeatureKind>{
                                     features::FeatureKind::ONE_BODY,
                                     features::FeatureKind::TWO_BODY_NN};
        for (auto kind : kinds) {
            const auto spec = features::FeatureSpec::make(kind, ens.n_qubits);
            std::vector<features::FeatureVector> exact_f, gen_f;
            for (int g = 0; g < gs.degeneracy; ++g) {
                qsim::StateVector psi(ens.n_qubits);
                for (Eigen::Index r = 0; r < basis.rows(); ++r)
                    psi.amplitudes[r] = basis(r, g);
                exact_f.push_back(features::compute_features(psi, spec));
            }
            for (int i : reps) {
                qsim::StateVector psi(ens.n_qubits);
                for (Eigen::Index r = 0; r < c.rows(); ++r)
                    psi.amplitudes[r] = c(r, i);
                gen_f.push_back(features::compute_features(psi, spec));
            }
            const std::string base = features::feature_kind_name(kind);
            features::write_matrix_csv(features::similarity_matrix(exact_f),
                                       (out_dir / ("sim_exact_" + base + ".csv"))
                                           .string());
            features::write_matrix_csv(
                features::similarity_matrix(gen_f),
                (out_dir / ("sim_generated_" + base + ".csv")).string());
            heatmap_files.push_back("sim_exact_" + base + ".csv");
            heatmap_files.push_back("sim_generated_" + base + ".csv");
        }
        report["heatmaps"] = heatmap_files;
    }

    const fs::path report_path = out_dir / "report.json";
    std::ofstream f(report_path);
    f << report.dump(2) << "\n";
    return report_path;
}

ExportKind export_kind_from_name(const std::string& name) {
    if (name == "dynamics") return ExportKind::DYNAMICS;
    if (name == "overlaps") return ExportKind::OVERLAPS;
    if (name == "heatmaps") return ExportKind::HEATMAPS;
    throw input_error("export: unknown kind '" + name + "'");
}

void cmd_export(const fs::path& run_dir, ExportKind what,
                const fs::path& out_dir) {
    fs::create_directories(out_dir);
    auto need = [](const fs::path& p) {
        require(fs::exists(p), "export: missing artifact " + p.string());
        return p;
    };
    switch (what) {
        case ExportKind::DYNAMICS: {
            const auto rows = io::read_log_csv(need(run_dir / "log.csv"));
            io::write_log_csv(out_dir / "dynamics.csv", rows);
            break;
        }
        case ExportKind::OVERLAPS: {
            fs::copy_file(need(run_dir / "certification" / "overlaps.csv"),
                          out_dir / "overlaps.csv",
                          fs::copy_options::overwrite_existing);
            break;
        }
        case ExportKind::HEATMAPS: {
            const auto cert = need(run_dir / "certification");
            bool any = false;
            for (const auto& e : fs::directory_iterator(cert)) {
                const std::string name = e.path().filename().string();
                if (name.rfind("sim_", 0) == 0) {
                    fs::copy_file(e.path(), out_dir / name,
                                  fs::copy_options::overwrite_existing);
                    any = true;
                }
            }
            require(any, "export: no heatmap CSVs under " + cert.string());
            break;
        }
    }
}

} // namespace gqc::cli
