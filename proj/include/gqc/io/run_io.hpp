#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "gqc/trainer/trainer.hpp"

namespace gqc::io {

namespace fs = std::filesystem;

// Binary container: 8-byte magic, u64 header length, JSON header, packed
// doubles. Byte-for-byte deterministic for identical inputs.

struct Checkpoint {
    trainer::TrainConfig config;
    generator::GeneratorParams params;
    trainer::AdamState adam;
    long iteration = 0;
    bool converged = false;
};

void save_checkpoint(const fs::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const fs::path& path);

struct Ensemble {
    models::SpinModelSpec model;
    int depth = 0;
    int n_qubits = 0;
    int n_params = 0;
    std::uint64_t seed = 0;
    Eigen::MatrixXcd states;  // dim x count
    Eigen::MatrixXd thetas;   // n_params x count
    Eigen::VectorXd energies; // count

    Eigen::Index count() const { return states.cols(); }
};

void save_ensemble(const fs::path& path, const Ensemble& e);
Ensemble load_ensemble(const fs::path& path);

// Per-iteration dynamics log.
// Columns: iter,mean_E,max_E,l1_sim,l2_sim,fidelity,lambda2,shots,eta
void write_log_csv(const fs::path& path,
                   const std::vector<trainer::IterationStats>& log);
std::vector<trainer::IterationStats> read_log_csv(const fs::path& path);

} // namespace gqc::io
