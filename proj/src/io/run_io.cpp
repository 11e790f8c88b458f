#include "gqc/io/run_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gqc::io {

using nlohmann::json;

namespace {

constexpr char ckpt_magic[8] = {'G', 'Q', 'C', 'C', 'K', 'P', 'T', '1'};
constexpr char ens_magic[8] = {'G', 'Q', 'C', 'E', 'N', 'S', '0', '1'};

void write_blob(std::ofstream& f, const char magic[8], const std::string& header,
                const std::vector<double>& payload) {
    f.write(magic, 8);
    const std::uint64_t hlen = header.size();
    f.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
    f.write(header.data(), static_cast<std::streamsize>(header.size()));
    const std::uint64_t plen = payload.size();
    f.write(reinterpret_cast<const char*>(&plen), sizeof(plen));
    f.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(double)));
}

std::pair<std::string, std::vector<double>> read_blob(std::ifstream& f,
                                                      const char magic[8],
                                                      const std::string& what) {
    char got[8];
    f.read(got, 8);
    require(f.good() && std::memcmp(got, magic, 8) == 0,
            what + ": bad magic (wrong file type?)");
    std::uint64_t hlen = 0;
    f.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
    std::string header(hlen, '\0');
    f.read(header.data(), static_cast<std::streamsize>(hlen));
    std::uint64_t plen = 0;
    f.read(reinterpret_cast<char*>(&plen), sizeof(plen));
    std::vector<double> payload(plen);
    f.read(reinterpret_cast<char*>(payload.data()),
           static_cast<std::streamsize>(plen * sizeof(double)));
    require(f.good(), what + ": truncated file");
    return {std::move(header), std::move(payload)};
}

} // namespace

void save_checkpoint(const fs::path& path, const Checkpoint& ckpt) {
    json h;
    h["config"] = json::parse(trainer::config_to_json(ckpt.config));
    h["iteration"] = ckpt.iteration;
    h["converged"] = ckpt.converged;
    h["adam_t"] = ckpt.adam.t;

    const auto flat = generator::flatten(ckpt.params);
    h["param_count"] = flat.size();
    std::vector<double> payload;
    payload.reserve(flat.size() * 3);
    payload.insert(payload.end(), flat.begin(), flat.end());
    payload.insert(payload.end(), ckpt.adam.m.begin(), ckpt.adam.m.end());
    payload.insert(payload.end(), ckpt.adam.v.begin(), ckpt.adam.v.end());

    std::ofstream f(path, std::ios::binary);
    require(f.good(), "save_checkpoint: cannot open " + path.string());
    write_blob(f, ckpt_magic, h.dump(), payload);
}

Checkpoint load_checkpoint(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    require(f.good(), "load_checkpoint: cannot open " + path.string());
    auto [header, payload] = read_blob(f, ckpt_magic, "load_checkpoint");
    const json h = json::parse(header);

    Checkpoint ckpt;
    ckpt.config = trainer::config_from_json(h.at("config").dump());
    ckpt.iteration = h.at("iteration").get<long>();
    ckpt.converged = h.at("converged").get<bool>();

    ckpt.params = generator::GeneratorParams::zeros(ckpt.config.network);
    const std::size_t n = ckpt.params.count();
    require(h.at("param_count").get<std::size_t>() == n &&
                payload.size() == 3 * n,
            "load_checkpoint: parameter count does not match the config");
    generator::unflatten(ckpt.params,
                         std::vector<double>(payload.begin(), payload.begin() + n));
    ckpt.adam = trainer::AdamState(n);
    std::copy(payload.begin() + n, payload.begin() + 2 * n, ckpt.adam.m.begin());
    std::copy(payload.begin() + 2 * n, payload.end(), ckpt.adam.v.begin());
    ckpt.adam.t = h.at("adam_t").get<long>();
    return ckpt;
}

void save_ensemble(const fs::path& path, const Ensemble& e) {
    json h;
    h["model"]["name"] = models::model_name(e.model.model);
    h["model"]["sites"] = e.model.n_sites;
    h["model"]["delta"] = e.model.delta;
    h["depth"] = e.depth;
    h["n_qubits"] = e.n_qubits;
    h["n_params"] = e.n_params;
    h["count"] = e.states.cols();
    h["seed"] = e.seed;

    std::vector<double> payload;
    const Eigen::Index d = e.states.rows(), m = e.states.cols();
    payload.reserve(static_cast<std::size_t>(m) * (e.n_params + 1 + 2 * d));
    for (Eigen::Index c = 0; c < m; ++c) {
        for (int p = 0; p < e.n_params; ++p) payload.push_back(e.thetas(p, c));
        payload.push_back(e.energies(c));
        for (Eigen::Index r = 0; r < d; ++r) {
            payload.push_back(e.states(r, c).real());
            payload.push_back(e.states(r, c).imag());
        }
    }
    std::ofstream f(path, std::ios::binary);
    require(f.good(), "save_ensemble: cannot open " + path.string());
    write_blob(f, ens_magic, h.dump(), payload);
}

Ensemble load_ensemble(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    require(f.good(), "load_ensemble: cannot open " + path.string());
    auto [header, payload] = read_blob(f, ens_magic, "load_ensemble");
    const json h = json::parse(header);

    Ensemble e;
    e.model.model = models::model_from_name(h.at("model").at("name"));
    e.model.n_sites = h.at("model").at("sites").get<int>();
    e.model.delta = h.at("model").at("delta").get<double>();
    e.depth = h.at("depth").get<int>();
    e.n_qubits = h.at("n_qubits").get<int>();
    e.n_params = h.at("n_params").get<int>();
    e.seed = h.at("seed").get<std::uint64_t>();
    const Eigen::Index m = h.at("count").get<Eigen::Index>();
    const Eigen::Index d = static_cast<Eigen::Index>(dim_of(e.n_qubits));

    require(payload.size() ==
                static_cast<std::size_t>(m) * (e.n_params + 1 + 2 * d),
            "load_ensemble: payload size mismatch");
    e.states.resize(d, m);
    e.thetas.resize(e.n_params, m);
    e.energies.resize(m);
    std::size_t i = 0;
    for (Eigen::Index c = 0; c < m; ++c) {
        for (int p = 0; p < e.n_params; ++p) e.thetas(p, c) = payload[i++];
        e.energies(c) = payload[i++];
        for (Eigen::Index r = 0; r < d; ++r) {
            const double re = payload[i++], im = payload[i++];
            e.states(r, c) = cplx{re, im};
        }
    }
    return e;
}

void write_log_csv(const fs::path& path,
                   const std::vector<trainer::IterationStats>& log) {
    std::ofstream f(path);
    require(f.good(), "write_log_csv: cannot open " + path.string());
    f << "iter,mean_E,max_E,l1_sim,l2_sim,fidelity,lambda2,shots,eta\n";
    f.precision(12);
    for (const auto& r : log) {
        f << r.iteration << ',' << r.mean_energy << ',' << r.max_energy << ','
          << r.l1_sim << ',' << r.l2_sim << ',' << r.mean_fidelity << ','
          << r.lambda2 << ',' << r.shots << ',' << r.eta << '\n';
    }
}

std::vector<trainer::IterationStats> read_log_csv(const fs::path& path) {
    std::ifstream f(path);
    require(f.good(), "read_log_csv: cannot open " + path.string());
    std::string line;
    std::getline(f, line); // header
    std::vector<trainer::IterationStats> rows;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        trainer::IterationStats r;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        ss >> r.iteration >> r.mean_energy >> r.max_energy >> r.l1_sim >>
            r.l2_sim >> r.mean_fidelity >> r.lambda2 >> r.shots >> r.eta;
        rows.push_back(r);
    }
    return rows;
}

} // namespace gqc::io
