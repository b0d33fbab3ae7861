#pragma once

// Deterministic machine-readable output and JSON parameter ingestion.
// Every CSV starts with a `# config-hash:` comment binding it to the run
// configuration, then a header row. Numbers are written in shortest
// round-trip form (locale independent, byte-identical across runs).

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "aqrm/params.hpp"
#include "aqrm/util.hpp"

namespace aqrm {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// FNV-1a over the canonical (key-sorted) JSON dump plus the seed.
inline std::string config_hash(const nlohmann::json& config,
                               std::uint64_t seed = 0) {
    std::string s = config.dump();
    s += "|seed=" + std::to_string(seed);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(s)));
    return std::string(buf);
}

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::string& hash,
              const std::vector<std::string>& header)
        : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path);
        out_ << "# config-hash: " << hash << "\n";
        for (std::size_t i = 0; i < header.size(); ++i)
            out_ << header[i] << (i + 1 < header.size() ? "," : "\n");
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
    }

    void row_doubles(const std::vector<double>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << format_double(cells[i]) << (i + 1 < cells.size() ? "," : "\n");
    }

  private:
    std::ofstream out_;
};

inline nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return j;
}

/// Model parameters from JSON: either absolute units
/// {omega0, Omega, lambda_r, lambda_cr, kappa[, gamma_spin]} or the
/// renormalized form {g_r, g_cr, kappa_bar, eta[, gamma_spin_over_Omega]}.
inline ModelParams params_from_json(const nlohmann::json& j) {
    ModelParams p{};
    if (j.contains("omega0")) {
        for (const char* k : {"omega0", "Omega", "lambda_r", "lambda_cr", "kappa"})
            if (!j.contains(k)) throw ConfigError(std::string("missing key: ") + k);
        p.omega0 = j.at("omega0").get<double>();
        p.Omega = j.at("Omega").get<double>();
        p.lambda_r = j.at("lambda_r").get<double>();
        p.lambda_cr = j.at("lambda_cr").get<double>();
        p.kappa = j.at("kappa").get<double>();
        p.gamma_spin = j.value("gamma_spin", 0.0);
    } else {
        for (const char* k : {"g_r", "g_cr", "kappa_bar", "eta"})
            if (!j.contains(k)) throw ConfigError(std::string("missing key: ") + k);
        RenormalizedParams r{j.at("g_r").get<double>(), j.at("g_cr").get<double>(),
                             j.at("kappa_bar").get<double>()};
        const double eta = j.at("eta").get<double>();
        p = denormalize(r, eta);
        p.gamma_spin = j.value("gamma_spin_over_Omega", 0.0) * p.Omega;
    }
    auto v = validate(p);
    if (!v.empty()) {
        std::string msg = "invalid parameters:";
        for (const auto& s : v) msg += " [" + s + "]";
        throw ConfigError(msg);
    }
    return p;
}

inline nlohmann::json params_to_json(const ModelParams& p) {
    return nlohmann::json{{"omega0", p.omega0},     {"Omega", p.Omega},
                          {"lambda_r", p.lambda_r}, {"lambda_cr", p.lambda_cr},
                          {"kappa", p.kappa},       {"gamma_spin", p.gamma_spin}};
}

}  // namespace aqrm
