#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "sspec/csv.hpp"
#include "sspec/spectrum.hpp"

namespace sspec {

/// Content-addressed on-disk store for computed spectra, keyed by a hash of
/// (potential, ell, a, n_max, tolerance, solver tag).  Values round-trip
/// exactly (17 significant digits).  An empty directory disables the cache.
class SpectrumCache {
  public:
    explicit SpectrumCache(std::string dir = "") : dir_(std::move(dir)) {}

    bool enabled() const { return !dir_.empty(); }

    std::optional<EigenSpectrum> load(std::uint64_t key) const {
        if (!enabled()) return std::nullopt;
        std::ifstream in(path_for(key));
        if (!in) return std::nullopt;
        EigenSpectrum spec;
        std::string line;
        bool first = true;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            for (char& ch : line)
                if (ch == ',') ch = ' ';
            std::istringstream ss(line);
            double n, z, res;
            if (!(ss >> n >> z >> res)) return std::nullopt; // corrupt entry: recompute
            if (first) {
                spec.first_index = int(n);
                first = false;
            }
            spec.z.push_back(z);
            spec.residual.push_back(res);
        }
        if (spec.z.empty()) return std::nullopt;
        return spec;
    }

    void store(std::uint64_t key, const EigenSpectrum& spec) const {
        if (!enabled()) return;
        namespace fs = std::filesystem;
        std::error_code ec;
        fs::create_directories(dir_, ec);
        std::string final_path = path_for(key);
        std::string tmp = final_path + ".tmp" + std::to_string(std::uint64_t(::getpid()));
        {
            std::ofstream out(tmp, std::ios::binary);
            if (!out) return; // cache is best-effort
            for (std::size_t i = 0; i < spec.size(); ++i) {
                out << spec.index(i) << ',' << fmt17(spec.z[i]) << ','
                    << fmt17(i < spec.residual.size() ? spec.residual[i] : 0.0) << '\n';
            }
        }
        fs::rename(tmp, final_path, ec);
        if (ec) fs::remove(tmp, ec);
    }

  private:
    std::string path_for(std::uint64_t key) const {
        char buf[24];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(key));
        return dir_ + "/" + buf + ".csv";
    }

    std::string dir_;
};

} // namespace sspec
