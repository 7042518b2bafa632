#include "qnorm/io.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

namespace qnorm::io {

std::string format_sig(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

std::uint64_t config_hash(const std::map<std::string, std::string>& config, unsigned seed) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    auto mix = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= 0x1f;
        h *= 1099511628211ull;
    };
    for (const auto& [k, v] : config) {
        mix(k);
        mix(v);
    }
    mix(std::to_string(seed));
    return h;
}

nlohmann::json make_manifest(const std::map<std::string, std::string>& config, unsigned seed) {
    nlohmann::json j;
    j["config"] = config;
    j["seed"] = seed;
    j["tool"] = "qnorm";
    j["version"] = "0.1.0";
    char buf[32];
    std::uint64_t h = config_hash(config, seed);
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    j["hash"] = buf;
    auto now = std::chrono::system_clock::now();
    j["timestamp_unix"] = std::chrono::duration_cast<std::chrono::seconds>(
                              now.time_since_epoch())
                              .count();
    return j;
}

void write_text(const std::filesystem::path& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw NumericError("cannot open for writing: " + path.string());
    f << body;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

namespace {

std::string hash_line(std::uint64_t hash) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "# manifest %016llx\n",
                  static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace

void write_field_csv(const std::filesystem::path& path, const RadialField& u,
                     std::uint64_t hash) {
    std::ostringstream os;
    os << hash_line(hash) << "r,u\n";
    for (int i = 0; i < u.size(); ++i)
        os << format_sig(u.grid->r[i]) << ',' << format_sig(u.v[i]) << '\n';
    write_text(path, os.str());
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TracePoint>& trace,
                     std::uint64_t hash) {
    std::ostringstream os;
    os << hash_line(hash) << "iter,energy,pgrad_norm\n";
    for (size_t i = 0; i < trace.size(); ++i)
        os << i << ',' << format_sig(trace[i].energy) << ',' << format_sig(trace[i].pgrad_norm)
           << '\n';
    write_text(path, os.str());
}

void write_curve_csv(const std::filesystem::path& path, const EnergyCurve& curve,
                     std::uint64_t hash) {
    std::ostringstream os;
    os << hash_line(hash) << "c,m,lambda,status\n";
    for (const auto& pt : curve.points)
        os << format_sig(pt.c) << ',' << format_sig(pt.m) << ',' << format_sig(pt.lambda) << ','
           << pt.status << '\n';
    write_text(path, os.str());
}

void write_appendix_csv(const std::filesystem::path& path, const std::vector<AppendixRow>& rows,
                        std::uint64_t hash) {
    std::ostringstream os;
    os << hash_line(hash) << "r_max,I,K2,Kq\n";
    for (const auto& row : rows)
        os << format_sig(row.r_max) << ',' << format_sig(row.I) << ',' << format_sig(row.K2)
           << ',' << format_sig(row.Kq) << '\n';
    write_text(path, os.str());
}

nlohmann::json report_json(const SolveReport& rep) {
    nlohmann::json j;
    j["lambda"] = rep.lambda;
    j["energy"] = {{"kinetic2", rep.energy.kinetic2},
                   {"kineticq", rep.energy.kineticq},
                   {"gminus_eps", rep.energy.gminus_eps},
                   {"gplus", rep.energy.gplus},
                   {"total", rep.energy.total}};
    j["pgrad_norm"] = rep.pgrad_norm;
    j["pohozaev"] = rep.pohozaev;
    j["nehari"] = rep.nehari;
    j["mass_defect"] = rep.mass_defect;
    j["iterations"] = rep.iterations;
    j["eps"] = rep.eps;
    j["status"] = to_string(rep.status);
    return j;
}

nlohmann::json assumptions_json(const AssumptionReport& rep) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : rep.checks)
        arr.push_back({{"name", c.name},
                       {"verdict", to_string(c.verdict)},
                       {"witness_s", c.witness_s},
                       {"estimate", c.estimate}});
    return {{"checks", arr}, {"all_pass", rep.all_pass()}};
}

nlohmann::json threshold_json(const ThresholdResult& t) {
    return {{"mu_star", t.mu_star_closed},
            {"mu_star_bisect", t.mu_star_bisect},
            {"agreement", std::abs(t.mu_star_closed - t.mu_star_bisect)}};
}

nlohmann::json cbar_json(const CbarResult& r) {
    nlohmann::json j;
    if (r.cbar)
        j["cbar"] = *r.cbar;
    else
        j["cbar"] = "zero";
    j["bracket_ok"] = r.bracket_ok;
    j["note"] = r.note;
    return j;
}

nlohmann::json gn_json(const GnEstimate& e) {
    return {{"constant", e.constant}};
}

nlohmann::json curve_json(const EnergyCurve& curve) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& pt : curve.points)
        pts.push_back({{"c", pt.c},
                       {"m", pt.m},
                       {"lambda", pt.lambda},
                       {"status", pt.status},
                       {"m_eps", pt.m_eps}});
    nlohmann::json sub = nlohmann::json::array();
    for (const auto& s : curve.subadditivity)
        sub.push_back({{"c1", s.c1}, {"c2", s.c2}, {"c_combined", s.c_combined},
                       {"residual", s.residual}});
    return {{"points", pts},
            {"monotone_nonincreasing", curve.monotone_nonincreasing},
            {"worst_monotonicity_violation", curve.worst_monotonicity_violation},
            {"subadditivity", sub},
            {"eps_values_nondecreasing", curve.eps_values_nondecreasing}};
}

}  // namespace qnorm::io
