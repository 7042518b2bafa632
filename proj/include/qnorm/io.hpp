#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"
#include "qnorm/analysis.hpp"

namespace qnorm::io {

// 17 significant digits: round-trippable doubles, diff-friendly CSV bodies.
std::string format_sig(double x);

// FNV-1a over the canonical (sorted-key) config echo; timestamps excluded so
// reruns with identical configs share a hash.
std::uint64_t config_hash(const std::map<std::string, std::string>& config, unsigned seed);

nlohmann::json make_manifest(const std::map<std::string, std::string>& config, unsigned seed);

void write_text(const std::filesystem::path& path, const std::string& body);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// CSV writers. Every file starts with "# manifest <hex hash>" then a header row.
void write_field_csv(const std::filesystem::path& path, const RadialField& u,
                     std::uint64_t hash);
void write_trace_csv(const std::filesystem::path& path, const std::vector<TracePoint>& trace,
                     std::uint64_t hash);
void write_curve_csv(const std::filesystem::path& path, const EnergyCurve& curve,
                     std::uint64_t hash);
void write_appendix_csv(const std::filesystem::path& path, const std::vector<AppendixRow>& rows,
                        std::uint64_t hash);

nlohmann::json report_json(const SolveReport& rep);
nlohmann::json assumptions_json(const AssumptionReport& rep);
nlohmann::json threshold_json(const ThresholdResult& t);
nlohmann::json cbar_json(const CbarResult& r);
nlohmann::json gn_json(const GnEstimate& e);
nlohmann::json curve_json(const EnergyCurve& curve);

}  // namespace qnorm::io
