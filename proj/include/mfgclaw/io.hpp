#pragma once

#include <string>

#include <json.hpp>

#include "mfgclaw/claw.hpp"
#include "mfgclaw/equilibrium.hpp"
#include "mfgclaw/monotone.hpp"
#include "mfgclaw/select.hpp"
#include "mfgclaw/viscous.hpp"

namespace mfgclaw {

using Json = nlohmann::json;

std::string to_string(EquilibriumClass c);
std::string to_string(MonotonicityVerdict v);
std::string to_string(Selection s);

Json to_json(const EquilibriumReport& rep);
Json to_json(const MonotonicityReport& rep);
Json to_json(const SelectionReport& rep);
Json to_json(const RiemannFan& fan);
Json to_json(const CharacteristicsDiagram& diagram);
Json to_json(const Section433Landmarks& lm);

/// CSV bodies use ',' separators, '.' decimals and LF line endings, with
/// doubles printed at round-trip precision so reruns are byte-identical.
std::string field_csv(const EntropyField& field);
std::string field_csv(const ViscousField& field);
std::string selection_csv(const SelectionReport& rep);
std::string viscosity_csv(const std::vector<ViscosityStudyRow>& rows);

void write_text_file(const std::string& path, const std::string& body);

/// FNV-1a hash of a byte string, hex-encoded (used for config manifests).
std::string fnv1a_hex(const std::string& bytes);

} // namespace mfgclaw
