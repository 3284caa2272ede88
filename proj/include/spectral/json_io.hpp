#pragma once

#include "spectral/criteria.hpp"
#include "spectral/finite.hpp"
#include "spectral/grid.hpp"
#include "spectral/measures.hpp"
#include "spectral/ud.hpp"

#include <json.hpp>

#include <string>

namespace spectral {

inline constexpr const char* kSchemaVersion = "1";

// spec-file parsers; throw spec_error with a located message on bad input
MeasurePtr parse_measure(const nlohmann::json& j);
FiniteOp parse_operator(const nlohmann::json& j);
SequenceSpec parse_sequence(const nlohmann::json& j);
nlohmann::json load_json_file(const std::string& path);

// report serializers
nlohmann::json to_json(const SeriesVerdict& v);
nlohmann::json to_json(const Classification& c);
nlohmann::json to_json(const KornerResult& k);
nlohmann::json to_json(const WindowReport& w);
nlohmann::json to_json(const NormLB& n);
nlohmann::json to_json(const ValidationReport& r);
nlohmann::json to_json(const CyclicDecomposition& d);
nlohmann::json to_json(const NormEstimate& n);
nlohmann::json to_json(const AperiodicityCertificate& c);
nlohmann::json to_json(const RateFit& r);
nlohmann::json to_json(const EigReport& e);
nlohmann::json to_json(const LimitResiduals& l);
nlohmann::json to_json(const DeterministicStructure& d);
nlohmann::json to_json(const DelReport& d);
nlohmann::json to_json(const UdReport& u);

// deterministic dump: sorted keys, floats at 17 significant digits
std::string dump_deterministic(const nlohmann::json& j, int indent = 2);

// wraps body with schema_version, resolved config, and a content hash;
// writes the bytes to path (or stdout when path is empty)
void write_report(const std::string& path, nlohmann::json body,
                  nlohmann::json config);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace spectral
