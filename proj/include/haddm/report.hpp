#pragma once

#include <string>

#include <json.hpp>

#include "haddm/beamformer.hpp"
#include "haddm/perf.hpp"

namespace haddm {

// RFC 4180 table: CRLF line ends, header row, axis column first, then one
// mean and one standard-error column per series. Numbers are written with
// enough digits to round-trip, so identical results give identical bytes.
void write_sweep_csv(const SweepResult& result, const std::string& path);

nlohmann::json sweep_to_json(const SweepResult& result);

// Complex entries serialize as [re, im] pairs.
nlohmann::json beamformer_to_json(const HybridBeamformer& bf);

}  // namespace haddm
