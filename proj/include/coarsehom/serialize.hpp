#pragma once

#include <string>

#include "json.hpp"

#include "coarsehom/amenability.hpp"
#include "coarsehom/chains.hpp"
#include "coarsehom/decider.hpp"
#include "coarsehom/space.hpp"
#include "coarsehom/spectral.hpp"

namespace coarsehom {

using Json = nlohmann::json;

inline constexpr const char* kReportSchema = "coarsehom.report/1";

/// Parses JSON text; syntax errors become ConfigError with the line number.
Json parse_json(const std::string& text, const std::string& source = "input");

/// Line (1-based) of the first occurrence of "field" as a JSON key in the
/// text, or 0 when absent.
int line_of_field(const std::string& text, const std::string& field);

/// Throws ConfigError naming the first key of `j` not in `allowed`.
void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed,
                         const std::string& context);

// Readers are strict: unknown keys, wrong types and out-of-range values
// raise ConfigError naming the field.
SpaceSpec space_from_json(const Json& j);
Json to_json(const SpaceSpec& spec);

Window window_from_json(const Json& j);
Json to_json(const Window& w);

Chain0 chain0_from_json(const Json& j);
Json to_json(const Chain0& c);
Chain1 chain1_from_json(const Json& j);
Json to_json(const Chain1& b);

Json to_json(const Region& r);
Json to_json(const TailSet& t);
Json to_json(const Obstruction& o);
Json to_json(const LinearFit& f);
Json to_json(const SizeResult& s);
Json to_json(const Verdict& v);
Verdict verdict_from_json(const Json& j);

Json to_json(const ProfileSample& s);
Json to_json(const IsoperimetricProfile& p);
Json to_json(const FoelnerReport& f);
Json to_json(const EquivalenceReport& e);

MeshSpec mesh_from_json(const Json& j);
Json to_json(const MeshSpec& m);
Json to_json(const SpectrumReport& s);
Json to_json(const WeylReport& w);
Json to_json(const CoveringReport& c);
Json to_json(const RefinementStability& s);

/// CSV tables: region_id,vol_R,vol_dR,ratio and lambda,N_lambda,vol,n,bound_rhs.
std::string profile_csv(const IsoperimetricProfile& p);
std::string weyl_csv(const WeylReport& w);

/// Envelope {schema, command, config, payload, diagnostics}.
Json make_report(const std::string& command, const Json& config, const Json& payload,
                 const Json& diagnostics = Json::object());

/// Throws ConfigError unless `j` is a report with the current schema tag.
void check_report_schema(const Json& j);

/// Deterministic text form: sorted keys, shortest round-trip doubles.
std::string dump(const Json& j);

}  // namespace coarsehom
