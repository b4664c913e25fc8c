#pragma once

#include "json.hpp"

#include "clawkit/catalog.hpp"
#include "clawkit/clawsearch.hpp"
#include "clawkit/curveflow.hpp"
#include "clawkit/pdesolve.hpp"
#include "clawkit/structclass.hpp"

namespace clawkit::cli {

using Json = nlohmann::ordered_json;

Json to_json(const StructReport& r);
Json to_json(const ConservationLaw& l);
Json to_json(const SearchResult& r);
Json to_json(const TypeTriple& t);
Json to_json(const TypeReport& r);
Json to_json(const ProbeResult& r);
Json to_json(const DriftReport& r);
Json to_json(const MomentSet& m);
Json to_json(const CatalogEntry& e);
Json to_json(const EntryResult& r, bool timings);

}  // namespace clawkit::cli
