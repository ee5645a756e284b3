// JSON documents: model parameters, fit reports, ranked family fits.

#ifndef HOSTFORGE_JSON_IO_HPP_
#define HOSTFORGE_JSON_IO_HPP_

#include <iosfwd>

#include "hostforge/model.hpp"
#include "hostforge/statfit.hpp"
#include "json.hpp"

namespace hostforge {

using Json = nlohmann::ordered_json;

Json to_json(const ExpLaw& law);
Json to_json(const RatioChain& chain);
Json to_json(const DistLaw& dist);
Json to_json(const CorrelationModel& corr);
Json to_json(const WeibullLaw& law);
Json to_json(const ModelParams& params);
Json to_json(const SquareMatrix& m);
Json to_json(const FitReport& fit);
Json to_json(const DistFamily& fit);
Json to_json(const BestFit& fit);

/// Throws std::invalid_argument naming the offending key when the document
/// is incomplete (including explicit nulls) or violates a type invariant.
ModelParams params_from_json(const Json& j);

ModelParams read_params(std::istream& in);
void write_params(std::ostream& out, const ModelParams& params);

}  // namespace hostforge

#endif  // HOSTFORGE_JSON_IO_HPP_
