#pragma once

// JSON encodings of the library's data. Complex arrays are stored as
// parallel "re"/"im" arrays; matrices are row-major. Malformed input throws
// InvalidArgument with a path-like hint.

#include <string>

#include <json.hpp>

#include "dynframe/commutant.hpp"
#include "dynframe/dynamical.hpp"
#include "dynframe/frame.hpp"
#include "dynframe/model_space.hpp"
#include "dynframe/sampling.hpp"
#include "dynframe/semigroup.hpp"

namespace dynframe::json_io {

using Json = nlohmann::ordered_json;

Json to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);

/// Vectors are n x 1 matrices; {"re": [...], "im": [...]} is also accepted.
Json vector_to_json(const CVector& v);
CVector vector_from_json(const Json& j);

Json to_json(const semigroup::Descriptor& d);
semigroup::Descriptor descriptor_from_json(const Json& j);

/// {"box": [..]} | {"total_degree": N} | {"cap": N}; "box:4"-style strings
/// are accepted on input.
Json to_json(const semigroup::WindowSpec& s);
semigroup::WindowSpec window_spec_from_json(const Json& j);

/// {"dim", "A": [...], "U": [{"order", "matrix"}], "numerical": [...]}
Json to_json(const dynamical::OperatorTuple& t);
dynamical::OperatorTuple tuple_from_json(const Json& j);

/// {"dim", "window": {"descriptor", "spec"} | null, "vectors"}
Json to_json(const frame::Frame& f);
frame::Frame frame_from_json(const Json& j);

/// {"k", "window": <spec>, "coeffs": {"re", "im"}} in window order.
Json to_json(const model_space::PolySymbol& p);
model_space::PolySymbol poly_from_json(const Json& j);

/// {"sensors", "times", "re", "im"}, sensor-major.
Json to_json(const sampling::SampleTable& y);
sampling::SampleTable samples_from_json(const Json& j);

/// {"A": <matrix>, "sensors": [<vector>...], "horizon": N}
Json to_json(const sampling::SamplingScheme& s);
sampling::SamplingScheme scheme_from_json(const Json& j);

/// {"k", "d", "scheme", "rho_max", "trials", "seed"} plus optional "d_min",
/// "d_max", "group_orders", "max_resamples".
Json to_json(const commutant::ExperimentConfig& c);
commutant::ExperimentConfig config_from_json(const Json& j);

Json to_json(const frame::FrameReport& r);
Json to_json(const dynamical::TailEstimate& t);
Json to_json(const dynamical::OrbitDiagnosis& d);

Json load(const std::string& path);
/// Writes to a temporary file in the same directory and renames it over
/// `path`.
void save_atomic(const std::string& path, const Json& j);

}  // namespace dynframe::json_io
