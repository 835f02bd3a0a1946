#ifndef FLOWLAB_IO_HPP
#define FLOWLAB_IO_HPP

#include <cstdint>
#include <string>

#include <json.hpp>

#include "flowlab/observable.hpp"
#include "flowlab/surface.hpp"

namespace flowlab {

using json = nlohmann::json;

/// 17-significant-digit decimal rendering (%.17g), the float format of every
/// emitted file.
std::string fmt17(double x);

/// Canonical JSON emission: sorted keys (nlohmann's default object order) and
/// every floating-point number rendered via fmt17.  Parsing any emitted text
/// and re-emitting reproduces the bytes.
std::string emit_json(const json& j, int indent = 2);

std::uint64_t fnv1a64(const std::string& bytes);
std::string digest_hex(const std::string& bytes);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

json iet_to_json(const Iet& iet);
Iet iet_from_json(const json& j);

json surface_to_json(const ZipperedRectangles& s);
ZipperedRectangles surface_from_json(const json& j);

json observable_to_json(const CellwiseObservable& f);
CellwiseObservable observable_from_json(const json& j);

}  // namespace flowlab

#endif
