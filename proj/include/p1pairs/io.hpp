#pragma once

#include "p1pairs/duality.hpp"

#include "json.hpp"

#include <stdexcept>
#include <string>

namespace p1pairs {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "1";

/// Malformed or inconsistent input file.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json to_json(const Rat& x);
Json to_json(const BinForm& f);
Json to_json(const QMat& m);
Json to_json(const Presentation& p);
Json to_json(const Report& r);

Rat rat_from_json(const Json& j);
BinForm form_from_json(const Json& j);
QMat matrix_from_json(const Json& j);

/// {"schema","N","n","forms":[{"degree","coeffs"}]}.
Json pair_to_json(const StablePair& p);
StablePair pair_from_json(const Json& j);

/// The base pair plus "window" and "steps"; each step stores its degreewise
/// matrices in the bases of the recomputed kernel and cokernel.
Json chain_to_json(const PsiChain& c);
PsiChain chain_from_json(const Json& j);

/// The chain's pair and window plus one entry per level of the dual chain.
Json quot_chain_to_json(const PsiChain& c, const QuotChain& q);

/// Parses text; JSON syntax errors become InputError.
Json parse_json(const std::string& text);
/// Reads a file, throwing InputError when it cannot be opened or parsed.
Json read_json_file(const std::string& path);
/// Writes through a temporary file renamed into place.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace p1pairs
