#ifndef COXIAN_MODEL_IO_HPP
#define COXIAN_MODEL_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "coxian/model.hpp"

namespace coxian {

// Interchange document {"lambda": [...], "mu": [...]} plus optional metadata;
// consumed and produced by every CLI command.
struct ModelDocument {
  CoxianParams params;
  std::optional<std::string> label;
  std::optional<uint64_t> seed;
  std::optional<std::string> provenance;
};

// Parse/serialize the model document. Throws validation_error on malformed
// JSON or invariant violations; round-trips at full precision.
ModelDocument read_model(std::istream& in);
ModelDocument read_model_file(const std::string& path);
std::string write_model(const ModelDocument& doc, int indent = 2);

// Duration CSV: one positive value per line, optional header line.
std::vector<double> read_durations(std::istream& in);
std::vector<double> read_durations_file(const std::string& path);
void write_durations(std::ostream& out, const std::vector<double>& values, bool header);

} // namespace coxian

#endif
