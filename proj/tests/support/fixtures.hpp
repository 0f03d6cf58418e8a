#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lohmm/model.hpp"
#include "lohmm/parser.hpp"

namespace lohmm::testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(LOHMM_FIXTURES_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Parses and validates a model from source text; throws on any error.
inline Model make_model(const std::string& text) {
  Model m = parse_model(text);
  ValidationReport report = validate(m);
  if (!report.ok()) throw std::runtime_error("fixture invalid: " + report.errors.front());
  return m;
}

/// Loads a validated model from the fixtures directory.
inline Model load_fixture(const std::string& name) {
  return make_model(read_file(fixture_path(name)));
}

/// Parses one observation sequence written without the trailing period.
inline std::vector<Term> seq(const std::string& atoms) {
  return parse_sequences(atoms + ".").front();
}

}  // namespace lohmm::testing
