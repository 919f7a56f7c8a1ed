#ifndef POALAB_JSON_IO_HPP
#define POALAB_JSON_IO_HPP

#include <iosfwd>
#include <string>

#include "poalab/model.hpp"

namespace poalab {

// Instance document:
//   {"cost": {"kind":"unit"} | {"kind":"monomial","degree":<real>},
//    "horizon": <int>, "jobs": [{"release":<int>,"deadline":<int>}, ...],
//    "meta": {...}}            (meta optional)
// Assignment document: {"slots":[<int>, ...]}

nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& doc);

nlohmann::json assignment_to_json(const Assignment& a);
Assignment assignment_from_json(const nlohmann::json& doc);

std::string write_instance(const Instance& inst);
void write_instance(const Instance& inst, std::ostream& out);
void write_instance_file(const Instance& inst, const std::string& path);

Instance read_instance(const std::string& text);
Instance read_instance(std::istream& in);
Instance read_instance_file(const std::string& path);

std::string write_assignment(const Assignment& a);
Assignment read_assignment(const std::string& text);
Assignment read_assignment_file(const std::string& path);
void write_assignment_file(const Assignment& a, const std::string& path);

/// Parses any JSON text, rethrowing parse errors as ValidationError.
nlohmann::json parse_json(const std::string& text);
nlohmann::json load_json_file(const std::string& path);
void save_json_file(const nlohmann::json& doc, const std::string& path);

}  // namespace poalab

#endif
