#include "poalab/json_io.hpp"

#include <fstream>
#include <sstream>

namespace poalab {

namespace {

int require_int(const nlohmann::json& doc, const std::string& key, const std::string& where) {
    if (!doc.contains(key)) throw ValidationError(where + ": missing field \"" + key + "\"");
    const auto& v = doc.at(key);
    if (!v.is_number_integer())
        throw ValidationError(where + "." + key + ": expected integer, got " + std::string(v.type_name()));
    return v.get<int>();
}

}  // namespace

nlohmann::json instance_to_json(const Instance& inst) {
    nlohmann::json cost;
    if (inst.cost.is_unit()) {
        cost = {{"kind", "unit"}};
    } else {
        cost = {{"kind", "monomial"}, {"degree", inst.cost.degree()}};
    }
    nlohmann::json jobs = nlohmann::json::array();
    for (const Job& j : inst.jobs) jobs.push_back({{"release", j.release}, {"deadline", j.deadline}});
    nlohmann::json doc = {{"cost", cost}, {"horizon", inst.horizon}, {"jobs", jobs}};
    if (!inst.meta.empty()) doc["meta"] = inst.meta;
    return doc;
}

Instance instance_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ValidationError("instance document must be an object");
    if (!doc.contains("cost") || !doc.at("cost").is_object())
        throw ValidationError("instance: missing or non-object \"cost\"");
    const auto& cost = doc.at("cost");
    if (!cost.contains("kind") || !cost.at("kind").is_string())
        throw ValidationError("cost.kind: expected string");
    const std::string kind = cost.at("kind").get<std::string>();

    Instance inst;
    if (kind == "unit") {
        inst.cost = CostFunction::unit();
    } else if (kind == "monomial") {
        if (!cost.contains("degree") || !cost.at("degree").is_number())
            throw ValidationError("cost.degree: expected number for monomial cost");
        inst.cost = CostFunction::monomial(cost.at("degree").get<double>());
    } else {
        throw ValidationError("cost.kind: expected \"unit\" or \"monomial\", got \"" + kind + "\"");
    }

    inst.horizon = require_int(doc, "horizon", "instance");
    if (!doc.contains("jobs") || !doc.at("jobs").is_array())
        throw ValidationError("instance: missing or non-array \"jobs\"");
    size_t idx = 0;
    for (const auto& entry : doc.at("jobs")) {
        const std::string where = "jobs[" + std::to_string(idx) + "]";
        if (!entry.is_object()) throw ValidationError(where + ": expected object");
        Job job;
        job.release = require_int(entry, "release", where);
        job.deadline = require_int(entry, "deadline", where);
        inst.jobs.push_back(job);
        ++idx;
    }
    if (doc.contains("meta")) inst.meta = doc.at("meta");
    inst.validate();
    return inst;
}

nlohmann::json assignment_to_json(const Assignment& a) {
    return nlohmann::json{{"slots", a.slots}};
}

Assignment assignment_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("slots") || !doc.at("slots").is_array())
        throw ValidationError("assignment document must be {\"slots\": [...]}");
    Assignment a;
    size_t idx = 0;
    for (const auto& v : doc.at("slots")) {
        if (!v.is_number_integer())
            throw ValidationError("slots[" + std::to_string(idx) + "]: expected integer");
        a.slots.push_back(v.get<int>());
        ++idx;
    }
    return a;
}

nlohmann::json parse_json(const std::string& text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_json(buf.str());
}

void save_json_file(const nlohmann::json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << doc.dump(2) << "\n";
}

std::string write_instance(const Instance& inst) { return instance_to_json(inst).dump(2); }

void write_instance(const Instance& inst, std::ostream& out) {
    out << write_instance(inst) << "\n";
}

void write_instance_file(const Instance& inst, const std::string& path) {
    save_json_file(instance_to_json(inst), path);
}

Instance read_instance(const std::string& text) { return instance_from_json(parse_json(text)); }

Instance read_instance(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_instance(buf.str());
}

Instance read_instance_file(const std::string& path) {
    return instance_from_json(load_json_file(path));
}

std::string write_assignment(const Assignment& a) { return assignment_to_json(a).dump(2); }

Assignment read_assignment(const std::string& text) {
    return assignment_from_json(parse_json(text));
}

Assignment read_assignment_file(const std::string& path) {
    return assignment_from_json(load_json_file(path));
}

void write_assignment_file(const Assignment& a, const std::string& path) {
    save_json_file(assignment_to_json(a), path);
}

}  // namespace poalab
