#include "sptc/jsonl.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sptc/error.hpp"

namespace sptc {

void write_jsonl_line(std::ostream& os, const Example& ex) {
    // Hand-formatted to keep key order and spacing stable across runs.
    os << "{\"task\":\"" << ex.task << "\",\"index\":" << ex.index << ",\"input\":[";
    for (std::size_t i = 0; i < ex.input.size(); ++i) {
        if (i) os << ',';
        os << ex.input[i];
    }
    os << "],\"target\":[";
    for (std::size_t i = 0; i < ex.target.size(); ++i) {
        if (i) os << ',';
        os << ex.target[i];
    }
    os << "]}\n";
}

void write_jsonl(const std::string& path, const std::vector<Example>& examples) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open for writing: " + path);
    for (const auto& ex : examples) write_jsonl_line(os, ex);
    if (!os) throw DataError("write failed: " + path);
}

Example parse_jsonl_line(const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw DataError("malformed dataset line: " + line.substr(0, 80));
    }
    Example ex;
    try {
        ex.task = j.at("task").get<std::string>();
        ex.index = j.at("index").get<std::uint64_t>();
        ex.input = j.at("input").get<TokenSeq>();
        ex.target = j.at("target").get<TokenSeq>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("dataset line missing field: ") + e.what());
    }
    return ex;
}

std::vector<Example> read_jsonl(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open: " + path);
    std::vector<Example> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        out.push_back(parse_jsonl_line(line));
    }
    return out;
}

}  // namespace sptc
