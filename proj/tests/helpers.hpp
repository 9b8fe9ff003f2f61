#pragma once

// Shared helpers for the test binaries: asset loading and tiny builders.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pslola/stream.hpp"
#include "pslola/typecheck.hpp"

namespace testing {

inline std::string asset_path(const std::string& rel) {
    return std::string(PSLOLA_ASSETS_DIR) + "/" + rel;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline pslola::Spec load_spec_asset(const std::string& name) {
    return pslola::parse_and_check(slurp(asset_path("specs/" + name)));
}

inline pslola::DistributedStream load_trace_asset(const std::string& name,
                                                  const pslola::Spec& spec,
                                                  int horizon_override = -1) {
    return pslola::load_trace_csv(slurp(asset_path("traces/" + name)), spec, horizon_override);
}

// Compact event-list builder: dense values for one stream starting at 0.
inline void add_dense(pslola::DistributedStream& ds, const std::string& stream,
                      const std::vector<pslola::Value>& vals) {
    auto& evs = ds.events[stream];
    for (size_t i = 0; i < vals.size(); ++i) evs.push_back({static_cast<int>(i), vals[i]});
}

inline std::vector<pslola::Value> ivec(std::initializer_list<std::int64_t> xs) {
    std::vector<pslola::Value> out;
    for (auto x : xs) out.push_back(pslola::Value{x});
    return out;
}

inline std::vector<pslola::Value> bvec(std::initializer_list<bool> xs) {
    std::vector<pslola::Value> out;
    for (auto x : xs) out.push_back(pslola::Value{x});
    return out;
}

inline pslola::ValueSet ints(std::initializer_list<std::int64_t> xs) {
    pslola::ValueSet s;
    for (auto x : xs) s.insert(pslola::Value{x});
    return s;
}

inline pslola::ValueSet bools(std::initializer_list<bool> xs) {
    pslola::ValueSet s;
    for (auto x : xs) s.insert(pslola::Value{x});
    return s;
}

}  // namespace testing
