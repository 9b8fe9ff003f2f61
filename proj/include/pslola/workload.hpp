#pragma once

// Synthetic workloads: input traces for a specification, read assignments
// for a monitor fleet, and the aircraft-separation helper used by the
// trajectory fixtures.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "pslola/stream.hpp"
#include "pslola/typecheck.hpp"

namespace pslola {

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Marsaglia polar method, hand-rolled so traces are byte-identical across
// standard library implementations (std::normal_distribution is not).
inline double gaussian(std::mt19937_64& rng) {
    for (;;) {
        double u = 2.0 * uniform01(rng) - 1.0;
        double v = 2.0 * uniform01(rng) - 1.0;
        double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

struct GenConfig {
    int n = 100;
    double density = 1.0;  // probability an instant carries an event
    std::uint64_t seed = 1;
};

// Random-walk events for every input stream of the spec: integers step by
// rounded gaussians (unsigned walks clamp at zero), floats drift smoothly,
// booleans hold their value with probability 0.8.
inline DistributedStream gen_inputs(const Spec& spec, const GenConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    DistributedStream ds;
    ds.n = cfg.n;
    for (const auto& in : spec.inputs) {
        auto& evs = ds.events[in.name];
        std::int64_t iv = std::llround(gaussian(rng) * 10.0);
        if (in.is_unsigned) iv = std::max<std::int64_t>(0, iv);
        double fv = gaussian(rng) * 10.0;
        bool bv = uniform01(rng) < 0.5;
        for (int sigma = 0; sigma <= cfg.n; ++sigma) {
            bool present = cfg.density >= 1.0 || uniform01(rng) < cfg.density;
            switch (in.type) {
                case Type::Int:
                    iv += std::llround(gaussian(rng) * 3.0);
                    if (in.is_unsigned) iv = std::max<std::int64_t>(0, iv);
                    if (present) evs.push_back({sigma, Value{iv}});
                    break;
                case Type::Float:
                    fv += gaussian(rng);
                    if (present) evs.push_back({sigma, Value{fv}});
                    break;
                case Type::Bool:
                    if (uniform01(rng) >= 0.8) bv = !bv;
                    if (present) evs.push_back({sigma, Value{bv}});
                    break;
            }
        }
    }
    return ds;
}

struct ReadConfig {
    int monitors = 1;
    double p_read = 0.8;  // chance each monitor reads each event
    std::uint64_t seed = 1;
};

// Bernoulli read assignment with repair: an event nobody picked up goes to
// a monitor chosen by its position in the global event order, so every
// event has at least one reader.
inline std::vector<View> assign_reads(const DistributedStream& ds, const ReadConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    std::vector<View> views(static_cast<size_t>(cfg.monitors));
    int index = 0;
    for (const auto& [name, evs] : ds.events)
        for (const auto& [sigma, v] : evs) {
            bool covered = false;
            for (int m = 0; m < cfg.monitors; ++m)
                if (uniform01(rng) < cfg.p_read) {
                    views[static_cast<size_t>(m)].reads[{name, sigma}] = v;
                    covered = true;
                }
            if (!covered) views[static_cast<size_t>(index % cfg.monitors)].reads[{name, sigma}] = v;
            ++index;
        }
    return views;
}

// Straight-line separation of two aircraft given altitude (m) and
// latitude/longitude in degrees (fixed meters-per-degree factors).
inline double race_separation(double alt1, double lat1, double lon1, double alt2, double lat2,
                              double lon2) {
    double da = alt1 - alt2;
    double dlon = (lon1 - lon2) * 87620.0;
    double dlat = (lat1 - lat2) * 111200.0;
    return std::sqrt(da * da + dlon * dlon + dlat * dlat);
}

// Fixed benchmark specification over `inputs` streams (types cycle through
// int, bool, float): running sums over the integers, counters over the
// booleans, drifts over the floats, and one boolean check tying the first
// of each together.
inline Spec bench_spec(int inputs) {
    std::string text;
    std::vector<std::string> ints, bools, floats;
    for (int i = 0; i < inputs; ++i) {
        std::string name = "s" + std::to_string(i);
        switch (i % 3) {
            case 0:
                text += "input " + name + " : int\n";
                ints.push_back(name);
                break;
            case 1:
                text += "input " + name + " : bool\n";
                bools.push_back(name);
                break;
            default:
                text += "input " + name + " : float\n";
                floats.push_back(name);
                break;
        }
    }
    for (const auto& s : ints) text += "output sum_" + s + " := sum_" + s + "[-1, 0] + " + s + "\n";
    for (const auto& s : bools)
        text += "output cnt_" + s + " := ite(" + s + ", cnt_" + s + "[-1, 0] + 1, cnt_" + s +
                "[-1, 0])\n";
    for (const auto& s : floats) text += "output drift_" + s + " := " + s + " - " + s + "[-1, 0]\n";
    std::string check = "true";
    if (!ints.empty()) check = "sum_" + ints[0] + " >= sum_" + ints[0] + "[-2, 0]";
    if (!bools.empty()) check += " || cnt_" + bools[0] + " - cnt_" + bools[0] + "[-2, 0] <= 2";
    text += "output check := " + check + "\n";
    return parse_and_check(text);
}

}  // namespace pslola
