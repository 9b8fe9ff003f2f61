// Command-line front end: specification checking, synchronous and
// possible-worlds evaluation, decentralized simulation, trace generation,
// and a synthetic benchmark.
//
// Exit codes: 0 clean, 1 property violation or ill-formed specification,
// 2 bad input (unreadable files, parse errors, bad arguments).

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "pslola/depgraph.hpp"
#include "pslola/interleave.hpp"
#include "pslola/parse.hpp"
#include "pslola/ps.hpp"
#include "pslola/simulate.hpp"
#include "pslola/sync.hpp"
#include "pslola/typecheck.hpp"
#include "pslola/workload.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInput = 2;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw pslola::TraceError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_out(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw pslola::TraceError("cannot write '" + path + "'");
    out << text;
}

struct Timer {
    bool enabled = false;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void lap(const std::string& phase) {
        if (!enabled) return;
        auto now = std::chrono::steady_clock::now();
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now - start).count();
        std::cout << "time_ms " << phase << " = " << ms << "\n";
        start = now;
    }
};

pslola::Spec load_spec(const std::string& path) {
    return pslola::parse_and_check(slurp(path));
}

// Ill-formed specifications stop evaluation commands with exit code 1.
bool report_ill_formed(const pslola::Spec& spec) {
    auto wf = pslola::check_well_formed(pslola::build_dependency_graph(spec));
    if (!wf.ok) std::cout << wf.description << "\n";
    return !wf.ok;
}

bool sync_has_violation(const pslola::Spec& spec,
                        const std::map<std::string, std::vector<pslola::Value>>& outs) {
    for (const auto& [name, vals] : outs) {
        if (spec.stream_type(name) != pslola::Type::Bool) continue;
        for (const auto& v : vals)
            if (!std::get<bool>(v)) return true;
    }
    return false;
}

bool sets_have_violation(const pslola::Spec& spec,
                         const std::map<std::string, std::vector<pslola::ValueSet>>& outs) {
    for (const auto& [name, sets] : outs) {
        if (spec.stream_type(name) != pslola::Type::Bool) continue;
        for (const auto& s : sets)
            if (s.count(pslola::Value{false})) return true;
    }
    return false;
}

void print_values(const std::map<std::string, std::vector<pslola::Value>>& outs) {
    for (const auto& [name, vals] : outs)
        for (size_t j = 0; j < vals.size(); ++j)
            std::cout << name << "(" << j << ") = " << pslola::to_string(vals[j]) << "\n";
}

void print_sets(const std::map<std::string, std::vector<pslola::ValueSet>>& outs) {
    for (const auto& [name, sets] : outs)
        for (size_t j = 0; j < sets.size(); ++j)
            std::cout << name << "(" << j << ") = " << pslola::to_string(sets[j]) << "\n";
}

std::string backend_name() {
    const char* env = std::getenv("PSLOLA_BACKEND");
    return env ? env : "exhaustive";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stream runtime verification under bounded clock skew"};
    app.require_subcommand(1);

    std::string spec_path, trace_path, views_path, out_path;
    int eps = 1, k = 1, monitors = 1, n_override = -1, gen_n = 100, bench_inputs = 3;
    double p_read = 0.8, density = 1.0;
    std::uint64_t seed = 1;
    std::string engine = "reference";
    bool pretty = false, timings = false, compare = false;

    auto* c_check = app.add_subcommand("check", "Parse, type-check, and analyze a specification");
    c_check->add_option("spec", spec_path, "specification file")->required();
    c_check->add_option("--eps", eps, "clock skew bound for edge annotation");

    auto* c_sync = app.add_subcommand("eval-sync", "Synchronous evaluation over a trace");
    c_sync->add_option("spec", spec_path)->required();
    c_sync->add_option("trace", trace_path)->required();
    c_sync->add_option("--n", n_override, "horizon override");

    auto* c_ps = app.add_subcommand("eval-ps", "Possible-worlds evaluation under clock skew");
    c_ps->add_option("spec", spec_path)->required();
    c_ps->add_option("trace", trace_path)->required();
    c_ps->add_option("--eps", eps, "clock skew bound");
    c_ps->add_option("--engine", engine)->check(CLI::IsMember({"reference", "windowed", "both"}));
    c_ps->add_option("--n", n_override, "horizon override");

    auto* c_sim = app.add_subcommand("simulate", "Decentralized round-based monitoring");
    c_sim->add_option("spec", spec_path)->required();
    c_sim->add_option("trace", trace_path)->required();
    c_sim->add_option("--eps", eps, "clock skew bound");
    c_sim->add_option("--k", k, "positions per round");
    c_sim->add_option("--monitors", monitors, "monitor count");
    c_sim->add_option("--p-read", p_read, "per-monitor read probability");
    c_sim->add_option("--seed", seed, "read assignment seed");
    c_sim->add_option("--views", views_path, "pinned read assignment (monitor,stream,timestamp)");
    c_sim->add_option("--n", n_override, "horizon override");
    c_sim->add_flag("--pretty", pretty, "print per-round local and merged states");
    c_sim->add_flag("--check", compare, "compare against the centralized verdict");
    c_sim->add_flag("--timings", timings, "print wall-clock phase timings");

    auto* c_gen = app.add_subcommand("gen-trace", "Generate a synthetic input trace");
    c_gen->add_option("spec", spec_path)->required();
    c_gen->add_option("--n", gen_n, "horizon");
    c_gen->add_option("--density", density, "event probability per instant");
    c_gen->add_option("--seed", seed, "generator seed");
    c_gen->add_option("--out", out_path, "output file (default stdout)");

    auto* c_bench = app.add_subcommand("bench", "Synthetic end-to-end benchmark");
    c_bench->add_option("--inputs", bench_inputs, "input stream count");
    c_bench->add_option("--eps", eps, "clock skew bound");
    c_bench->add_option("--k", k, "positions per round");
    c_bench->add_option("--monitors", monitors, "monitor count");
    c_bench->add_option("--n", gen_n, "horizon");
    c_bench->add_option("--p-read", p_read, "per-monitor read probability");
    c_bench->add_option("--seed", seed, "workload seed");
    c_bench->add_flag("--timings", timings, "print wall-clock phase timings");

    CLI11_PARSE(app, argc, argv);

    try {
        Timer timer;
        timer.enabled = timings;

        if (c_check->parsed()) {
            pslola::Spec spec = load_spec(spec_path);
            std::cout << pslola::to_string(spec);
            auto graph = pslola::build_dependency_graph(spec);
            for (const auto& e : graph.edges) {
                auto ws = pslola::ps_weight_set(e.weight, eps);
                std::cout << "edge " << e.from << " -> " << e.to << " weight " << e.weight
                          << " skew-weights {";
                for (size_t i = 0; i < ws.size(); ++i)
                    std::cout << (i ? ", " : "") << ws[i];
                std::cout << "}\n";
            }
            auto wf = pslola::check_well_formed(graph);
            std::cout << wf.description << "\n";
            return wf.ok ? kExitOk : kExitViolation;
        }

        if (c_sync->parsed()) {
            pslola::Spec spec = load_spec(spec_path);
            if (report_ill_formed(spec)) return kExitViolation;
            auto ds = pslola::load_trace_csv(slurp(trace_path), spec, n_override);
            auto outs = pslola::evaluate_sync(spec, pslola::densify(ds, spec));
            print_values(outs);
            return sync_has_violation(spec, outs) ? kExitViolation : kExitOk;
        }

        if (c_ps->parsed()) {
            pslola::Spec spec = load_spec(spec_path);
            if (report_ill_formed(spec)) return kExitViolation;
            auto ds = pslola::load_trace_csv(slurp(trace_path), spec, n_override);
            bool violation = false;
            if (engine == "reference" || engine == "both") {
                auto backend = pslola::make_backend(backend_name());
                auto ref = pslola::evaluate_ps_backend(*backend, spec, ds, eps);
                timer.lap("reference");
                if (engine == "both") std::cout << "engine reference\n";
                print_sets(ref.sets);
                std::cout << "assignments = " << ref.assignments << "\n";
                violation = violation || sets_have_violation(spec, ref.sets);
            }
            if (engine == "windowed" || engine == "both") {
                auto win = pslola::evaluate_ps_windowed(spec, ds, eps);
                timer.lap("windowed");
                if (engine == "both") std::cout << "engine windowed\n";
                print_sets(win);
                violation = violation || sets_have_violation(spec, win);
            }
            if (engine == "both") {
                auto cmp = pslola::compare_semantics(spec, ds, eps);
                std::cout << "reference-within-windowed = "
                          << (cmp.reference_within_windowed ? "yes" : "no") << "\n";
                std::cout << "engines-equal = " << (cmp.equal ? "yes" : "no") << "\n";
                for (const auto& d : cmp.differences) std::cout << "difference " << d << "\n";
            }
            return violation ? kExitViolation : kExitOk;
        }

        if (c_sim->parsed()) {
            pslola::Spec spec = load_spec(spec_path);
            if (report_ill_formed(spec)) return kExitViolation;
            auto ds = pslola::load_trace_csv(slurp(trace_path), spec, n_override);
            std::vector<pslola::View> views;
            if (!views_path.empty())
                views = pslola::load_views_csv(slurp(views_path), ds, monitors);
            else
                views = pslola::assign_reads(ds, {monitors, p_read, seed});
            timer.lap("setup");
            pslola::SimResult sim = pslola::run_simulation(spec, ds, views, {eps, k});
            timer.lap("simulate");
            if (pretty) {
                for (const auto& rec : sim.trace) {
                    std::cout << "round " << rec.round << " keys [" << rec.lo << ".." << rec.hi
                              << "]\n";
                    for (int m = 0; m < sim.monitors; ++m) {
                        std::cout << "  monitor " << (m + 1) << " local  "
                                  << pslola::to_string(rec.local[static_cast<size_t>(m)]) << "\n";
                        std::cout << "  monitor " << (m + 1) << " merged "
                                  << pslola::to_string(rec.merged[static_cast<size_t>(m)]) << "\n";
                    }
                }
            }
            print_sets(sim.result);
            std::cout << "rounds = " << sim.rounds << "\n";
            std::cout << "messages = " << sim.messages << "\n";
            std::cout << "bytes = " << sim.bytes << "\n";
            std::cout << "discharged = " << sim.discharged << "\n";
            if (compare) {
                auto cc = pslola::check_against_centralized(spec, ds, eps, sim);
                timer.lap("centralized");
                std::cout << "matches-centralized = " << (cc.equal ? "yes" : "no") << "\n";
                for (const auto& d : cc.differences) std::cout << "difference " << d << "\n";
            }
            return sets_have_violation(spec, sim.result) ? kExitViolation : kExitOk;
        }

        if (c_gen->parsed()) {
            pslola::Spec spec = load_spec(spec_path);
            pslola::GenConfig cfg;
            cfg.n = gen_n;
            cfg.density = density;
            cfg.seed = seed;
            write_out(out_path, pslola::dump_trace_csv(pslola::gen_inputs(spec, cfg)));
            return kExitOk;
        }

        if (c_bench->parsed()) {
            pslola::Spec spec = pslola::bench_spec(bench_inputs);
            pslola::GenConfig cfg;
            cfg.n = gen_n;
            cfg.seed = seed;
            auto ds = pslola::gen_inputs(spec, cfg);
            auto views = pslola::assign_reads(ds, {monitors, p_read, seed + 1});
            timer.lap("generate");
            pslola::SimResult sim = pslola::run_simulation(spec, ds, views, {eps, k});
            timer.lap("simulate");
            std::cout << "inputs = " << bench_inputs << "\n";
            std::cout << "n = " << gen_n << "\n";
            std::cout << "eps = " << eps << "\n";
            std::cout << "k = " << k << "\n";
            std::cout << "monitors = " << monitors << "\n";
            std::cout << "rounds = " << sim.rounds << "\n";
            std::cout << "messages = " << sim.messages << "\n";
            std::cout << "bytes = " << sim.bytes << "\n";
            std::cout << "discharged = " << sim.discharged << "\n";
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
