// lws_cli: run a trace against one structure and report costs.

#include <fstream>
#include <iostream>
#include <iterator>
#include <string>

#include <CLI11.hpp>

#include "lws/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Run access traces against layered working-set trees and related structures."};

  std::string structure = "lws";
  std::string trace_path;
  std::string family;
  std::uint64_t n = 1000;
  std::uint64_t ops = 10000;
  std::uint64_t seed = 1;
  double theta = 1.0;
  std::uint64_t width = 8;
  std::uint64_t verify_every = 100;
  std::string csv_path;
  std::string json_path;
  bool no_preload = false;

  app.add_option("--structure", structure, "lws | ws_reference | skip_splay | skip_splay_doubled | redblack_baseline")
      ->capture_default_str();
  auto* trace_opt = app.add_option("--trace", trace_path, "Trace file (<S|I|D> <key> per line)");
  auto* gen_opt = app.add_option("--gen", family,
                                 "Generator: uniform | zipf_recency | sequential_scan | finger_walk | repeat_block | mixed");
  trace_opt->excludes(gen_opt);
  app.add_option("--n", n, "Universe size {1..n}")->capture_default_str();
  app.add_option("--ops", ops, "Generated operations")->capture_default_str();
  app.add_option("--seed", seed, "Generator seed")->capture_default_str();
  app.add_option("--theta", theta, "zipf_recency exponent")->capture_default_str();
  app.add_option("--width", width, "repeat_block block size")->capture_default_str();
  app.add_option("--verify-every", verify_every, "Full invariant check interval (ops)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--csv", csv_path, "Per-operation cost rows");
  app.add_option("--json", json_path, "Summary");
  app.add_flag("--no-preload", no_preload, "Do not insert {1..n} before a generated search-only trace");

  CLI11_PARSE(app, argc, argv);

  try {
    if (trace_path.empty() && family.empty()) throw std::invalid_argument("need --trace or --gen");
    lws::RunConfig cfg;
    cfg.structure = lws::parse_structure(structure);
    cfg.verify_every = verify_every;
    cfg.keep_rows = !csv_path.empty();
    const bool skip = cfg.structure == lws::Structure::skip_splay || cfg.structure == lws::Structure::skip_splay_doubled;

    lws::Trace trace;
    if (!trace_path.empty()) {
      trace = lws::parse(read_file(trace_path));
    } else {
      lws::GeneratorSpec spec{lws::parse_family(family), n, ops, seed, theta, width};
      trace = lws::generate(spec);
      if (!skip && spec.family != lws::Family::mixed && !no_preload) trace = lws::with_preload(trace, n, seed);
    }
    if (skip) {
      if (trace_path.empty()) {
        cfg.skip_k = lws::skip_k_for(n);
      } else {
        // Smallest universe covering the trace.
        lws::Key hi = 1;
        for (const auto& op : trace) hi = std::max(hi, op.key);
        for (int k = 2; k <= 5 && cfg.skip_k == 0; ++k)
          if (hi <= (lws::Key{1} << (1 << (k - 1))) - 1) cfg.skip_k = k;
      }
      if (cfg.skip_k == 0) throw std::invalid_argument("skip-splay needs n = 3, 15, 255 or 65535");
    }

    lws::Runner runner(cfg, lws::load_constants(lws::constants_path()));
    lws::RunSummary summary = runner.run(trace);

    if (!csv_path.empty()) {
      std::ofstream out(csv_path);
      if (!out) throw std::runtime_error("cannot write " + csv_path);
      lws::write_csv(out, summary.rows);
    }
    auto j = lws::summary_json(summary);
    if (!json_path.empty()) {
      std::ofstream out(json_path);
      if (!out) throw std::runtime_error("cannot write " + json_path);
      out << j.dump(2) << '\n';
    } else {
      std::cout << j.dump(2) << '\n';
    }
    for (const auto& m : summary.messages) std::cerr << m << '\n';
    return summary.ok() ? 0 : 1;
  } catch (const lws::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
