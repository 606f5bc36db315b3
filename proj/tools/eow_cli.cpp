#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "eow/io/runs.hpp"

using namespace eow;
using namespace eow::io;

namespace {

struct Args {
  std::string input;
  std::string plot_dir;
  std::string config_path;
  std::string output;
  std::string target;
  std::optional<std::uint64_t> seed;
  std::optional<int> degree_cap;
  bool timing = false;
};

json load_json_file(const std::string& path, const std::string& what) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot read " + what + " " + path);
  const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": JSON syntax error at " + eow::io::detail::line_col(text, e.byte) + ": " + e.what());
  }
}

int finish(Report& R, const Args& a, double seconds, bool write_plot) {
  if (a.timing) R.doc["timing"] = {{"seconds", jnum(seconds)}};
  const std::string text = canonical_dump(R.doc);
  if (a.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(a.output, std::ios::binary);
    if (!f) throw PreconditionError("cannot write report " + a.output);
    f << text;
  }
  if (write_plot && !a.plot_dir.empty())
    for (const auto& path : emit_plot(R.traces, a.plot_dir)) std::cerr << "wrote " << path << "\n";
  return R.exit_code;
}

int run(const std::string& command, const Args& a) {
  const auto start = std::chrono::steady_clock::now();
  std::optional<Problem> P;
  if (!a.input.empty()) P = load_problem(a.input, a.degree_cap);
  json over = json::object();
  if (!a.config_path.empty()) over = load_json_file(a.config_path, "config file");
  if (!over.is_object()) throw ParseError(a.config_path + ": config file must hold an object");
  const json config = resolve_config(P ? P->config : json::object(), over, a.seed);
  Report R;
  if (command == "classify") {
    if (!P) throw ParseError("classify needs --input");
    R = run_classify(*P, config);
  } else {
    R = run_certify(P, a.target, config);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (command == "plot") {
    Args b = a;
    if (b.plot_dir.empty()) b.plot_dir = ".";
    for (const auto& path : emit_plot(R.traces, b.plot_dir)) std::cout << path << "\n";
    return R.exit_code;
  }
  return finish(R, a, secs, command == "certify");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge-of-the-wedge normal forms, wedge classification and disc certificates"};
  app.require_subcommand(1);
  Args a;
  std::uint64_t seed = 0;
  int cap = 0;

  auto common = [&](CLI::App* sub, bool needs_target) {
    sub->add_option("--input,-i", a.input, "problem file (JSON)");
    sub->add_option("--seed", seed, "random seed (overrides config)");
    sub->add_option("--config", a.config_path, "config override file (JSON)");
    sub->add_option("--degree-cap", cap, "truncation degree (overrides the problem file)")->check(CLI::Range(4, 24));
    if (needs_target)
      sub->add_option("--target,-t", a.target, "certificate target")
          ->required()
          ->check(CLI::IsMember(certify_targets()));
  };
  CLI::App* classify = app.add_subcommand("classify", "normal form, Levi data and wedge verdict");
  common(classify, false);
  classify->add_option("--output,-o", a.output, "write the report here instead of stdout");
  classify->add_flag("--timing", a.timing, "add wall-clock timing to the report");
  CLI::App* certify = app.add_subcommand("certify", "run a certificate and print its report");
  common(certify, true);
  certify->add_option("--plot", a.plot_dir, "also write CSV traces into this directory");
  certify->add_option("--output,-o", a.output, "write the report here instead of stdout");
  certify->add_flag("--timing", a.timing, "add wall-clock timing to the report");
  CLI::App* plot = app.add_subcommand("plot", "run a certificate and write only its CSV traces");
  common(plot, true);
  plot->add_option("--plot", a.plot_dir, "output directory (default .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_parse;
  }
  for (CLI::App* sub : {classify, certify, plot}) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed")) a.seed = seed;
    if (sub->count("--degree-cap")) a.degree_cap = cap;
    try {
      return run(sub->get_name(), a);
    } catch (const ParseError& e) {
      std::cerr << "parse error: " << e.what() << "\n";
      return exit_parse;
    } catch (const PreconditionError& e) {
      std::cerr << "rejected: " << e.what() << "\n";
      return exit_rejected;
    } catch (const CertificateError& e) {
      std::cerr << "invalid certificate: " << e.what() << "\n";
      return exit_invalid;
    } catch (const NumericalError& e) {
      std::cerr << "numerical failure: " << e.what() << "\n";
      return exit_invalid;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return exit_invalid;
    }
  }
  return exit_parse;
}
