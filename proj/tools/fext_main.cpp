#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fext/harness.hpp"

using namespace fext;

namespace {

int emit(const hn::Report& rep, const std::string& format, const std::string& out) {
  std::string bytes = hn::emit_report(rep, format);
  if (out.empty()) {
    std::cout << bytes;
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) {
      std::cerr << "cannot write " << out << "\n";
      return 2;
    }
    f << bytes;
  }
  return rep.all_ok() ? 0 : 1;
}

// builtin names win; otherwise read a file, with - meaning stdin
hn::Scenario load_scenario(const std::string& src) {
  if (auto b = hn::find_builtin(src)) return *b;
  std::string text;
  if (src == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    text = ss.str();
  } else {
    std::ifstream f(src, std::ios::binary);
    if (!f) throw ParseError(0, 0, "cannot open scenario '" + src + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  return hn::parse_scenario(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact checker for finite field extension towers"};
  app.require_subcommand(1);

  auto* cat = app.add_subcommand("catalog", "list the built-in scenarios");

  std::string src, format = "text", out;
  std::vector<std::string> suites;
  int64_t seed = -1;
  auto* ver = app.add_subcommand("verify", "run a scenario's checks");
  ver->add_option("scenario", src, "builtin name, file path, or - for stdin")
      ->required();
  ver->add_option("--suite", suites, "run only these suites");
  ver->add_option("--seed", seed, "override the scenario seed");
  ver->add_option("--format", format, "report format")
      ->check(CLI::IsMember({"json", "text"}));
  ver->add_option("--out", out, "write the report to this path");

  std::string dsrc;
  auto* des = app.add_subcommand("describe", "print degrees and witness dims");
  des->add_option("scenario", dsrc, "builtin name, file path, or - for stdin")
      ->required();

  uint64_t fseed = 1;
  size_t fcount = 50;
  uint32_t fmax = 16;
  bool fverbose = false;
  std::string fformat = "text", fout;
  auto* fz = app.add_subcommand("fuzz", "randomized tower sweep");
  fz->add_option("--seed", fseed, "random seed");
  fz->add_option("--count", fcount, "number of samples");
  fz->add_option("--max-degree", fmax, "total degree bound");
  fz->add_flag("--verbose", fverbose, "report every sample, not just failures");
  fz->add_option("--format", fformat, "report format")
      ->check(CLI::IsMember({"json", "text"}));
  fz->add_option("--out", fout, "write the report to this path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cat->parsed()) {
      for (const auto& s : hn::builtin_catalog()) {
        auto built = hn::build_scenario(s);
        std::cout << s.name << "  [L:K]=" << built.tower->rank()
                  << "  steps=" << built.tower->st.nsteps()
                  << "  checks=" << s.checks.size() << "\n";
      }
      return 0;
    }
    if (ver->parsed()) {
      hn::Scenario s = load_scenario(src);
      if (!suites.empty()) {
        for (const auto& n : suites) {
          bool known = false;
          for (const auto& sn : hn::suite_names()) known = known || sn == n;
          if (!known) throw UnknownCheck(n);
        }
        s.checks = suites;
      }
      if (seed >= 0) s.seed = uint64_t(seed);
      if (s.checks.empty()) {
        auto built = hn::build_scenario(s);
        std::cout << "scenario " << s.name << ": [L:K]=" << built.tower->rank()
                  << "\n";
        for (size_t i = 0; i < built.tower->st.nsteps(); ++i)
          std::cout << "  " << built.tower->st.names[i] << " degree "
                    << built.tower->st.degs[i] << "\n";
        return 0;
      }
      return emit(hn::run_checks(s), format, out);
    }
    if (des->parsed()) {
      hn::Scenario s = load_scenario(dsrc);
      auto built = hn::build_scenario(s);
      const auto& t = built.tower;
      std::cout << "scenario " << s.name << "\n";
      std::cout << "  characteristic " << t->base.p << ", [L:K] = " << t->rank()
                << "\n";
      for (size_t i = 0; i < t->st.nsteps(); ++i)
        std::cout << "  step " << t->st.names[i] << ": degree "
                  << t->st.degs[i] << "\n";
      auto sep = df::separable_closure(t);
      auto pi = df::purely_inseparable_part(t);
      std::cout << "  separable part dim " << sep.dim()
                << ", purely inseparable part dim " << pi.dim() << "\n";
      return 0;
    }
    if (fz->parsed()) {
      hn::FuzzBounds b;
      b.max_degree = fmax;
      b.verbose = fverbose;
      return emit(hn::fuzz_towers(fseed, fcount, b), fformat, fout);
    }
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const UnknownCheck& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const AlgebraError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
