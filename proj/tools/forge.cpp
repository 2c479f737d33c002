// forge: build and certify the genus-8 Nikulin construction chain.
//
//   run      construct the chain for a seed and emit the certificate
//   verify   recompute a certificate from its recorded inputs, compare bytes
//   lattice  enumerate Picard classes with prescribed square and degree
//   hf       print the threefold's Hilbert staircase for a seed
//
// Options resolve as CLI > FORGE_SEED > config file > built-in defaults.
// The config file is plain key=value lines with keys seed, retries, out;
// --config names it explicitly, otherwise ./forge.cfg is read when present.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "nikforge/pipeline.hpp"

namespace {

struct Options {
  std::uint64_t seed = 1;
  unsigned retries = 32;
  std::string out;  // empty: certificate goes to stdout
};

// nullopt on success, otherwise the complaint to print
std::optional<std::string> apply_config(const std::string& path, bool required,
                                        Options& o) {
  std::ifstream in(path);
  if (!in) {
    if (required) return "cannot read config file: " + path;
    return std::nullopt;
  }
  std::string line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty() || line[0] == '#') continue;
    std::string::size_type eq = line.find('=');
    if (eq == std::string::npos)
      return path + ":" + std::to_string(ln) + ": expected key=value";
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    try {
      if (key == "seed")
        o.seed = std::stoull(val);
      else if (key == "retries")
        o.retries = (unsigned)std::stoul(val);
      else if (key == "out")
        o.out = val;
      else
        return path + ":" + std::to_string(ln) + ": unknown key " + key;
    } catch (const std::exception&) {
      return path + ":" + std::to_string(ln) + ": bad value for " + key;
    }
  }
  return std::nullopt;
}

std::optional<std::string> apply_env(Options& o) {
  const char* env = std::getenv("FORGE_SEED");
  if (!env) return std::nullopt;
  try {
    o.seed = std::stoull(env);
  } catch (const std::exception&) {
    return std::string("FORGE_SEED is not an unsigned integer: ") + env;
  }
  return std::nullopt;
}

int emit(const nikforge::Certificate& cert, const std::string& out) {
  std::string bytes = cert.serialize();
  if (out.empty()) {
    std::cout << bytes;
    return cert.verdict ? 0 : 1;
  }
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f) {
    std::cerr << "forge: cannot open output path: " << out << "\n";
    return 2;
  }
  f << bytes;
  f.close();
  if (!f) {
    std::cerr << "forge: write failed: " << out << "\n";
    return 2;
  }
  return cert.verdict ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"construct and certify genus-8 Nikulin K3 surfaces"};
  app.require_subcommand(1);

  std::uint64_t cli_seed = 0;
  unsigned cli_retries = 0;
  std::string cli_out, cli_config;

  CLI::App* run = app.add_subcommand("run", "build the chain, emit a certificate");
  CLI::Option* run_seed = run->add_option("--seed", cli_seed, "rng seed");
  CLI::Option* run_out =
      run->add_option("--out", cli_out, "certificate path (default stdout)");
  CLI::Option* run_retries =
      run->add_option("--retries", cli_retries, "per-gate retry budget");
  CLI::Option* run_config =
      run->add_option("--config", cli_config, "key=value options file");

  std::string verify_path;
  CLI::App* verify = app.add_subcommand(
      "verify", "recompute a certificate and compare byte for byte");
  verify->add_option("certificate", verify_path, "certificate JSON path")
      ->required();

  CLI::App* lattice = app.add_subcommand("lattice", "Picard lattice queries");
  lattice->require_subcommand(1);
  long long selfint = 0, hdeg = 0;
  CLI::App* search = lattice->add_subcommand(
      "search", "classes with given self-intersection and polarization degree");
  search->add_option("--selfint", selfint, "self-intersection v.v")->required();
  search->add_option("--hdeg", hdeg, "polarization degree v.H")->required();

  CLI::App* hf = app.add_subcommand("hf", "Hilbert staircase of a stage");
  std::string hf_stage;
  CLI::Option* hf_seed = hf->add_option("--seed", cli_seed, "rng seed");
  hf->add_option("--stage", hf_stage, "pipeline stage (threefold)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (run->parsed()) {
    Options o;
    bool explicit_cfg = run_config->count() > 0;
    if (auto err = apply_config(explicit_cfg ? cli_config : "forge.cfg",
                                explicit_cfg, o)) {
      std::cerr << "forge: " << *err << "\n";
      return 2;
    }
    if (auto err = apply_env(o)) {
      std::cerr << "forge: " << *err << "\n";
      return 2;
    }
    if (run_seed->count()) o.seed = cli_seed;
    if (run_retries->count()) o.retries = cli_retries;
    if (run_out->count()) o.out = cli_out;
    nikforge::PipelineState st = nikforge::run_full(o.seed, o.retries);
    std::cerr << "forge run: seed " << o.seed << ", verdict "
              << (st.cert.verdict ? "pass" : "fail") << "\n";
    return emit(st.cert, o.out);
  }

  if (verify->parsed()) {
    std::ifstream f(verify_path, std::ios::binary);
    if (!f) {
      std::cerr << "forge: cannot read " << verify_path << "\n";
      return 2;
    }
    std::ostringstream buf;
    buf << f.rdbuf();
    nikforge::ReproduceResult r =
        nikforge::reproduce_certificate(buf.str());
    std::cout << r.message << "\n";
    return r.ok ? 0 : 1;
  }

  if (search->parsed()) {
    nikforge::LatticeSearch s =
        nikforge::enumerate_classes(nikforge::Int(selfint),
                                    nikforge::Int(hdeg));
    std::cout << "classes with v.v = " << selfint << ", v.H = " << hdeg
              << ": " << s.classes.size() << " (nodes visited "
              << s.visited << ")\n";
    for (auto& v : s.classes) {
      const char* sep = "";
      std::cout << "  [";
      for (auto& c : v) {
        std::cout << sep << c;
        sep = ", ";
      }
      std::cout << "]\n";
    }
    return 0;
  }

  if (hf->parsed()) {
    if (hf_stage != "threefold") {
      std::cerr << "forge: unknown stage for hf: " << hf_stage << "\n";
      return 2;
    }
    Options o;
    if (auto err = apply_config("forge.cfg", false, o)) {
      std::cerr << "forge: " << *err << "\n";
      return 2;
    }
    if (auto err = apply_env(o)) {
      std::cerr << "forge: " << *err << "\n";
      return 2;
    }
    if (hf_seed->count()) o.seed = cli_seed;
    try {
      nikforge::Json d;
      nikforge::BaseGeometry base = nikforge::build_base(d);
      nikforge::Rng rng(o.seed);
      nikforge::ConicA conic =
          nikforge::choose_conic(base, rng, o.retries, d);
      nikforge::SexticA sx = nikforge::build_sextic(base, conic.z, d);
      nikforge::Threefold tf =
          nikforge::build_threefold(base, sx, rng, d);
      for (int deg = 1; deg <= 7; ++deg)
        std::cout << "HF(" << deg << ") = " << tf.hf[deg - 1] << "\n";
      std::cout << "fit: dimension " << tf.fit.dimension << ", degree "
                << tf.fit.degree << "\n";
      return 0;
    } catch (const nikforge::StageFailure& e) {
      std::cerr << "forge: stage " << e.stage << " failed: " << e.what()
                << "\n";
      return 1;
    }
  }

  return 2;
}
