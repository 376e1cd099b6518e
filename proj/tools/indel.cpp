// SPDX-License-Identifier: Apache-2.0
//
// indel: command-line front end for the update codec, the corpus generator,
// the bound calculator, the analysis lab and the sync protocol.
//
// Exit statuses: 0 success, 1 other failure, 2 I/O error, 3 alphabet
// mismatch, 4 digest mismatch (wrong old file or corrupted update).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "indel/bounds.hpp"
#include "indel/container.hpp"
#include "indel/fileio.hpp"
#include "indel/sim.hpp"
#include "indel/sync.hpp"
#include "indel/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace indel;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitIo = 2;
constexpr int kExitAlphabet = 3;
constexpr int kExitDigest = 4;

int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return kExitIo;
    case ErrorCode::kAlphabetMismatch: return kExitAlphabet;
    case ErrorCode::kDigestMismatch: return kExitDigest;
    default: return kExitFailure;
  }
}

json bound_json(const RateBound& b) {
  return {{"value", b.value}, {"terms", b.terms}, {"tau", b.tau}, {"truncation_error", b.truncation_error}};
}

json rate_json(const RateReport& r) {
  return {{"n", r.n},
          {"total_bits", r.total_bits},
          {"header_bits", r.header_bits},
          {"op_bits", r.op_bits},
          {"content_bits", r.content_bits},
          {"digest_bits", r.digest_bits},
          {"bits_per_source_symbol", r.bits_per_source_symbol}};
}

// "host:port" -> (host, port).
std::pair<std::string, std::uint16_t> split_address(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) fail(ErrorCode::kIo, "address must look like host:port");
  const int port = std::stoi(addr.substr(colon + 1));
  if (port < 0 || port > 65535) fail(ErrorCode::kIo, "port out of range");
  return {addr.substr(0, colon), static_cast<std::uint16_t>(port)};
}

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

// ---------------------------------------------------------------------------

struct EncodeArgs {
  std::string old_path, new_path, out_path;
  bool oracle_dp = false;
  std::uint32_t alphabet = kByteAlphabet;
};

int run_encode(const EncodeArgs& a) {
  const Sequence x = bytes_to_sequence(read_file(a.old_path), a.alphabet);
  const Sequence y = bytes_to_sequence(read_file(a.new_path), a.alphabet);
  const Transmission t = encode_update(x, y, a.oracle_dp ? DpVariant::kFull : DpVariant::kBanded);
  write_file(a.out_path, serialize(t));
  json j = rate_json(measure_rate(t));
  j["k_ins"] = t.header.k_ins;
  j["k_del"] = t.header.k_del;
  std::cout << j.dump(2) << "\n";
  return 0;
}

struct DecodeArgs {
  std::string old_path, delta_path, out_path;
  std::uint32_t alphabet = 0;  // 0: take it from the container
};

int run_decode(const DecodeArgs& a) {
  const Transmission t = parse(read_file(a.delta_path));
  if (a.alphabet != 0 && a.alphabet != t.header.alphabet) {
    fail(ErrorCode::kAlphabetMismatch, "--alphabet " + std::to_string(a.alphabet) +
                                           " but the update was made over alphabet " +
                                           std::to_string(t.header.alphabet));
  }
  const Sequence x = bytes_to_sequence(read_file(a.old_path), t.header.alphabet);
  const Sequence y = decode_update(x, t);
  write_file(a.out_path, sequence_to_bytes(y));
  return 0;
}

struct GenArgs {
  std::string model = "rpes";
  std::string policy = "uniform";
  std::size_t n = 1000;
  std::uint32_t alphabet = kByteAlphabet;
  double eps = 0.01, del = 0.01;
  std::uint64_t seed = 1;
  std::size_t count = 1;
  std::string out_dir;
};

int run_gen(const GenArgs& a) {
  const CorpusModel model = a.model == "rpes" ? CorpusModel::kRpes : CorpusModel::kApes;
  const ApesPolicy policy = a.policy == "worst-case" ? ApesPolicy::kWorstCaseLB : ApesPolicy::kUniformRandom;
  for (std::size_t k = 0; k < a.count; ++k) {
    const std::uint64_t seed = a.seed + k;
    const CorpusPair pair = generate_corpus_pair(model, a.n, a.alphabet, a.eps, a.del, seed, policy);
    const std::string name = a.model + "_a" + std::to_string(a.alphabet) + "_n" + std::to_string(a.n) + "_s" +
                             std::to_string(seed);
    write_corpus_pair(a.out_dir, name, pair);
    std::cout << (fs::path(a.out_dir) / (name + ".bin")).string() << "\n";
  }
  return 0;
}

struct BoundsArgs {
  double eps = 0.01, del = 0.01, tau = 0.1;
  std::uint32_t alphabet = kByteAlphabet;
};

int run_bounds(const BoundsArgs& a) {
  json j;
  j["eps"] = a.eps;
  j["del"] = a.del;
  j["alphabet"] = a.alphabet;
  const SeriesValue c = c_constant(a.alphabet);
  j["c_constant"] = {{"value", c.value}, {"truncation_error", c.truncation_error}, {"terms", c.terms}};
  j["rpes_lower"] = bound_json(rpes_lower_bound(a.eps, a.del, a.alphabet, a.tau));
  j["rpes_upper"] = bound_json(achievable_upper(a.eps, a.del, a.alphabet, EditModel::kRpes, a.tau));
  j["apes_upper"] = bound_json(achievable_upper(a.eps, a.del, a.alphabet, EditModel::kApes, a.tau));
  if (a.alphabet >= 3 && a.del <= 0.5) {
    j["apes_lower"] = bound_json(apes_lower_bound(a.eps, a.del, a.alphabet));
    j["apes_lower_expanded"] = bound_json(apes_lower_bound_expanded(a.eps, a.del, a.alphabet));
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

struct BenchArgs {
  std::string corpus, csv;
  double tau = 0.1;
};

int run_bench(const BenchArgs& a) {
  if (!fs::is_directory(a.corpus)) fail(ErrorCode::kIo, a.corpus + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(a.corpus)) {
    if (entry.path().extension() == ".bin") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::ofstream out(a.csv);
  if (!out) fail(ErrorCode::kIo, "cannot write " + a.csv);
  out << "schema,pair,model,n,a,eps,del,measured_rate,lower_bound,achievable_upper\n";
  for (const fs::path& f : files) {
    const CorpusPair pair = read_corpus_pair(f);
    const Transmission t = encode_update(pair.x, pair.y);
    if (decode_update(pair.x, t) != pair.y) fail(ErrorCode::kDigestMismatch, "round trip failed on " + f.string());
    const std::string model = pair.meta.value("model", "rpes");
    const double eps = pair.meta.value("eps", 0.0), del = pair.meta.value("del", 0.0);
    const std::uint32_t alpha = pair.x.alphabet;
    double lower = NAN, upper;
    if (model == "apes") {
      if (alpha >= 3 && del <= 0.5) lower = apes_lower_bound(eps, del, alpha).value;
      upper = achievable_upper(eps, del, alpha, EditModel::kApes).value;
    } else {
      lower = rpes_lower_bound(eps, del, alpha, a.tau).value;
      upper = achievable_upper(eps, del, alpha, EditModel::kRpes, a.tau).value;
    }
    out << "1," << f.stem().string() << "," << model << "," << pair.x.size() << "," << alpha << "," << fmt(eps)
        << "," << fmt(del) << "," << fmt(measure_rate(t).bits_per_source_symbol) << "," << fmt(lower) << ","
        << fmt(upper) << "\n";
  }
  if (!out) fail(ErrorCode::kIo, "short write to " + a.csv);
  std::cout << files.size() << " pairs written to " << a.csv << "\n";
  return 0;
}

struct LabArgs {
  std::string experiment;
  std::size_t n = 100, trials = 1000;
  std::uint32_t alphabet = 2;
  double eps = 0.01, del = 0.01;
  std::string rates = "0.2,0.1,0.05,0.02";
  std::uint64_t seed = 1;
  std::string x, y;
  std::size_t max_ins = 1, max_del = 0;
  bool exact = false;
};

void lab_row(const std::string& params, double estimate, double stderr_, double bound) {
  std::cout << "\"" << params << "\"," << fmt(estimate) << "," << fmt(stderr_) << "," << fmt(bound) << "\n";
}

int run_lab(const LabArgs& a) {
  std::ostringstream base;
  base << "n=" << a.n << " a=" << a.alphabet << " trials=" << a.trials << " seed=" << a.seed;
  if (a.experiment == "align" && !a.x.empty()) {
    const AlignmentTree t = align(from_digits(a.x, a.alphabet), from_digits(a.y, a.alphabet));
    json j;
    j["leaves"] = json::array();
    for (const auto& leaf : t.leaves()) j["leaves"].push_back(leaf.segment_lengths);
    j["splits"] = t.split_count();
    j["gamma1"] = t.tagged_count(GammaTag::kGamma1);
    j["gamma2"] = t.tagged_count(GammaTag::kGamma2);
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::cout << "params,estimate,stderr,bound\n";
  if (a.experiment == "typicalize") {
    const auto r = estimate_eliminated_edits(a.n, a.alphabet, a.eps, a.del, a.trials, a.seed);
    lab_row(base.str() + " eps=" + fmt(a.eps) + " del=" + fmt(a.del) + " eliminated_per_symbol", r.estimate,
            r.stderr_, r.bound);
  } else if (a.experiment == "align") {
    for (double rate : parse_list(a.rates)) {
      const auto r = estimate_unresolved_alignments(a.n, a.alphabet, rate, a.trials, a.seed);
      lab_row(base.str() + " rate=" + fmt(rate) + " unresolved_fraction", r.estimate, r.stderr_, r.bound);
    }
  } else if (a.experiment == "enumerate") {
    const Sequence x = from_digits(a.x, a.alphabet);
    const auto set = enumerate_post_edit_set(x, a.max_ins, a.max_del, a.exact ? EditBudget::kExactly : EditBudget::kAtMost);
    lab_row("x=" + a.x + " a=" + std::to_string(a.alphabet) + " max_ins=" + std::to_string(a.max_ins) +
                " max_del=" + std::to_string(a.max_del) + (a.exact ? " exactly" : " at_most"),
            double(set.size()), 0.0, NAN);
  } else if (a.experiment == "natures-secret") {
    const auto r = estimate_natures_secret(a.n, a.alphabet, a.eps, a.del, a.trials, a.seed);
    lab_row(base.str() + " eps=" + fmt(a.eps) + " del=" + fmt(a.del) + " H(E|X,Y)/n", r.estimate, r.stderr_,
            r.bound);
  } else {
    fail(ErrorCode::kDomainError, "unknown experiment " + a.experiment);
  }
  return 0;
}

struct ServeArgs {
  std::string listen = "127.0.0.1:7070";
  std::string store;
};

sync::SyncServer* g_server = nullptr;

int run_serve(const ServeArgs& a) {
  const auto [host, port] = split_address(a.listen);
  const fs::path store = a.store.empty() ? sync::default_store_dir() : fs::path(a.store);
  // SIGINT/SIGTERM are handled synchronously by a waiter thread; block them
  // before any server thread exists so that every thread inherits the mask.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  sync::SyncServer server(store, host, port);
  server.start();
  std::cerr << "serving " << store.string() << " on " << host << ":" << server.port() << "\n";
  g_server = &server;
  std::thread waiter([&set] {
    int sig = 0;
    sigwait(&set, &sig);
    g_server->stop();
  });
  server.wait();
  waiter.join();
  server.stop();
  return 0;
}

struct PushArgs {
  std::string addr, name, old_path, new_path;
  std::uint32_t alphabet = kByteAlphabet;
};

int run_push(const PushArgs& a) {
  const auto [host, port] = split_address(a.addr);
  const std::string name = a.name.empty() ? fs::path(a.new_path).filename().string() : a.name;
  const sync::PushResult r = sync::push(host, port, name, read_file(a.old_path), read_file(a.new_path), a.alphabet);
  if (!r.ok) {
    std::cerr << "indel: server refused update (" << sync::sync_error_name(*r.error) << "): " << r.message << "\n";
    switch (*r.error) {
      case sync::SyncError::kDigest: return kExitDigest;
      case sync::SyncError::kIo: return kExitIo;
      default: return kExitFailure;
    }
  }
  std::cout << json{{"name", name}, {"delta_bytes", r.delta_bytes}, {"m", r.ack.m}, {"digest", r.ack.digest}}.dump()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"InDel file-update codec and analysis tools"};
  app.require_subcommand(1);

  EncodeArgs enc;
  auto* c_enc = app.add_subcommand("encode", "Encode the update from OLD to NEW");
  c_enc->add_option("--old", enc.old_path, "Old file X")->required();
  c_enc->add_option("--new", enc.new_path, "New file Y")->required();
  c_enc->add_option("--out", enc.out_path, "Update container to write")->required();
  c_enc->add_flag("--oracle-dp", enc.oracle_dp, "Use the quadratic reference DP");
  c_enc->add_option("--alphabet", enc.alphabet, "Alphabet size (<=256: bytes, else 16-bit LE symbols)")
      ->check(CLI::Range(2u, kMaxAlphabet));

  DecodeArgs dec;
  auto* c_dec = app.add_subcommand("decode", "Apply an update container to OLD");
  c_dec->add_option("--old", dec.old_path, "Old file X")->required();
  c_dec->add_option("--delta", dec.delta_path, "Update container")->required();
  c_dec->add_option("--out", dec.out_path, "Reconstructed new file")->required();
  c_dec->add_option("--alphabet", dec.alphabet, "Expected alphabet size")->check(CLI::Range(2u, kMaxAlphabet));

  GenArgs gen;
  auto* c_gen = app.add_subcommand("gen", "Generate corpus pairs");
  c_gen->add_option("--model", gen.model, "rpes or apes")->check(CLI::IsMember({"rpes", "apes"}));
  c_gen->add_option("--policy", gen.policy, "APES policy")->check(CLI::IsMember({"uniform", "worst-case"}));
  c_gen->add_option("--n", gen.n, "Source length");
  c_gen->add_option("--alphabet", gen.alphabet, "Alphabet size")->check(CLI::Range(2u, kMaxAlphabet));
  c_gen->add_option("--eps", gen.eps, "Insertion rate");
  c_gen->add_option("--del", gen.del, "Deletion rate");
  c_gen->add_option("--seed", gen.seed, "First seed");
  c_gen->add_option("--count", gen.count, "Number of pairs (seeds seed, seed+1, ...)");
  c_gen->add_option("--out", gen.out_dir, "Output directory")->required();

  BoundsArgs bnd;
  auto* c_bnd = app.add_subcommand("bounds", "Evaluate the rate bounds");
  c_bnd->add_option("--eps", bnd.eps, "Insertion rate");
  c_bnd->add_option("--del", bnd.del, "Deletion rate");
  c_bnd->add_option("--alphabet", bnd.alphabet, "Alphabet size")->check(CLI::Range(2u, kMaxAlphabet));
  c_bnd->add_option("--tau", bnd.tau, "Exponent parameter of the second-order terms");

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Measure rates over a corpus directory");
  c_bench->add_option("--corpus", bench.corpus, "Corpus directory")->required();
  c_bench->add_option("--csv", bench.csv, "CSV output")->required();
  c_bench->add_option("--tau", bench.tau, "Exponent parameter");

  LabArgs lab;
  auto* c_lab = app.add_subcommand("lab", "Run an analysis experiment (CSV: params,estimate,stderr,bound)");
  c_lab->add_option("--experiment", lab.experiment, "Experiment")
      ->required()
      ->check(CLI::IsMember({"typicalize", "align", "enumerate", "natures-secret"}));
  c_lab->add_option("--n", lab.n, "Source length");
  c_lab->add_option("--alphabet", lab.alphabet, "Alphabet size")->check(CLI::Range(2u, kMaxAlphabet));
  c_lab->add_option("--eps", lab.eps, "Insertion rate");
  c_lab->add_option("--del", lab.del, "Deletion rate");
  c_lab->add_option("--rates", lab.rates, "Comma-separated rates for the align sweep");
  c_lab->add_option("--trials", lab.trials, "Monte Carlo trials");
  c_lab->add_option("--seed", lab.seed, "Seed");
  c_lab->add_option("--x", lab.x, "Source as a digit string (align, enumerate)");
  c_lab->add_option("--y", lab.y, "Target as a digit string (align)");
  c_lab->add_option("--max-ins", lab.max_ins, "Insertion budget (enumerate)");
  c_lab->add_option("--max-del", lab.max_del, "Deletion budget (enumerate)");
  c_lab->add_flag("--exact", lab.exact, "Exactly max-del deletions then exactly max-ins insertions");

  ServeArgs serve;
  auto* c_serve = app.add_subcommand("serve", "Serve a store directory over the sync protocol");
  c_serve->add_option("--listen", serve.listen, "IPv4 address:port");
  c_serve->add_option("--store", serve.store, "Store directory (default $INDEL_SYNC_STORE)");

  PushArgs push;
  auto* c_push = app.add_subcommand("push", "Push the update OLD -> NEW to a server");
  c_push->add_option("--addr", push.addr, "Server host:port")->required();
  c_push->add_option("--name", push.name, "Name in the store (default: file name of NEW)");
  c_push->add_option("--old", push.old_path, "Old file X")->required();
  c_push->add_option("--new", push.new_path, "New file Y")->required();
  c_push->add_option("--alphabet", push.alphabet, "Alphabet size")->check(CLI::Range(2u, kMaxAlphabet));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; every usage error is a generic failure.
    const int status = app.exit(e);
    return status == 0 ? 0 : kExitFailure;
  }

  try {
    if (*c_enc) return run_encode(enc);
    if (*c_dec) return run_decode(dec);
    if (*c_gen) return run_gen(gen);
    if (*c_bnd) return run_bounds(bnd);
    if (*c_bench) return run_bench(bench);
    if (*c_lab) return run_lab(lab);
    if (*c_serve) return run_serve(serve);
    if (*c_push) return run_push(push);
  } catch (const Error& e) {
    std::cerr << "indel: " << e.what() << "\n";
    return exit_status(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "indel: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "indel: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
