#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rasc/analysis.hpp"
#include "rasc/channel.hpp"
#include "rasc/code.hpp"
#include "rasc/decode_ems.hpp"
#include "rasc/errors.hpp"
#include "rasc/io.hpp"
#include "rasc/ring.hpp"
#include "rasc/simulate.hpp"
#include "rasc/version.hpp"

namespace {

using namespace rasc;

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

struct CommonCode {
  int L = 2;
  int Nbv = 2;
  int q = 2;
  int fb = 1;
  std::string constraint = "qam";

  InputConstraint input_constraint() const {
    if (constraint == "qam") return InputConstraint::kQam;
    if (constraint == "fullring") return InputConstraint::kFullRing;
    throw param_error("constraint must be 'qam' or 'fullring'");
  }
};

struct McdeFlags {
  int nsam = 5000;
  int lmax = 100;
  double pth = 1e-4;
  double eps_sigma = 1e-5;
  int rmax = 10;
  double sigma_lo = 0.0;
  double sigma_hi = 0.0;
  uint64_t seed = 1;
  std::string method = "fft";

  McdeConfig to_config() const {
    McdeConfig cfg;
    cfg.pool_size = nsam;
    cfg.max_iters = lmax;
    cfg.err_threshold = pth;
    cfg.sigma_tol = eps_sigma;
    cfg.num_runs = rmax;
    cfg.sigma_lo = sigma_lo;
    cfg.sigma_hi = sigma_hi;
    cfg.seed = seed;
    if (method == "fft") {
      cfg.method = CheckMethod::kFft;
    } else if (method == "full") {
      cfg.method = CheckMethod::kFull;
    } else {
      throw param_error("method must be 'fft' or 'full'");
    }
    return cfg;
  }
};

void add_mcde_flags(CLI::App* cmd, McdeFlags& m) {
  cmd->add_option("--nsam", m.nsam, "message samples per pool");
  cmd->add_option("--lmax", m.lmax, "max density-evolution iterations");
  cmd->add_option("--pth", m.pth, "convergence error threshold");
  cmd->add_option("--eps-sigma", m.eps_sigma, "bisection stop width");
  cmd->add_option("--rmax", m.rmax, "independent runs to average");
  cmd->add_option("--sigma-lo", m.sigma_lo, "bisection bracket low end");
  cmd->add_option("--sigma-hi", m.sigma_hi, "bisection bracket high end");
  cmd->add_option("--seed", m.seed, "master seed");
  cmd->add_option("--method", m.method, "check update: fft or full");
}

// Flat `key = value` config files mirroring the long option names. Values
// are appended to the argument list as --key=value, but only for keys absent
// from the command line, so explicit flags always win.
std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw io_error("cannot read config file " + path);
  auto given = [&](const std::string& key) {
    const std::string flag = "--" + key;
    for (const std::string& a : args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  std::string line;
  while (std::getline(in, line)) {
    const std::string stripped = CLI::detail::trim_copy(line);
    if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
    const size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw param_error("config line is not key = value: " + stripped);
    }
    const std::string key = CLI::detail::trim_copy(stripped.substr(0, eq));
    const std::string value = CLI::detail::trim_copy(stripped.substr(eq + 1));
    if (key.empty()) throw param_error("config line has empty key: " + stripped);
    if (given(key)) continue;
    args.push_back(value.empty() ? "--" + key : "--" + key + "=" + value);
  }
  return args;
}

void emit(const std::string& out, const std::string& csv, Manifest m, double t0) {
  m.version = kVersion;
  m.wall_ms = now_ms() - t0;
  m.outputs = {out};
  write_text_file(out, csv);
  write_manifest(m, out);
}

void cmd_constellation(int L, int Nbv, int fb, const std::string& out, double t0) {
  const RingParams p = make_ring_params(L, Nbv);
  Eigen::ArrayXcd pts;
  if (fb >= 0) {
    if (fb >= p.size()) throw param_error("filter index out of range");
    pts = constellation(p, FilterIndex{fb});
  } else {
    pts = constellation(p);
  }
  std::ostringstream csv;
  csv << "index,re,im\n";
  for (Eigen::Index i = 0; i < pts.size(); ++i) {
    csv << i << ',' << fmt_g9(pts[i].real()) << ',' << fmt_g9(pts[i].imag()) << '\n';
  }
  Manifest m;
  m.subcommand = "constellation";
  m.params = {{"L", std::to_string(L)},
              {"Nbv", std::to_string(Nbv)},
              {"fb", std::to_string(fb)}};
  emit(out, csv.str(), m, t0);
  std::cout << "points=" << pts.size() << " distinct=" << distinct_points(pts)
            << " -> " << out << "\n";
}

void cmd_filters(const CommonCode& cc, bool rank, bool full_search,
                 const McdeFlags& mf, const std::string& out, double t0) {
  const RingParams p = make_ring_params(cc.L, cc.Nbv);
  std::ostringstream csv;
  Manifest m;
  m.subcommand = "filters";
  m.params = {{"L", std::to_string(cc.L)},
              {"Nbv", std::to_string(cc.Nbv)},
              {"rank", rank ? "1" : "0"}};
  if (!rank) {
    csv << "fb,taps,class\n";
    for (int32_t g : bijective_filters(p)) {
      csv << g << ",\"" << filter_taps(FilterIndex{g}, p) << "\","
          << affine_class(FilterIndex{g}, p).value << '\n';
    }
    emit(out, csv.str(), m, t0);
    std::cout << "wrote " << out << "\n";
    return;
  }
  DeCode code{p, cc.q, FilterIndex{1}, cc.input_constraint()};
  m.params["q"] = std::to_string(cc.q);
  m.params["seed"] = std::to_string(mf.seed);
  m.seed = mf.seed;
  const std::vector<FilterRank> ranks = filter_search(code, mf.to_config(), !full_search);
  csv << "fb,taps,threshold_db,gap_db\n";
  for (const FilterRank& r : ranks) {
    csv << r.fb << ",\"" << r.taps << "\"," << fmt_g9(r.threshold_snr_db) << ','
        << fmt_g9(r.shannon_gap_db) << '\n';
  }
  emit(out, csv.str(), m, t0);
  std::cout << "ranked " << ranks.size() << " filters -> " << out << "\n";
}

void cmd_simulate(const CommonCode& cc, int Ns, const std::vector<double>& snrs,
                  const std::string& decoder, int Nm, double eta, int frames,
                  int target_errors, int iters, uint64_t seed,
                  uint64_t interleaver_seed, bool terminate,
                  const std::string& out, double t0) {
  const RingParams p = make_ring_params(cc.L, cc.Nbv);
  SimConfig sc;
  sc.code = make_code_config(p, cc.q, Ns, FilterIndex{cc.fb},
                             cc.input_constraint(), interleaver_seed, terminate);
  sc.snr_db_list = snrs;
  if (decoder == "fullbp") {
    sc.decoder = DecoderKind::kFullBp;
  } else if (decoder == "fftbp") {
    sc.decoder = DecoderKind::kFftBp;
  } else if (decoder == "ems") {
    sc.decoder = DecoderKind::kEms;
    sc.ems = resolve_ems_config(Nm, eta, p);
  } else {
    throw param_error("decoder must be fullbp, fftbp or ems");
  }
  sc.max_frames = frames;
  sc.target_errors = target_errors;
  sc.max_iters = iters;
  sc.seed = seed;
  const std::vector<SimPoint> pts = simulate(sc);
  std::ostringstream csv;
  csv << "snr_db,frames,symbol_errors,ser,fer,avg_iters\n";
  for (const SimPoint& s : pts) {
    csv << fmt_g9(s.snr_db) << ',' << s.frames << ',' << s.symbol_errors << ','
        << fmt_g9(s.ser) << ',' << fmt_g9(s.fer) << ',' << fmt_g9(s.avg_iters)
        << '\n';
  }
  Manifest m;
  m.subcommand = "simulate";
  m.seed = seed;
  m.params = {{"L", std::to_string(cc.L)},       {"Nbv", std::to_string(cc.Nbv)},
              {"q", std::to_string(cc.q)},       {"fb", std::to_string(cc.fb)},
              {"Ns", std::to_string(Ns)},        {"decoder", decoder},
              {"frames", std::to_string(frames)},
              {"target_errors", std::to_string(target_errors)},
              {"iters", std::to_string(iters)},
              {"terminate", terminate ? "1" : "0"},
              {"constraint", cc.constraint},
              {"interleaver_seed", std::to_string(interleaver_seed)}};
  if (decoder == "ems") {
    m.params["Nm"] = std::to_string(Nm);
    m.params["eta"] = fmt_g9(eta);
  }
  emit(out, csv.str(), m, t0);
  for (const SimPoint& s : pts) {
    std::cout << "snr=" << fmt_g9(s.snr_db) << " frames=" << s.frames
              << " ser=" << fmt_g9(s.ser) << "\n";
  }
}

void cmd_threshold(const CommonCode& cc, const McdeFlags& mf,
                   const std::string& out, double t0) {
  const RingParams p = make_ring_params(cc.L, cc.Nbv);
  if (!is_bijective(FilterIndex{cc.fb}, p)) {
    throw filter_error("filter " + std::to_string(cc.fb) + " is not bijective");
  }
  DeCode code{p, cc.q, FilterIndex{cc.fb}, cc.input_constraint()};
  const ThresholdResult r = threshold_search(code, mf.to_config());
  nlohmann::json j;
  j["L"] = cc.L;
  j["Nbv"] = cc.Nbv;
  j["q"] = cc.q;
  j["fb"] = cc.fb;
  j["constraint"] = cc.constraint;
  j["rate_bpcu"] = r.rate;
  j["shannon_limit_snr_db"] = r.shannon_limit_snr_db;
  j["sigma_runs"] = r.sigma_runs;
  j["sigma_mean"] = r.sigma_mean;
  j["threshold_snr_db"] = r.snr_db_mean;
  j["shannon_gap_db"] = r.shannon_gap_db;
  j["bracket"] = {r.bracket_lo, r.bracket_hi};
  nlohmann::json traces = nlohmann::json::array();
  for (const auto& tr : r.traces) {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& pr : tr) t.push_back({{"sigma", pr.first}, {"converged", pr.second}});
    traces.push_back(t);
  }
  j["traces"] = traces;
  Manifest m;
  m.subcommand = "threshold";
  m.seed = mf.seed;
  m.params = {{"L", std::to_string(cc.L)},   {"Nbv", std::to_string(cc.Nbv)},
              {"q", std::to_string(cc.q)},   {"fb", std::to_string(cc.fb)},
              {"nsam", std::to_string(mf.nsam)}, {"rmax", std::to_string(mf.rmax)},
              {"constraint", cc.constraint}};
  emit(out, j.dump(2) + "\n", m, t0);
  std::cout << "threshold_snr_db=" << fmt_g9(r.snr_db_mean)
            << " sigma=" << fmt_g9(r.sigma_mean) << " -> " << out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  const double t0 = now_ms();
  CLI::App app{"repeat-accumulate signal codes over coset rings"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rasc::kVersion);
  std::string config_file;
  const char* config_help = "flat key = value file of option defaults";
  app.add_option("--config", config_file, config_help);

  // constellation
  auto* cst = app.add_subcommand("constellation", "dump constellation points (CSV index,re,im)");
  int cst_L = 2, cst_Nbv = 2, cst_fb = -1;
  std::string cst_out = "constellation.csv";
  cst->add_option("--L", cst_L, "alphabet size per coefficient")->required();
  cst->add_option("--Nbv", cst_Nbv, "number of phase shifts")->required();
  cst->add_option("--fb", cst_fb, "premultiply by this filter index");
  cst->add_option("--out", cst_out, "output CSV path")->required();
  cst->add_option("--config", config_file, config_help);

  // filters
  auto* flt = app.add_subcommand("filters", "list or rank bijective filters");
  CommonCode flt_cc;
  McdeFlags flt_mf;
  bool flt_rank = false, flt_full = false;
  std::string flt_out = "filters.csv";
  flt->add_option("--L", flt_cc.L)->required();
  flt->add_option("--Nbv", flt_cc.Nbv)->required();
  flt->add_flag("--rank", flt_rank, "rank by density-evolution threshold");
  flt->add_flag("--full-search", flt_full, "threshold every filter (no affine-class collapsing)");
  flt->add_option("--q", flt_cc.q, "repetition factor (rank mode)");
  flt->add_option("--constraint", flt_cc.constraint, "qam or fullring");
  add_mcde_flags(flt, flt_mf);
  flt->add_option("--out", flt_out)->required();
  flt->add_option("--config", config_file, config_help);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo SER/FER sweep");
  CommonCode sim_cc;
  int sim_Ns = 1000, sim_Nm = 0, sim_frames = 1000, sim_errors = 100, sim_iters = 100;
  double sim_eta = std::numeric_limits<double>::quiet_NaN();
  uint64_t sim_seed = 0, sim_ilseed = 0;
  bool sim_term = true;
  std::vector<double> sim_snrs;
  std::string sim_dec = "fftbp", sim_out = "simulate.csv";
  sim->add_option("--L", sim_cc.L)->required();
  sim->add_option("--Nbv", sim_cc.Nbv)->required();
  sim->add_option("--q", sim_cc.q)->required();
  sim->add_option("--fb", sim_cc.fb)->required();
  sim->add_option("--Ns", sim_Ns, "information length")->required();
  sim->add_option("--snr-db-list", sim_snrs, "comma-separated SNR points (dB)")
      ->required()
      ->delimiter(',');
  sim->add_option("--decoder", sim_dec, "fullbp, fftbp or ems");
  sim->add_option("--Nm", sim_Nm, "EMS list size");
  sim->add_option("--eta", sim_eta, "EMS offset");
  sim->add_option("--frames", sim_frames, "frame budget per SNR point");
  sim->add_option("--target-errors", sim_errors, "stop after this many symbol errors (0 = never)");
  sim->add_option("--iters", sim_iters, "decoder iterations");
  sim->add_option("--seed", sim_seed, "master seed");
  sim->add_option("--interleaver-seed", sim_ilseed, "interleaver seed");
  sim->add_flag("--terminate,!--no-terminate", sim_term, "append termination symbol");
  sim->add_option("--constraint", sim_cc.constraint, "qam or fullring");
  sim->add_option("--out", sim_out)->required();
  sim->add_option("--config", config_file, config_help);

  // threshold
  auto* thr = app.add_subcommand("threshold", "density-evolution noise threshold");
  CommonCode thr_cc;
  McdeFlags thr_mf;
  std::string thr_out = "threshold.json";
  thr->add_option("--L", thr_cc.L)->required();
  thr->add_option("--Nbv", thr_cc.Nbv)->required();
  thr->add_option("--q", thr_cc.q)->required();
  thr->add_option("--fb", thr_cc.fb)->required();
  thr->add_option("--constraint", thr_cc.constraint, "qam or fullring");
  add_mcde_flags(thr, thr_mf);
  thr->add_option("--out", thr_out)->required();
  thr->add_option("--config", config_file, config_help);

  try {
    std::vector<std::string> args = expand_config_args(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
    if (cst->parsed()) cmd_constellation(cst_L, cst_Nbv, cst_fb, cst_out, t0);
    if (flt->parsed()) cmd_filters(flt_cc, flt_rank, flt_full, flt_mf, flt_out, t0);
    if (sim->parsed()) {
      cmd_simulate(sim_cc, sim_Ns, sim_snrs, sim_dec, sim_Nm, sim_eta, sim_frames,
                   sim_errors, sim_iters, sim_seed, sim_ilseed, sim_term, sim_out, t0);
    }
    if (thr->parsed()) cmd_threshold(thr_cc, thr_mf, thr_out, t0);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const rasc::param_error& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const rasc::filter_error& e) {
    std::cerr << "filter error: " << e.what() << "\n";
    return 3;
  } catch (const rasc::io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
