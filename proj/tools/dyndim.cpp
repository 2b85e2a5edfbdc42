#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "dyndim/almostemb.hpp"
#include "dyndim/boxgeom.hpp"
#include "dyndim/dimension.hpp"
#include "dyndim/dynsys.hpp"
#include "dyndim/ergopt.hpp"
#include "dyndim/error.hpp"
#include "dyndim/okcover.hpp"
#include "dyndim/serialize.hpp"

using namespace dyndim;

namespace {

// DYNDIM_THREADS sizes the worker pool for seed batches; the certificates
// themselves are computed deterministically regardless of the value.
int env_threads() {
  const char* e = std::getenv("DYNDIM_THREADS");
  if (e == nullptr || *e == '\0') return 1;
  std::string s(e);
  for (char c : s)
    if (c < '0' || c > '9') throw ValidationError("DYNDIM_THREADS must be a positive integer");
  long v = std::strtol(s.c_str(), nullptr, 10);
  if (v < 1 || v > 1024) throw ValidationError("DYNDIM_THREADS must be between 1 and 1024");
  return (int)v;
}

// exact decimal rendering, rounding half away from zero
std::string decimal_str(const Rat& r, int precision) {
  Int num = rat_num(r), den = rat_den(r);
  bool neg = num < 0;
  if (neg) num = -num;
  Int scale = 1;
  for (int i = 0; i < precision; ++i) scale *= 10;
  Int digits = (2 * num * scale + den) / (2 * den);
  Int whole = digits / scale, frac = digits % scale;
  std::string out = (neg && digits != 0 ? "-" : "") + whole.str();
  if (precision > 0) {
    std::string f = frac.str();
    out += "." + std::string(precision - f.size(), '0') + f;
  }
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') out += '"';
  }
  return out + "\"";
}

// one-row-per-run series file for parameter sweeps
void append_csv_row(const std::string& path, const Certificate& c) {
  bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw ValidationError("cannot write file: " + path);
  if (fresh) out << "quantity,value,pass\n";
  out << csv_escape(c.quantity) << "," << decimal_str(c.value, 6) << ","
      << (c.pass ? "true" : "false") << "\n";
}

void emit_cert(const std::string& cmd, const Certificate& c, const std::string& out,
               const std::string& csv) {
  if (!out.empty()) save_json_file(out, c.to_json());
  if (!csv.empty()) append_csv_row(csv, c);
  std::cout << cmd << ": " << (c.pass ? "pass" : "fail") << " " << cert_kind_name(c.kind) << " "
            << c.quantity << " value=" << rat_str(c.value) << "\n";
}

// loaded artifacts carry their own space instance; the calculus compares
// spaces by identity, so rebind structurally equal ones onto the system's
void bind_space(std::shared_ptr<const GroundSpace>& slot,
                const std::shared_ptr<const GroundSpace>& target, const char* what) {
  if (!slot || space_json(*slot) != space_json(*target))
    throw ValidationError(std::string(what) + " is sampled on a different space than the system");
  slot = target;
}

Box parse_box(const std::string& s, int d) {
  if (s.empty()) return Box(d, Interval{Rat(0), Rat(1)});
  Box box;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    std::string part = s.substr(pos, comma == std::string::npos ? comma : comma - pos);
    std::size_t colon = part.find(':');
    if (colon == std::string::npos)
      throw ValidationError("box intervals look like lo:hi, got '" + part + "'");
    Interval iv{parse_rat(part.substr(0, colon)), parse_rat(part.substr(colon + 1))};
    if (iv.lo > iv.hi) throw ValidationError("box interval has lo > hi: '" + part + "'");
    box.push_back(iv);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if ((int)box.size() != d)
    throw ValidationError("box has " + std::to_string(box.size()) + " intervals for dimension " +
                          std::to_string(d));
  return box;
}

FolnerSchedule parse_folner(const std::string& spec, const FinitePermSystem& sys) {
  if (spec == "finite") return folner_finite(sys);
  auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw ValidationError("averaging-set spec looks like z:1..24, zk:4, finite, or default:12");
  std::string tag = spec.substr(0, colon), range = spec.substr(colon + 1);
  auto dots = range.find("..");
  if (dots != std::string::npos) range = range.substr(dots + 2);
  int n = 0;
  try {
    n = std::stoi(range);
  } catch (...) {
    throw ValidationError("bad averaging-set length in '" + spec + "'");
  }
  if (n < 1) throw ValidationError("averaging-set length must be positive");
  if (tag == "z") return folner_z(n);
  if (tag == "zk") return folner_zk(sys.group.rank, n);
  if (tag == "default") return default_folner(sys, n);
  throw ValidationError("unknown averaging-set family '" + tag + "'");
}

struct ReportRow {
  std::string file, quantity, kind, value, lower, upper, gap, pass, runtime, warning;
};

void run_report(const std::vector<std::string>& files, const std::string& out, int precision) {
  std::vector<std::string> sorted = files;
  std::sort(sorted.begin(), sorted.end());
  std::vector<ReportRow> rows;
  int passed = 0, failed = 0, unreadable = 0;
  struct Range {
    bool has_lo = false, has_hi = false;
    Rat lo, hi;
  };
  std::map<std::string, Range> by_quantity;
  for (const std::string& f : sorted) {
    ReportRow row;
    row.file = f;
    try {
      Json doc = load_json_file(f);
      Certificate c = Certificate::from_json(doc);
      row.quantity = c.quantity;
      row.kind = cert_kind_name(c.kind);
      row.value = decimal_str(c.value, precision);
      row.pass = c.pass ? "true" : "false";
      if (doc.contains("runtime_ms")) row.runtime = doc.at("runtime_ms").dump();
      Range& r = by_quantity[c.quantity];
      if (c.kind == CertKind::LowerBound || c.kind == CertKind::Equality) {
        row.lower = row.value;
        if (!r.has_lo || c.value > r.lo) r.lo = c.value;
        r.has_lo = true;
      }
      if (c.kind == CertKind::UpperBound || c.kind == CertKind::Equality) {
        row.upper = row.value;
        if (!r.has_hi || c.value < r.hi) r.hi = c.value;
        r.has_hi = true;
      }
      if (c.kind == CertKind::Equality) row.gap = decimal_str(Rat(0), precision);
      (c.pass ? passed : failed) += 1;
    } catch (const std::exception& e) {  // bad JSON, missing fields, IO failure
      row.warning = e.what();
      unreadable += 1;
    }
    rows.push_back(std::move(row));
  }

  std::ostringstream csv;
  csv << "file,quantity,kind,value,lower,upper,gap,pass,runtime_ms,warning\n";
  for (const ReportRow& r : rows)
    csv << csv_escape(r.file) << "," << csv_escape(r.quantity) << "," << r.kind << "," << r.value
        << "," << r.lower << "," << r.upper << "," << r.gap << "," << r.pass << "," << r.runtime
        << "," << csv_escape(r.warning) << "\n";
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream o(out);
    if (!o) throw ValidationError("cannot write file: " + out);
    o << csv.str();
  }

  std::cerr << "report: " << rows.size() << " rows, " << passed << " pass, " << failed
            << " fail, " << unreadable << " unreadable\n";
  for (const auto& [q, r] : by_quantity) {
    std::cerr << "  " << q << ": lower=" << (r.has_lo ? rat_str(r.lo) : "-")
              << " upper=" << (r.has_hi ? rat_str(r.hi) : "-");
    if (r.has_lo && r.has_hi) std::cerr << " gap=" << rat_str(r.hi - r.lo);
    std::cerr << "\n";
  }
  if (!rows.empty() && unreadable == (int)rows.size())
    throw ValidationError("all " + std::to_string(rows.size()) + " certificate files failed to parse");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact rational dimension calculus for finite dynamical models"};
  app.require_subcommand(1);
  std::string current_out;  // budget errors flush their partial artifact here

  // brickwall ---------------------------------------------------------------
  struct {
    int d = 1;
    std::string eps, box, out, csv;
    long long atom_cap = 64'000'000;
  } bw;
  auto* bw_cmd = app.add_subcommand("brickwall", "build and certify a brickwall cover of a box");
  bw_cmd->add_option("--dim", bw.d, "box dimension")->required();
  bw_cmd->add_option("--eps", bw.eps, "mesh bound as p/q")->required();
  bw_cmd->add_option("--box", bw.box, "bounding box lo:hi,lo:hi (default unit box)");
  bw_cmd->add_option("--budget-atoms", bw.atom_cap, "arrangement atom cap");
  bw_cmd->add_option("--out", bw.out, "certificate JSON path");
  bw_cmd->add_option("--csv", bw.csv, "append a quantity,value,pass row");
  bw_cmd->callback([&] {
    current_out = bw.out;
    BrickwallCover cover = build_brickwall(bw.d, parse_rat(bw.eps), parse_box(bw.box, bw.d));
    emit_cert("brickwall", verify_brickwall(cover, bw.atom_cap), bw.out, bw.csv);
  });

  // ok-cover ----------------------------------------------------------------
  struct {
    std::string cover, out, csv, families_out;
    int k = 2;
  } okc;
  auto* ok_cmd = app.add_subcommand("ok-cover", "build and certify disjoint refining families");
  ok_cmd->add_option("--cover", okc.cover, "source cover JSON")->required();
  ok_cmd->add_option("--k", okc.k, "number of families")->required();
  ok_cmd->add_option("--families-out", okc.families_out, "write the built families as JSON");
  ok_cmd->add_option("--out", okc.out, "certificate JSON path");
  ok_cmd->add_option("--csv", okc.csv, "append a quantity,value,pass row");
  ok_cmd->callback([&] {
    current_out = okc.out;
    Cover u = cover_from_json(load_json_file(okc.cover));
    OkFamilies ok = build_ok(u, okc.k);
    if (!okc.families_out.empty()) {
      Json j = Json::object();
      j["k"] = ok.k;
      j["denom"] = ok.denom.str();
      j["family_mesh"] = rat_vec_json(ok.family_mesh);
      Json fams = Json::array();
      for (const Cover& fam : ok.families) fams.push_back(cover_json(fam));
      j["families"] = fams;
      save_json_file(okc.families_out, j);
    }
    emit_cert("ok-cover", verify_ok(ok), okc.out, okc.csv);
  });

  // ergavg ------------------------------------------------------------------
  struct {
    std::string sys, f, folner = "default:12", out;
    int subset_cap = 12;
  } ea;
  auto* ea_cmd = app.add_subcommand("ergavg", "measure optimum vs averaging-set formulas");
  ea_cmd->add_option("--sys", ea.sys, "system JSON")->required();
  ea_cmd->add_option("--f", ea.f, "observable JSON (one rational per point)")->required();
  ea_cmd->add_option("--folner", ea.folner, "z:1..N, zk:N, finite, or default:N");
  ea_cmd->add_option("--budget-subsets", ea.subset_cap, "exhaustive subset cap");
  ea_cmd->add_option("--out", ea.out, "report JSON path");
  ea_cmd->callback([&] {
    current_out = ea.out;
    FinitePermSystem sys = system_from_json(load_json_file(ea.sys));
    std::vector<Rat> f = scalar_observable_from_json(load_json_file(ea.f), sys.num_points());
    ErgAvgReport rep = folner_formulas(sys, f, parse_folner(ea.folner, sys), ea.subset_cap);
    if (!ea.out.empty()) save_json_file(ea.out, rep.to_json());
    std::cout << "ergavg: measure=" << rat_str(rep.measure_value)
              << " inf=" << rat_str(rep.folner_inf)
              << (rep.inf_capped ? " (capped)" : "")
              << " equal=" << (rep.exact_equality ? "yes" : "no") << "\n";
  });

  // dim-cert ----------------------------------------------------------------
  struct {
    std::string sys, cover, refine, lemma92, out, csv;
    bool lower_dim1 = false;
    int d = -1;
    long long node_cap = 4'000'000;
  } dc;
  auto* dc_cmd = app.add_subcommand("dim-cert", "certified bounds on dim(u,T)");
  dc_cmd->add_option("--sys", dc.sys, "system JSON")->required();
  dc_cmd->add_option("--cover", dc.cover, "base cover JSON")->required();
  dc_cmd->add_option("--refine", dc.refine, "upper bound via this refinement cover");
  dc_cmd->add_flag("--lower-dim1", dc.lower_dim1, "connectivity lower bound on a 1-complex");
  dc_cmd->add_option("--lemma92", dc.lemma92, "combinatorial upper bound via a K-set family");
  dc_cmd->add_option("--d", dc.d, "bound to certify with --lemma92 (default: file or row count)");
  dc_cmd->add_option("--budget-nodes", dc.node_cap, "search node cap for --lower-dim1");
  dc_cmd->add_option("--out", dc.out, "certificate JSON path");
  dc_cmd->add_option("--csv", dc.csv, "append a quantity,value,pass row");
  dc_cmd->callback([&] {
    current_out = dc.out;
    int modes = (!dc.refine.empty()) + (dc.lower_dim1 ? 1 : 0) + (!dc.lemma92.empty());
    if (modes != 1)
      throw ValidationError("choose exactly one of --refine, --lower-dim1, --lemma92");
    FinitePermSystem sys = system_from_json(load_json_file(dc.sys));
    Cover u = cover_from_json(load_json_file(dc.cover));
    bind_space(u.space, sys.space, "the cover");
    Certificate c;
    if (!dc.refine.empty()) {
      Cover v = cover_from_json(load_json_file(dc.refine));
      bind_space(v.space, sys.space, "the refinement");
      c = dim_U_T_upper(sys, u, v);
    } else if (dc.lower_dim1) {
      SearchBudget budget{dc.node_cap, 0};
      c = dim_U_T_lower_dim1(sys, u, &budget);
    } else {
      Json doc = load_json_file(dc.lemma92);
      KSetFamily kf = kset_family_from_json(doc, *sys.space);
      int d = dc.d >= 0 ? dc.d
              : doc.contains("d") ? doc.at("d").get<int>()
                                  : (int)kf.rows.size();
      c = lemma92_check(sys, u, kf, d);
    }
    emit_cert("dim-cert", c, dc.out, dc.csv);
  });

  // thm71 -------------------------------------------------------------------
  struct {
    std::string sys, out, csv;
  } t71;
  auto* t71_cmd = app.add_subcommand("thm71", "free finite action: dim = 1/|G| on a 1-complex");
  t71_cmd->add_option("--sys", t71.sys, "system JSON")->required();
  t71_cmd->add_option("--out", t71.out, "certificate JSON path");
  t71_cmd->add_option("--csv", t71.csv, "append a quantity,value,pass row");
  t71_cmd->callback([&] {
    current_out = t71.out;
    emit_cert("thm71", thm71_check(system_from_json(load_json_file(t71.sys))), t71.out, t71.csv);
  });

  // cubeshift ---------------------------------------------------------------
  struct {
    int d = 1, n = 2;
    std::string eps, out, csv;
    bool lower = false;
    long long atom_cap = 64'000'000, cell_cap = 2'000'000;
  } cs;
  auto* cs_cmd = app.add_subcommand("cubeshift", "cyclic cubical shift dimension bounds");
  cs_cmd->add_option("--d", cs.d, "cube dimension");
  cs_cmd->add_option("--n", cs.n, "cyclic truncation length")->required();
  cs_cmd->add_option("--eps", cs.eps, "brickwall mesh as p/q")->required();
  cs_cmd->add_flag("--lower", cs.lower, "fixed-point lower bound instead of the upper bound");
  cs_cmd->add_option("--budget-atoms", cs.atom_cap, "arrangement atom cap");
  cs_cmd->add_option("--budget-cells", cs.cell_cap, "materialized cell cap");
  cs_cmd->add_option("--out", cs.out, "certificate JSON path");
  cs_cmd->add_option("--csv", cs.csv, "append a quantity,value,pass row");
  cs_cmd->callback([&] {
    current_out = cs.out;
    Rat eps = parse_rat(cs.eps);
    Certificate c = cs.lower ? cubical_shift_fixed_lower(cs.n, eps, cs.cell_cap)
                             : cubical_shift_upper(cs.d, cs.n, eps, cs.atom_cap);
    emit_cert("cubeshift", c, cs.out, cs.csv);
  });

  // sbp ---------------------------------------------------------------------
  struct {
    std::string sys, eps, out, csv;
    long long node_cap = 4'000'000;
  } sb;
  auto* sb_cmd = app.add_subcommand("sbp", "search for a small-boundary cover below eps");
  sb_cmd->add_option("--sys", sb.sys, "system JSON")->required();
  sb_cmd->add_option("--eps", sb.eps, "boundary capacity threshold as p/q")->required();
  sb_cmd->add_option("--budget-nodes", sb.node_cap, "search node cap");
  sb_cmd->add_option("--out", sb.out, "certificate JSON path");
  sb_cmd->add_option("--csv", sb.csv, "append a quantity,value,pass row");
  sb_cmd->callback([&] {
    current_out = sb.out;
    FinitePermSystem sys = system_from_json(load_json_file(sb.sys));
    SearchBudget budget{sb.node_cap, 0};
    emit_cert("sbp", sbp_witness_search(sys, parse_rat(sb.eps), &budget), sb.out, sb.csv);
  });

  // urp-check ---------------------------------------------------------------
  struct {
    std::string sys, towers, out, csv;
  } ur;
  auto* ur_cmd = app.add_subcommand("urp-check", "verify a Rokhlin tower certificate");
  ur_cmd->add_option("--sys", ur.sys, "system JSON")->required();
  ur_cmd->add_option("--towers", ur.towers, "tower data JSON")->required();
  ur_cmd->add_option("--out", ur.out, "certificate JSON path");
  ur_cmd->add_option("--csv", ur.csv, "append a quantity,value,pass row");
  ur_cmd->callback([&] {
    current_out = ur.out;
    FinitePermSystem sys = system_from_json(load_json_file(ur.sys));
    UrpTowerCertificate towers = towers_from_json(load_json_file(ur.towers), *sys.space);
    emit_cert("urp-check", urp_check(sys, towers), ur.out, ur.csv);
  });

  // almost-embed ------------------------------------------------------------
  struct {
    std::string sys, obs, out, csv, density_out = "density.csv";
    int d = 1, mc_seeds = 0;
    unsigned mc_base_seed = 1;
    bool distal = false;
  } ae;
  auto* ae_cmd = app.add_subcommand("almost-embed", "run the almost-embedding pipeline");
  ae_cmd->add_option("--sys", ae.sys, "system JSON")->required();
  ae_cmd->add_option("--d", ae.d, "observable components")->required();
  ae_cmd->add_option("--obs", ae.obs, "supply the observable instead of building one");
  ae_cmd->add_flag("--distal", ae.distal, "also certify the embedding upgrade");
  ae_cmd->add_option("--mc-seeds", ae.mc_seeds, "randomized dither draws for density estimation");
  ae_cmd->add_option("--mc-base-seed", ae.mc_base_seed, "first seed of the dither batch");
  ae_cmd->add_option("--density-out", ae.density_out, "density CSV path (with --mc-seeds)");
  ae_cmd->add_option("--out", ae.out, "certificate JSON path");
  ae_cmd->add_option("--csv", ae.csv, "append a quantity,value,pass row");
  ae_cmd->callback([&] {
    current_out = ae.out;
    FinitePermSystem sys = system_from_json(load_json_file(ae.sys));
    Certificate c;
    if (ae.distal) {
      if (!ae.obs.empty())
        throw ValidationError("--distal builds its own observable; drop --obs");
      c = cor104_check(sys, ae.d);
    } else if (!ae.obs.empty()) {
      Observable f = observable_from_json(load_json_file(ae.obs));
      bind_space(f.space, sys.space, "the observable");
      c = thm103_pipeline(sys, ae.d, &f);
    } else {
      c = thm103_pipeline(sys, ae.d);
    }
    emit_cert("almost-embed", c, ae.out, ae.csv);
    if (ae.mc_seeds > 0) {
      DensityReport rep =
          estimate_separation_density(sys, ae.d, ae.mc_seeds, ae.mc_base_seed, env_threads());
      std::ofstream o(ae.density_out);
      if (!o) throw ValidationError("cannot write file: " + ae.density_out);
      o << "seed,separates,pipeline_pass\n";
      for (const DitherSample& s : rep.samples)
        o << s.seed << "," << (s.separates_all ? "true" : "false") << ","
          << (s.pipeline_pass ? "true" : "false") << "\n";
      std::cout << "density: separation=" << rat_str(rep.separation_density)
                << " pass=" << rat_str(rep.pass_density) << " resolution=1/" << rep.resolution
                << "\n";
    }
  });

  // report ------------------------------------------------------------------
  struct {
    std::vector<std::string> files;
    std::string out;
    int precision = 6;
  } rp;
  auto* rp_cmd = app.add_subcommand("report", "aggregate certificate files into a CSV table");
  rp_cmd->add_option("files", rp.files, "certificate JSON files");
  rp_cmd->add_option("--out", rp.out, "CSV path (default: stdout)");
  rp_cmd->add_option("--precision", rp.precision, "decimal places for rendered values")
      ->check(CLI::Range(0, 40));
  rp_cmd->callback([&] { run_report(rp.files, rp.out, rp.precision); });

  // sys validate --------------------------------------------------------------
  auto* sys_cmd = app.add_subcommand("sys", "system definition utilities");
  sys_cmd->require_subcommand(1);
  struct {
    std::string file;
  } sv;
  auto* sv_cmd = sys_cmd->add_subcommand("validate", "check a system or subshift definition");
  sv_cmd->add_option("file", sv.file, "system JSON")->required();
  sv_cmd->callback([&] {
    Json doc = load_json_file(sv.file);
    if (is_sft_json(doc)) {
      SftSystem sft = sft_from_json(doc);
      std::cout << "ok: sft alphabet=" << sft.alphabet << " window=" << sft.window
                << " allowed_blocks=" << sft.allowed_blocks().size() << "\n";
    } else {
      FinitePermSystem sys = system_from_json(doc);
      std::cout << "ok: " << sys.num_points() << " points, group "
                << group_kind_name(sys.group.kind) << ", " << sys.gens.size() << " generators\n";
    }
  });

  try {
    env_threads();  // reject bad settings before any work
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const BudgetError& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    if (!current_out.empty() && !e.partial.empty()) {
      std::ofstream o(current_out);
      o << e.partial << "\n";
      std::cerr << "partial artifact written to " << current_out << "\n";
    }
    return 3;
  } catch (const Error& e) {
    std::cerr << (e.exit_code == 4 ? "internal error: " : "error: ") << e.what() << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
