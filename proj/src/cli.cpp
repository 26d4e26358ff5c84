#include "fractlab/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fractlab/energy.hpp"
#include "fractlab/errors.hpp"
#include "fractlab/expansion.hpp"
#include "fractlab/fit.hpp"
#include "fractlab/fup.hpp"
#include "fractlab/gowers.hpp"
#include "fractlab/grid.hpp"
#include "fractlab/io.hpp"
#include "fractlab/kadic.hpp"

namespace fractlab {

namespace {

std::vector<int> parse_digits(const std::string& text) {
  std::vector<int> digits;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ','))
    if (!part.empty()) digits.push_back(std::stoi(part));
  return digits;
}

void write_sidecar(const std::string& out_path, nlohmann::ordered_json fields,
                   const std::vector<std::string>& args) {
  nlohmann::ordered_json echo = nlohmann::ordered_json::array();
  for (const auto& a : args) echo.push_back(a);
  fields["config"] = echo;
  fields["version"] = kToolVersion;
  fields["format_version"] = 1;
  atomic_write(out_path + ".json", fields.dump(1) + "\n");
}

double resolve_delta(const std::string& text, const GridMeasure& mu) {
  if (text == "auto") {
    if (!mu.provenance())
      throw ValidationError("--delta auto needs a Cantor-generated measure with provenance");
    return mu.provenance()->delta();
  }
  return std::stod(text);
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"regular-measure energy, K-adic edge, uncertainty and expansion experiments"};
  app.name("fractlab");
  int threads = 1;
  app.add_option("--threads", threads, "worker-thread cap (default 1, deterministic)");

  std::string gen_type, gen_digits = "0,2", gen_step = "2^-10", gen_a, gen_b, gen_out;
  int gen_base = 3, gen_levels = 1, gen_dim = 1, gen_delta_int = 1;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen", "generate a measure file");
  gen->add_option("--type", gen_type, "cantor|random-cantor|disk|product")->required();
  gen->add_option("--base", gen_base, "Cantor base K");
  gen->add_option("--digits", gen_digits, "comma-separated digit set");
  gen->add_option("--levels", gen_levels, "construction depth");
  auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "per-node random digit choice seed");
  gen->add_option("--dim", gen_dim, "disk ambient dimension");
  gen->add_option("--delta-int", gen_delta_int, "disk integer dimension");
  gen->add_option("--step", gen_step, "disk grid step (rational or b^-k)");
  gen->add_option("--a", gen_a, "left factor measure file");
  gen->add_option("--b", gen_b, "right factor measure file");
  gen->add_option("--out", gen_out, "output measure path")->required();

  std::string en_measure, en_delta, en_scales, en_method = "fast", en_budget = "2^27", en_out;
  auto* energy = app.add_subcommand("energy", "additive energy curve");
  energy->add_option("--measure", en_measure)->required();
  energy->add_option("--delta", en_delta, "real or 'auto'")->required();
  energy->add_option("--scales", en_scales, "ladder, e.g. 3^-4..3^-10")->required();
  energy->add_option("--method", en_method, "fast|brute");
  energy->add_option("--budget", en_budget, "transform size budget in points");
  energy->add_option("--out", en_out)->required();

  std::string gw_mode = "check", gw_measure, gw_scales, gw_out;
  int gw_trials = 200;
  std::uint64_t gw_seed = 1;
  auto* gowers = app.add_subcommand("gowers", "U^2 toolkit checks and energy ratios");
  gowers->add_option("--mode", gw_mode, "check|ratio");
  gowers->add_option("--trials", gw_trials);
  gowers->add_option("--seed", gw_seed);
  gowers->add_option("--measure", gw_measure);
  gowers->add_option("--scales", gw_scales);
  gowers->add_option("--out", gw_out)->required();

  std::string ed_measure, ed_out;
  int ed_K = 0, ed_levels = 0;
  double ed_epsilon = 0.0, ed_r0 = 0.0;
  auto* edges = app.add_subcommand("edges", "K-adic left-edge and exceptional-set reports");
  edges->add_option("--measure", ed_measure)->required();
  edges->add_option("--K", ed_K)->required();
  edges->add_option("--levels", ed_levels, "report levels n = 0..N (tree depth 2N)")->required();
  // reference parameters for slight-gain style studies; recorded in the
  // sidecar, never used to size the computation
  auto* ed_eps_opt = edges->add_option("--epsilon", ed_epsilon, "target gain (recorded)");
  auto* ed_r0_opt = edges->add_option("--r0", ed_r0, "target scale (recorded)");
  edges->add_option("--out", ed_out)->required();

  std::string fu_digits = "0,2", fu_digits_x, fu_digits_y, fu_h, fu_out;
  int fu_base = 3, fu_oversample = 4;
  bool fu_full_x = false, fu_full_y = false;
  auto* fup = app.add_subcommand("fup", "fractal uncertainty operator norms");
  fup->add_option("--base", fu_base);
  fup->add_option("--digits", fu_digits);
  fup->add_option("--digits-x", fu_digits_x);
  fup->add_option("--digits-y", fu_digits_y);
  fup->add_flag("--full-x", fu_full_x, "X mask is the full interval");
  fup->add_flag("--full-y", fu_full_y, "Y mask is the full interval");
  fup->add_option("--hs", fu_h, "ladder of h values (exact powers)")->required();
  fup->add_option("--oversample", fu_oversample);
  fup->add_option("--out", fu_out)->required();

  std::string ex_map, ex_digits = "0,2", ex_radii, ex_out;
  int ex_base = 3;
  bool ex_segment = false;
  double ex_pre_scale = 1.0, ex_pre_shift = 0.0;
  auto* expand = app.add_subcommand("expand", "sumset / nonlinear image volumes");
  expand->add_option("--map", ex_map, "sum|difference|product|shifted-product|quadratic")
      ->required();
  expand->add_option("--base", ex_base);
  expand->add_option("--digits", ex_digits);
  expand->add_flag("--segment", ex_segment, "use the unit segment (delta = 1) control family");
  expand->add_option("--pre-scale", ex_pre_scale);
  expand->add_option("--pre-shift", ex_pre_shift);
  expand->add_option("--radii", ex_radii, "ladder of radii (exact powers)")->required();
  expand->add_option("--out", ex_out)->required();

  std::string fit_in;
  auto* fit = app.add_subcommand("fit", "power-law fit of a CSV (first two columns)");
  fit->add_option("--in", fit_in)->required();

  std::string rp_inputs, rp_out;
  auto* report = app.add_subcommand("report", "merge sidecar documents");
  report->add_option("--inputs", rp_inputs, "comma-separated sidecar JSON paths")->required();
  report->add_option("--out", rp_out)->required();

  app.require_subcommand(1);

  std::vector<const char*> argv;
  argv.push_back("fractlab");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << app.help();
    return 2;
  }

  try {
    Timer timer;

    if (gen->parsed()) {
      GridMeasure mu = [&]() {
        if (gen_type == "cantor" || gen_type == "random-cantor") {
          CantorSpec spec;
          spec.base = gen_base;
          spec.digits = parse_digits(gen_digits);
          spec.levels = gen_levels;
          if (gen_type == "random-cantor" || !gen_seed_opt->empty()) spec.seed = gen_seed;
          return cantor_measure(spec);
        }
        if (gen_type == "disk")
          return disk_measure(gen_dim, gen_delta_int, Rational::parse(gen_step));
        if (gen_type == "product") {
          GridMeasure a = load_measure(gen_a);
          GridMeasure b = load_measure(gen_b);
          return product_measure(a, b);
        }
        throw ValidationError("gen: unknown --type " + gen_type);
      }();
      save_measure(mu, gen_out);
      out << "gen: " << gen_type << " dim=" << mu.dim() << " cells=" << mu.support_size()
          << " total=" << format_double(mu.total_mass()) << " -> " << gen_out << " ("
          << format_double(timer.seconds()) << "s)\n";
      return 0;
    }

    if (energy->parsed()) {
      GridMeasure mu = load_measure(en_measure);
      double delta = resolve_delta(en_delta, mu);
      auto scales = parse_scale_ladder(en_scales);
      if (en_method != "brute" && en_method != "fast")
        throw ValidationError("energy: --method must be fast or brute");
      EnergyMethod method = en_method == "brute" ? EnergyMethod::brute : EnergyMethod::fast;
      Rational budget_r = Rational::parse(en_budget);
      if (budget_r.den() != 1 || budget_r.num() < 16)
        throw ValidationError("energy: --budget must be an integer >= 16");
      std::int64_t budget = budget_r.num();
      EnergyCurve curve = energy_curve(mu, scales, delta, method, budget);
      std::ostringstream csv;
      csv << "r,energy,method\n";
      for (const auto& e : curve.entries)
        csv << format_double(e.r.value()) << "," << format_double(e.energy) << "," << en_method
            << "\n";
      atomic_write(en_out, csv.str());
      nlohmann::ordered_json side;
      side["delta"] = format_double(curve.delta);
      side["fitted_slope"] = format_double(curve.fitted_slope);
      side["beta"] = format_double(curve.beta);
      side["residual"] = format_double(curve.residual);
      write_sidecar(en_out, side, args);
      out << "energy: points=" << curve.entries.size()
          << " slope=" << format_double(curve.fitted_slope)
          << " beta=" << format_double(curve.beta)
          << " residual=" << format_double(curve.residual) << " -> " << en_out << " ("
          << format_double(timer.seconds()) << "s)\n";
      return 0;
    }

    if (gowers->parsed()) {
      if (gw_mode == "check") {
        auto results = run_gowers_checks(gw_trials, gw_seed);
        std::ostringstream csv;
        csv << "family,trials,failures,max_violation\n";
        int failures = 0;
        for (const auto& r : results) {
          csv << r.family << "," << r.trials << "," << r.failures << ","
              << format_double(r.max_violation) << "\n";
          failures += r.failures;
        }
        atomic_write(gw_out, csv.str());
        nlohmann::ordered_json side;
        side["trials"] = gw_trials;
        side["seed"] = gw_seed;
        side["failures"] = failures;
        write_sidecar(gw_out, side, args);
        out << "gowers check: trials=" << gw_trials << " failures=" << failures << " -> "
            << gw_out << " (" << format_double(timer.seconds()) << "s)\n";
        return failures == 0 ? 0 : 3;
      }
      if (gw_mode == "ratio") {
        if (gw_measure.empty() || gw_scales.empty())
          throw ValidationError("gowers ratio: --measure and --scales are required");
        GridMeasure mu = load_measure(gw_measure);
        auto scales = parse_scale_ladder(gw_scales);
        std::ostringstream csv;
        csv << "r,energy,u2_fourth,ratio\n";
        double c1 = 0, c2 = 0;
        bool first = true;
        for (const auto& r : scales) {
          double e = energy_fast(mu, r);
          double u = u2_of_smoothed(mu, r);
          double u4 = u * u * u * u;
          double rv = r.value();
          double ratio = e * rv * rv * rv / u4;
          csv << format_double(rv) << "," << format_double(e) << "," << format_double(u4) << ","
              << format_double(ratio) << "\n";
          if (first) {
            c1 = c2 = ratio;
            first = false;
          }
          c1 = std::min(c1, ratio);
          c2 = std::max(c2, ratio);
        }
        atomic_write(gw_out, csv.str());
        nlohmann::ordered_json side;
        side["c1"] = format_double(c1);
        side["c2"] = format_double(c2);
        side["span"] = format_double(c1 > 0 ? c2 / c1 : 0.0);
        write_sidecar(gw_out, side, args);
        out << "gowers ratio: scales=" << scales.size() << " window=[" << format_double(c1)
            << "," << format_double(c2) << "] span=" << format_double(c1 > 0 ? c2 / c1 : 0.0)
            << " -> " << gw_out << " (" << format_double(timer.seconds()) << "s)\n";
        return 0;
      }
      throw ValidationError("gowers: --mode must be check or ratio");
    }

    if (edges->parsed()) {
      GridMeasure mu = load_measure(ed_measure);
      KAdicTree tree = build_tree(mu, ed_K, 2 * ed_levels);
      if (!tree.paper_regime())
        out << "edges: note: K=" << ed_K << " is outside the K>=1000 perfect-square regime\n";
      auto reports = exceptional_sets(tree, mu, ed_levels);
      auto violations = porosity_violations(tree);
      std::ostringstream csv;
      csv << "n,interval_length,active,left_edges,near_edges,exceptional_mass\n";
      for (const auto& r : reports)
        csv << r.n << "," << format_double(r.interval_length) << "," << r.active_count << ","
            << r.left_edge_count << "," << r.near_edge_count << ","
            << format_double(r.exceptional_mass) << "\n";
      atomic_write(ed_out, csv.str());
      nlohmann::ordered_json side;
      side["K"] = ed_K;
      side["levels"] = ed_levels;
      side["porosity_violations"] = violations.size();
      if (!ed_eps_opt->empty()) side["epsilon"] = format_double(ed_epsilon);
      if (!ed_r0_opt->empty()) side["r0"] = format_double(ed_r0);
      write_sidecar(ed_out, side, args);
      out << "edges: K=" << ed_K << " levels=" << ed_levels
          << " porosity_violations=" << violations.size() << " -> " << ed_out << " ("
          << format_double(timer.seconds()) << "s)\n";
      return 0;
    }

    if (fup->parsed()) {
      auto make_spec = [&](const std::string& digits, bool full) {
        MaskSpec spec;
        if (full) {
          spec.full_interval = true;
          return spec;
        }
        spec.cantor.base = fu_base;
        spec.cantor.digits = parse_digits(digits);
        spec.cantor.levels = 1;  // depth follows h
        return spec;
      };
      MaskSpec xs = make_spec(fu_digits_x.empty() ? fu_digits : fu_digits_x, fu_full_x);
      MaskSpec ys = make_spec(fu_digits_y.empty() ? fu_digits : fu_digits_y, fu_full_y);
      auto hs = parse_scale_ladder(fu_h);
      FupCurve curve = fup_curve(xs, ys, hs, fu_oversample, threads);
      std::ostringstream csv;
      csv << "h,norm,matrix_side,oversample\n";
      for (const auto& e : curve.entries)
        csv << format_double(e.h.value()) << "," << format_double(e.norm) << ","
            << e.matrix_side << "," << e.oversample << "\n";
      atomic_write(fu_out, csv.str());
      nlohmann::ordered_json side;
      side["delta_x"] = format_double(curve.delta_x);
      side["delta_y"] = format_double(curve.delta_y);
      side["trivial_exponent"] = format_double(curve.trivial_exponent);
      side["fitted_exponent"] = format_double(curve.fitted_exponent);
      side["gain"] = curve.degenerate ? "undefined" : format_double(curve.gain);
      side["degenerate"] = curve.degenerate;
      write_sidecar(fu_out, side, args);
      out << "fup: points=" << curve.entries.size()
          << " fitted=" << format_double(curve.fitted_exponent)
          << " trivial=" << format_double(curve.trivial_exponent) << " gain="
          << (curve.degenerate ? std::string("undefined") : format_double(curve.gain)) << " -> "
          << fu_out << " (" << format_double(timer.seconds()) << "s)\n";
      return 0;
    }

    if (expand->parsed()) {
      MapSpec map = MapSpec::named(ex_map);
      auto radii = parse_scale_ladder(ex_radii);
      MaskSpec spec;
      if (ex_segment) {
        spec.full_interval = true;
      } else {
        spec.cantor.base = ex_base;
        spec.cantor.digits = parse_digits(ex_digits);
        spec.cantor.levels = 1;
      }
      ExpansionCurve curve = expansion_curve(map, spec, spec, radii, ex_pre_scale, ex_pre_shift);
      std::ostringstream csv;
      csv << "r,image_measure,baseline_x,baseline_y\n";
      for (const auto& e : curve.entries)
        csv << format_double(e.r.value()) << "," << format_double(e.image) << ","
            << format_double(e.baseline_x) << "," << format_double(e.baseline_y) << "\n";
      atomic_write(ex_out, csv.str());
      nlohmann::ordered_json side;
      side["map"] = curve.map;
      side["delta"] = format_double(curve.delta);
      side["fitted_exponent"] = format_double(curve.fitted_exponent);
      side["gain"] = format_double(curve.gain);
      write_sidecar(ex_out, side, args);
      out << "expand: map=" << curve.map << " fitted=" << format_double(curve.fitted_exponent)
          << " gain=" << format_double(curve.gain) << " -> " << ex_out << " ("
          << format_double(timer.seconds()) << "s)\n";
      return 0;
    }

    if (fit->parsed()) {
      CsvTable table = read_csv(fit_in);
      std::vector<std::pair<double, double>> pts;
      for (const auto& row : table.rows) {
        if (row.size() < 2) throw ValidationError("fit: rows need >= 2 columns");
        pts.push_back({std::stod(row[0]), std::stod(row[1])});
      }
      PowerLawFit f = fit_powerlaw(pts);
      out << "slope=" << format_double(f.slope);
      std::filesystem::path side = fit_in + ".json";
      if (std::filesystem::exists(side)) {
        std::ifstream sf(side);
        nlohmann::json j = nlohmann::json::parse(sf);
        if (j.contains("delta")) {
          double delta = std::stod(j["delta"].get<std::string>());
          out << " beta=" << format_double(f.slope - delta);
        }
      }
      out << " residual=" << format_double(f.residual) << "\n";
      return 0;
    }

    if (report->parsed()) {
      nlohmann::ordered_json runs = nlohmann::ordered_json::array();
      std::stringstream ss(rp_inputs);
      std::string part;
      while (std::getline(ss, part, ',')) {
        if (part.empty()) continue;
        std::ifstream f(part);
        if (!f) throw ValidationError("report: cannot open " + part);
        nlohmann::ordered_json j = nlohmann::ordered_json::parse(f);
        nlohmann::ordered_json entry;
        entry["source"] = part;
        entry["data"] = j;
        runs.push_back(entry);
      }
      nlohmann::ordered_json top;
      top["version"] = kToolVersion;
      top["runs"] = runs;
      atomic_write(rp_out, top.dump(1) + "\n");
      out << "report: merged " << runs.size() << " sidecars -> " << rp_out << "\n";
      return 0;
    }
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << " (last estimate " << format_double(e.last_estimate)
        << " after " << e.iterations << " iterations)\n";
    return 3;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const SizeError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "error: no subcommand\n";
  return 2;
}

}  // namespace fractlab
