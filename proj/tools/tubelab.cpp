// tubelab: effective drift and diffusivity of periodic tubes, by cell
// problem, Bloch branch, Monte Carlo, long-strip evolution, and dead-zone
// scans. Results go to stdout as deterministic JSON (or key,value CSV);
// --out additionally writes the record, any plots, and a manifest.

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "tube/bloch.hpp"
#include "tube/deadzone.hpp"
#include "tube/effective.hpp"
#include "tube/errors.hpp"
#include "tube/geometry.hpp"
#include "tube/grid.hpp"
#include "tube/homog.hpp"
#include "tube/io.hpp"
#include "tube/montecarlo.hpp"

namespace {

std::string g_cmdline;

struct Common {
  std::string preset;
  std::string geomFile;
  std::string outDir;
  std::string format = "json";
};

void add_common(CLI::App* sub, Common& c, bool withGeometry = true) {
  sub->set_help_flag("--help", "print this help and exit");  // frees -h for --h
  if (withGeometry) {
    sub->add_option("--preset", c.preset,
                    "built-in geometry: straight, finger, ratchet, straight3");
    sub->add_option("--geom", c.geomFile, "geometry spec file (json)");
  }
  sub->add_option("--out", c.outDir, "directory for record, plots, manifest");
  sub->add_option("--format", c.format, "stdout format")
      ->check(CLI::IsMember({"json", "csv"}));
}

tube::TubeSpec resolve_spec(const Common& c) {
  if (!c.geomFile.empty() && !c.preset.empty())
    throw tube::BadSpec("give --geom or --preset, not both");
  if (!c.geomFile.empty()) return tube::load_spec(c.geomFile);
  return tube::preset_spec(c.preset.empty() ? "straight" : c.preset);
}

std::string to_csv(const tube::json& rec) {
  std::ostringstream out;
  out << "key,value\n";
  for (const auto& item : rec.flatten().items()) {
    std::string key = item.key().substr(1);
    for (char& ch : key)
      if (ch == '/') ch = '.';
    out << key << ',';
    const tube::json& v = item.value();
    if (v.is_number_float())
      out << tube::g17(v.get<double>());
    else if (v.is_string())
      out << v.get<std::string>();
    else
      out << v.dump();
    out << '\n';
  }
  return out.str();
}

void finish(const std::string& name, const tube::TubeSpec& spec,
            const tube::json& params, const tube::json& record,
            const Common& c,
            const std::vector<std::pair<std::string, std::string>>& extras =
                {}) {
  const std::string body =
      c.format == "csv" ? to_csv(record) : record.dump(2) + "\n";
  std::fwrite(body.data(), 1, body.size(), stdout);
  if (c.outDir.empty()) return;
  std::filesystem::create_directories(c.outDir);
  std::vector<std::pair<std::string, std::string>> outs;
  auto put = [&](const std::string& file, const std::string& text) {
    tube::write_text(c.outDir + "/" + file, text);
    outs.emplace_back(file, tube::hex64(tube::fnv1a64(text)));
  };
  put(name + ".json", record.dump(2) + "\n");
  for (const auto& kv : extras) put(kv.first, kv.second);
  tube::write_text(c.outDir + "/manifest.json",
                   tube::make_manifest(g_cmdline, spec, params, outs).dump(2) +
                       "\n");
}

void run_cell(const Common& c, double v, double h, double tol) {
  const tube::TubeSpec spec = resolve_spec(c);
  const tube::Grid g = tube::rasterize(tube::build_cell(spec), h);
  tube::SolveOptions opts;
  opts.tol = tol;
  const tube::EffectiveResult res = tube::compute_effective(g, v, opts);
  const double bar =
      std::max(100 * opts.tol * std::max(1.0, std::abs(res.veff)), 1e-12);
  if (res.drift.spread() > bar)
    throw tube::RouteDisagreement("drift quadratures spread " +
                                  tube::g17(res.drift.spread()) +
                                  " exceeds " + tube::g17(bar));
  finish("cell", spec, tube::json{{"V", v}, {"h", h}, {"tol", tol}},
         tube::record_effective(spec, res), c);
}

void run_bloch(const Common& c, double v, double h, double thetaMax,
               double tol) {
  const tube::TubeSpec spec = resolve_spec(c);
  const tube::Grid g = tube::rasterize(tube::build_cell(spec), h);
  tube::SolveOptions opts;
  opts.tol = tol;
  const tube::BlochScan scan =
      tube::bloch_scan(g, v, tube::default_theta_list(thetaMax), opts);
  const tube::BlochFit fit = tube::taylor_fit(scan);

  std::vector<double> xs;
  std::vector<double> re, im;
  for (const tube::BlochSample& s : scan.samples) {
    xs.push_back(s.theta);
    re.push_back(s.lambda.real());
    im.push_back(s.lambda.imag());
  }
  finish("bloch", spec,
         tube::json{{"V", v}, {"h", h}, {"thetaMax", thetaMax}, {"tol", tol}},
         tube::record_bloch(spec, scan, fit), c,
         {{"bloch.svg",
           tube::svg_polyline_plot(xs, {re, im}, {"Re lambda", "Im lambda"},
                                   "principal branch, V=" + tube::g17(v))}});
}

void run_mc(const Common& c, double v, const tube::McConfig& cfg) {
  const tube::TubeSpec spec = resolve_spec(c);
  const tube::CellDomain dom = tube::build_cell(spec);
  const tube::McEstimate est = tube::estimate_effective(dom, v, cfg);
  finish("mc", spec,
         tube::json{{"V", v},
                    {"paths", cfg.nPaths},
                    {"T", cfg.T},
                    {"dt", cfg.dt},
                    {"seed", cfg.seed},
                    {"burn", cfg.burnIn}},
         tube::record_mc(spec, cfg, est), c);
}

void run_ratchet(const Common& c, double v, double h, double tol) {
  const tube::TubeSpec spec = resolve_spec(c);
  const tube::Grid g = tube::rasterize(tube::build_cell(spec), h);
  tube::SolveOptions opts;
  opts.tol = tol;
  const tube::EffectiveResult fwd = tube::compute_effective(g, v, opts);
  const tube::EffectiveResult bwd = tube::compute_effective(g, -v, opts);
  const tube::TubeSpec mspec = tube::mirror(spec);
  const tube::Grid mg = tube::rasterize(tube::build_cell(mspec), h);
  const tube::EffectiveResult mir = tube::compute_effective(mg, v, opts);

  const double asym = fwd.veff + bwd.veff;
  const double bar = fwd.drift.spread() + bwd.drift.spread();
  const double mirrorDefect = std::abs(mir.veff + bwd.veff);
  const bool symmetric = tube::same_domain(spec, mspec);
  if (mirrorDefect > 1e-8)
    throw tube::RouteDisagreement(
        "mirror antisymmetry broken: defect " + tube::g17(mirrorDefect));
  if (symmetric && std::abs(asym) > std::max(10 * bar, 1e-8))
    throw tube::RouteDisagreement(
        "mirror-symmetric domain rectifies: " + tube::g17(asym));

  tube::json j;
  j["kind"] = "ratchet";
  j["geometry"] = tube::record_effective(spec, fwd)["geometry"];
  j["V"] = v;
  j["h"] = h;
  j["veffForward"] = fwd.veff;
  j["veffBackward"] = bwd.veff;
  j["asymmetry"] = asym;
  j["errorBar"] = bar;
  j["direction"] = asym > 0 ? "+s" : (asym < 0 ? "-s" : "none");
  j["mirrorDefect"] = mirrorDefect;
  j["mirrorSymmetric"] = symmetric;
  j["sigma2Forward"] = fwd.sigma2;
  j["sigma2Backward"] = bwd.sigma2;
  finish("ratchet", spec, tube::json{{"V", v}, {"h", h}, {"tol", tol}}, j, c);
}

void run_strip(const Common& c, const tube::HomogConfig& cfg) {
  const tube::TubeSpec spec = resolve_spec(c);
  const tube::CellDomain dom = tube::build_cell(spec);
  const tube::HomogResult res = tube::homog_run(dom, cfg);
  finish("strip", spec,
         tube::json{{"V", cfg.V},
                    {"eps", cfg.eps},
                    {"h", cfg.h},
                    {"t", res.tFinal},
                    {"dt", res.dt}},
         tube::record_homog(spec, cfg, res), c);
}

void run_deadzone(const Common& c, std::vector<double> epsList, double hFactor,
                  double tol) {
  if (epsList.empty()) epsList = {1.0 / 6, 1.0 / 12, 1.0 / 24};
  tube::SolveOptions opts;
  opts.tol = tol;
  const std::vector<tube::DeadZoneRow> rows =
      tube::sigma_scan(epsList, hFactor, opts);
  const tube::DeadZoneFit fit = tube::extrapolate_limit(rows);

  std::vector<double> xs, s2, lead;
  for (const tube::DeadZoneRow& r : rows) {
    xs.push_back(r.eps);
    s2.push_back(r.sigma2);
    lead.push_back(r.leading);
  }
  const tube::TubeSpec spec = tube::deadzone3_spec(epsList.front());
  finish("deadzone", spec,
         tube::json{{"epsList", epsList}, {"hFactor", hFactor}, {"tol", tol}},
         tube::record_deadzone(rows, fit), c,
         {{"deadzone.svg",
           tube::svg_polyline_plot(xs, {s2, lead},
                                   {"sigma2", "dilution limit"},
                                   "dead-zone family")}});
}

void run_geom(const Common& c) {
  const tube::TubeSpec spec = resolve_spec(c);
  const tube::CellDomain dom = tube::build_cell(spec);
  tube::json j = tube::spec_to_json(spec);
  tube::json d;
  d["cellVolume"] = dom.cellVolume;
  d["zmin"] = std::vector<double>(dom.zmin.begin(),
                                  dom.zmin.begin() + (dom.dim - 1));
  d["zmax"] = std::vector<double>(dom.zmax.begin(),
                                  dom.zmax.begin() + (dom.dim - 1));
  j["derived"] = d;
  finish("geom", spec, tube::json::object(), j, c);
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 0; i < argc; ++i) {
    if (i) g_cmdline += ' ';
    g_cmdline += argv[i];
  }

  CLI::App app{"effective transport constants of periodic tubes"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);

  Common cCell, cBloch, cMc, cRatchet, cStrip, cDead, cGeom;
  double cellV = 0, cellH = 1.0 / 32, cellTol = 1e-10;
  double blochV = 0, blochH = 1.0 / 32, blochThetaMax = 0.1,
         blochTol = 1e-10;
  double mcV = 0;
  tube::McConfig mcCfg;
  double ratchetV = 2, ratchetH = 1.0 / 32, ratchetTol = 1e-10;
  tube::HomogConfig stripCfg;
  std::vector<double> dzEps;
  double dzHFactor = 0.5, dzTol = 1e-10;

  CLI::App* cell = app.add_subcommand(
      "cell", "stationary density, drift quadratures, corrector diffusivity");
  add_common(cell, cCell);
  cell->add_option("--v", cellV, "axial drift");
  cell->add_option("--h", cellH, "grid spacing (1/h integer)");
  cell->add_option("--tol", cellTol, "solver residual target");
  cell->callback([&] { run_cell(cCell, cellV, cellH, cellTol); });

  CLI::App* bloch = app.add_subcommand(
      "bloch", "principal eigenvalue branch and its Taylor coefficients");
  add_common(bloch, cBloch);
  bloch->add_option("--v", blochV, "axial drift");
  bloch->add_option("--h", blochH, "grid spacing");
  bloch->add_option("--theta-max", blochThetaMax, "largest twist angle");
  bloch->add_option("--tol", blochTol, "eigensolver residual target");
  bloch->callback(
      [&] { run_bloch(cBloch, blochV, blochH, blochThetaMax, blochTol); });

  CLI::App* mc = app.add_subcommand(
      "mc", "reflected-path simulation of drift and diffusivity");
  add_common(mc, cMc);
  mc->add_option("--v", mcV, "axial drift");
  mc->add_option("--paths", mcCfg.nPaths, "number of paths");
  mc->add_option("--t", mcCfg.T, "measurement window per path");
  mc->add_option("--dt", mcCfg.dt, "time step");
  mc->add_option("--seed", mcCfg.seed, "rng seed");
  mc->add_option("--burn", mcCfg.burnIn, "burn-in time (<0: auto)");
  mc->callback([&] { run_mc(cMc, mcV, mcCfg); });

  CLI::App* ratchet = app.add_subcommand(
      "ratchet", "forward/backward drift asymmetry and mirror check");
  add_common(ratchet, cRatchet);
  ratchet->add_option("--v", ratchetV, "axial drift magnitude");
  ratchet->add_option("--h", ratchetH, "grid spacing");
  ratchet->add_option("--tol", ratchetTol, "solver residual target");
  ratchet->callback(
      [&] { run_ratchet(cRatchet, ratchetV, ratchetH, ratchetTol); });

  CLI::App* strip = app.add_subcommand(
      "strip", "long-strip evolution against the 1-d effective solution");
  add_common(strip, cStrip);
  strip->add_option("--v", stripCfg.V, "axial drift");
  strip->add_option("--eps", stripCfg.eps, "scale separation");
  strip->add_option("--h", stripCfg.h, "grid spacing");
  strip->add_option("--t", stripCfg.tFinal, "final time (<0: 1/eps^2)");
  strip->add_option("--dt", stripCfg.dt, "time step (<0: h^2)");
  strip->add_option("--width", stripCfg.phi.width, "envelope width");
  strip->callback([&] { run_strip(cStrip, stripCfg); });

  CLI::App* dead = app.add_subcommand(
      "deadzone", "cavity family scan and small-eps extrapolation");
  add_common(dead, cDead, false);
  dead->add_option("--eps-list", dzEps, "channel widths, largest first");
  dead->add_option("--h-factor", dzHFactor, "h = factor * eps per row");
  dead->add_option("--tol", dzTol, "solver residual target");
  dead->callback([&] { run_deadzone(cDead, dzEps, dzHFactor, dzTol); });

  CLI::App* geom = app.add_subcommand(
      "geom", "validate a geometry and print its canonical form");
  add_common(geom, cGeom);
  geom->callback([&] { run_geom(cGeom); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const tube::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.kind() == tube::ErrorKind::Numerical ? 1 : 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
