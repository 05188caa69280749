#include "tube/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

namespace tube {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)v);
  return buf;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BadSpec("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw BadSpec("cannot write " + path);
  out << text;
  out.flush();
  if (!out) throw BadSpec("short write to " + path);
}

json spec_to_json(const TubeSpec& spec) {
  json boxes = json::array();
  for (const Box& b : spec.boxes) {
    json jb;
    jb["lo"] = std::vector<double>(b.lo.begin(), b.lo.begin() + spec.dim);
    jb["hi"] = std::vector<double>(b.hi.begin(), b.hi.begin() + spec.dim);
    boxes.push_back(jb);
  }
  json j;
  j["dim"] = spec.dim;
  j["drift"] = spec.drift;
  j["label"] = spec.label;
  j["boxes"] = boxes;
  return j;
}

TubeSpec spec_from_json(const json& j) {
  try {
    TubeSpec spec;
    spec.dim = j.at("dim").get<int>();
    if (spec.dim != 2 && spec.dim != 3) throw BadSpec("dim must be 2 or 3");
    spec.drift = j.value("drift", 0.0);
    spec.label = j.value("label", std::string());
    const json& boxes = j.at("boxes");
    if (!boxes.is_array() || boxes.empty())
      throw BadSpec("boxes must be a nonempty array");
    for (const json& jb : boxes) {
      const json& lo = jb.at("lo");
      const json& hi = jb.at("hi");
      if (!lo.is_array() || !hi.is_array() ||
          (int)lo.size() != spec.dim || (int)hi.size() != spec.dim)
        throw BadSpec("box lo/hi need exactly dim entries");
      Box b;
      for (int a = 0; a < spec.dim; ++a) {
        b.lo[size_t(a)] = lo[size_t(a)].get<double>();
        b.hi[size_t(a)] = hi[size_t(a)].get<double>();
      }
      spec.boxes.push_back(b);
    }
    return spec;
  } catch (const json::exception& e) {
    throw BadSpec(std::string("malformed spec json: ") + e.what());
  }
}

TubeSpec load_spec(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw BadSpec("cannot parse " + path + ": " + e.what());
  }
  return spec_from_json(j);
}

void save_spec(const TubeSpec& spec, const std::string& path) {
  write_text(path, spec_to_json(spec).dump(2) + "\n");
}

namespace {

json spec_summary(const TubeSpec& spec) {
  json j;
  j["label"] = spec.label.empty() ? std::string("custom") : spec.label;
  j["dim"] = spec.dim;
  j["hash"] = hex64(fnv1a64(spec_to_json(spec).dump()));
  return j;
}

json report_json(const SolveReport& rep) {
  json j;
  j["method"] = rep.method;
  j["iterations"] = rep.iterations;
  j["residual"] = rep.residual;
  j["converged"] = rep.converged;
  return j;
}

}  // namespace

json record_effective(const TubeSpec& spec, const EffectiveResult& r) {
  json j;
  j["kind"] = "cell";
  j["geometry"] = spec_summary(spec);
  j["V"] = r.V;
  j["h"] = r.h;
  j["cells"] = (int64_t)r.pi.size();
  j["veff"] = r.veff;
  j["sigma2"] = r.sigma2;
  j["drift"] = json{{"cut", r.drift.cut},
                    {"vol", r.drift.vol},
                    {"lat", r.drift.lat},
                    {"spread", r.drift.spread()}};
  j["compatResidual"] = r.compatResidual;
  j["solves"] = json{{"pi", report_json(r.piReport)},
                     {"psi", report_json(r.psiReport)}};
  return j;
}

json record_bloch(const TubeSpec& spec, const BlochScan& scan,
                  const BlochFit& fit) {
  json samples = json::array();
  for (const BlochSample& s : scan.samples) {
    json js;
    js["theta"] = s.theta;
    js["lambda"] = json::array({s.lambda.real(), s.lambda.imag()});
    js["residual"] = s.residual;
    js["iterations"] = s.iterations;
    samples.push_back(js);
  }
  json j;
  j["kind"] = "bloch";
  j["geometry"] = spec_summary(spec);
  j["V"] = scan.V;
  j["thetaMax"] = scan.thetaMax;
  j["samples"] = samples;
  j["fit"] = json{{"veff", fit.veff},
                  {"sigma2", fit.sigma2},
                  {"c3", fit.c3},
                  {"d4", fit.d4},
                  {"fitResidual", fit.fitResidual}};
  return j;
}

json record_mc(const TubeSpec& spec, const McConfig& cfg, const McEstimate& e) {
  json j;
  j["kind"] = "mc";
  j["geometry"] = spec_summary(spec);
  j["seed"] = cfg.seed;
  j["nPaths"] = e.nPaths;
  j["T"] = e.T;
  j["dt"] = e.dt;
  j["burnIn"] = e.burnIn;
  j["veff"] = e.veff;
  j["veffSe"] = e.veffSe;
  j["sigma2"] = e.sigma2;
  j["sigma2Se"] = e.sigma2Se;
  j["totalSteps"] = e.totalSteps;
  j["halfStepRetries"] = e.halfStepRetries;
  return j;
}

json record_homog(const TubeSpec& spec, const HomogConfig& cfg,
                  const HomogResult& r) {
  json j;
  j["kind"] = "strip";
  j["geometry"] = spec_summary(spec);
  j["V"] = cfg.V;
  j["eps"] = r.eps;
  j["h"] = r.h;
  j["tFinal"] = r.tFinal;
  j["dt"] = r.dt;
  j["nPeriods"] = r.nPeriods;
  j["cells"] = r.cells;
  j["envelope"] = json{{"width", cfg.phi.width}, {"cut", cfg.phi.cut}};
  j["veff"] = r.veff;
  j["sigma2"] = r.sigma2;
  j["supError"] = r.cmp.supError;
  j["l2Error"] = r.cmp.l2Error;
  j["region"] = json::array({r.cmp.regionLo, r.cmp.regionHi});
  j["massDrift"] = r.evolve.massDrift;
  j["endMassFraction"] = r.evolve.endMassFraction;
  j["steps"] = r.evolve.steps;
  return j;
}

json record_deadzone(const std::vector<DeadZoneRow>& rows,
                     const DeadZoneFit& fit) {
  json jr = json::array();
  for (const DeadZoneRow& r : rows) {
    json row;
    row["eps"] = r.eps;
    row["h"] = r.h;
    row["cells"] = r.cells;
    row["sigma2"] = r.sigma2;
    row["vol0"] = r.vol0;
    row["vol1"] = r.vol1;
    row["leading"] = r.leading;
    row["gap"] = r.gap;
    jr.push_back(row);
  }
  json j;
  j["kind"] = "deadzone";
  j["rows"] = jr;
  j["fit"] = json{{"limit", fit.limit}, {"rate", fit.rate},
                  {"coeff", fit.coeff}};
  return j;
}

std::string svg_polyline_plot(const std::vector<double>& x,
                              const std::vector<std::vector<double>>& ys,
                              const std::vector<std::string>& names,
                              const std::string& title) {
  const int W = 720, H = 480;
  const double L = 64, R = 20, T = 44, B = 44;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H
      << "\">\n";
  out << "<rect width=\"" << W << "\" height=\"" << H
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">"
      << title << "</text>\n";
  if (!x.empty() && !ys.empty()) {
    double xmin = x[0], xmax = x[0];
    for (double v : x) {
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
    double ymin = 0, ymax = 0;
    bool first = true;
    for (const auto& s : ys)
      for (double v : s) {
        if (first) {
          ymin = ymax = v;
          first = false;
        }
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
      }
    if (xmax - xmin <= 0) xmax = xmin + 1;
    if (ymax - ymin <= 0) {
      ymax += 0.5;
      ymin -= 0.5;
    }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    auto px = [&](double v) {
      return L + (v - xmin) / (xmax - xmin) * (W - L - R);
    };
    auto py = [&](double v) {
      return H - B - (v - ymin) / (ymax - ymin) * (H - T - B);
    };
    out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R
        << "\" height=\"" << H - T - B
        << "\" fill=\"none\" stroke=\"#888\"/>\n";
    char buf[64];
    for (int k = 0; k <= 4; ++k) {
      const double xv = xmin + k * (xmax - xmin) / 4;
      const double yv = ymin + k * (ymax - ymin) / 4;
      std::snprintf(buf, sizeof buf, "%.4g", xv);
      out << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             "font-size=\"11\">"
          << buf << "</text>\n";
      std::snprintf(buf, sizeof buf, "%.4g", yv);
      out << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
             "font-size=\"11\">"
          << buf << "</text>\n";
    }
    static const char* kPalette[] = {"#1b6ca8", "#d1495b", "#66a182",
                                     "#edae49", "#775b9e"};
    for (size_t s = 0; s < ys.size(); ++s) {
      const char* color = kPalette[s % 5];
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"";
      const size_t n = std::min(x.size(), ys[s].size());
      for (size_t i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x[i]), py(ys[s][i]));
        out << buf;
      }
      out << "\"/>\n";
      if (s < names.size()) {
        const double lx = L + 10, ly = T + 16 + 16 * (double)s;
        out << "<rect x=\"" << lx << "\" y=\"" << ly - 9
            << "\" width=\"12\" height=\"4\" fill=\"" << color << "\"/>\n";
        out << "<text x=\"" << lx + 18 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << names[s]
            << "</text>\n";
      }
    }
  }
  out << "</svg>\n";
  return out.str();
}

json make_manifest(const std::string& command, const TubeSpec& spec,
                   const json& params,
                   const std::vector<std::pair<std::string, std::string>>&
                       outputs) {
  json j;
  j["command"] = command;
  j["geometry"] = spec_summary(spec);
  j["params"] = params;
  json outs = json::object();
  for (const auto& kv : outputs) outs[kv.first] = kv.second;
  j["outputs"] = outs;
  char stamp[32] = "unknown";
  const std::time_t now = std::time(nullptr);
  if (std::tm* tm = std::gmtime(&now))
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", tm);
  j["written"] = stamp;
  return j;
}

}  // namespace tube
