#include "blowup/analysis.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "blowup/error.hpp"

namespace blowup {

namespace {
constexpr double kNeutral = 1e-12;
}

int genericMode(const ModelParams& p) { return classify(p).minAdmissibleN; }

FitKind expectedFitKind(const ModelParams& p) {
  const auto e = eigenvalue(p, genericMode(p));
  return std::abs(e.lambda) <= kNeutral ? FitKind::LogFit : FitKind::PowerFit;
}

FitResult fitTrace(const RunTrace& tr, const ModelParams& p) {
  if (!tr.reachedStop) throw Error(ErrorKind::NoBlowup, "run ended without reaching the gradient threshold");
  if (expectedFitKind(p) == FitKind::PowerFit) return fitPower(tr.t, tr.drU0);
  LogFitOptions o;
  o.delta = derive(p).delta;
  return fitLog(tr.t, tr.drU0, o);
}

std::vector<LogPlotRow> logPlot(const RunTrace& tr, long double T) {
  std::vector<LogPlotRow> out;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const long double tau = T - tr.t[i];
    if (!(tau > 0)) continue;
    const double sq = std::sqrt(static_cast<double>(tau));
    out.push_back({-std::log(static_cast<double>(tau)), sq * tr.drU0[i]});
  }
  return out;
}

Overlay overlaySnapshot(const Snapshot& snap, long double T, const ProfileSolution& prof, const EigenBasis& b, int N,
                        int points) {
  const auto ss = toSelfSimilar(snap, T);
  Overlay o;
  o.s = ss.s;
  o.eps = prof.Cs / (std::exp(-0.5 * ss.s) * snap.drU0);
  if (!(o.eps > 0.0 && o.eps <= 0.1)) throw Error(ErrorKind::InvalidArgument, "snapshot eps outside (0, 0.1]");
  const auto F = snapshotInterpolant(ss);
  const double y0 = 2.0 * o.eps;
  for (int i = 0; i < points; ++i) {
    const double y = y0 * std::pow(1.0 / y0, i / (points - 1.0));
    const double fa = ansatzValue(prof, b, N, o.eps, y), fs = F(y);
    o.y.push_back(y);
    o.f.push_back(fs);
    o.fAnsatz.push_back(fa);
    if (std::abs(fs - fa) > o.supDistance) {
      o.supDistance = std::abs(fs - fa);
      o.supLocation = y;
    }
  }
  return o;
}

CompareReport compareRun(const RunTrace& tr, const ModelParams& p) {
  CompareReport r;
  r.status = tr.status;
  r.d = p.d;
  r.k = p.k;
  r.N = genericMode(p);
  r.predicted = predictRate(p, r.N);
  if (!tr.reachedStop) {
    r.status = "NoBlowup";
    r.error = "run ended without reaching the gradient threshold";
    return r;
  }
  try {
    r.fit = fitTrace(tr, p);
  } catch (const Error& e) {
    r.error = e.what();
    return r;
  }
  if (r.fit->kind == FitKind::PowerFit) {
    r.predictedValue = r.predicted.beta;
    r.fittedValue = r.fit->beta;
  } else {
    r.predictedValue = r.predicted.gradientSlope;
    r.fittedValue = r.fit->C;
    r.ratioToSlopeConstant = r.fit->C / r.predicted.gradientSlope;
    r.ratioToProduct = r.fit->C / r.predicted.prefactor;
  }
  r.relativeError = std::abs(r.fittedValue - r.predictedValue) / std::abs(r.predictedValue);

  const ModelParams pm{p.d, p.k, r.N};
  const auto prof = solveProfile(pm);
  const auto basis = buildBasis(pm, std::max(r.N, 1));
  for (const auto& sn : tr.snapshots) {
    if (sn.reason == "initial" || !(sn.t < r.fit->T)) continue;
    try {
      r.overlays.push_back(overlaySnapshot(sn, r.fit->T, prof, basis, r.N));
    } catch (const Error&) {
      // eps still too large this early
    }
  }
  return r;
}

std::string compareJson(const std::vector<CompareReport>& reports, const std::vector<std::string>& names, int indent) {
  using json = nlohmann::json;
  json runs = json::array();
  std::vector<double> cs;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    json j;
    j["run"] = i < names.size() ? names[i] : std::to_string(i);
    j["status"] = r.status;
    j["d"] = r.d;
    j["k"] = r.k;
    j["N"] = r.N;
    j["predicted"] = json::parse(rateLawJson(r.predicted, -1));
    if (!r.error.empty()) j["error"] = r.error;
    if (r.fit) {
      j["fitKind"] = toString(r.fit->kind);
      j["T"] = static_cast<double>(r.fit->T);
      j["R2"] = r.fit->r2;
      j["uncertainty"] = r.fit->uncertainty;
      if (r.fit->kind == FitKind::PowerFit) {
        j["betaPredicted"] = r.predictedValue;
        j["betaFitted"] = r.fittedValue;
      } else {
        j["CPredicted"] = r.predictedValue;
        j["CFitted"] = r.fittedValue;
        j["s0"] = r.fit->s0;
        j["ratioToInverseCsCN"] = r.ratioToSlopeConstant;
        j["ratioToCsCN"] = r.ratioToProduct;
        cs.push_back(r.fittedValue);
      }
      j["relativeError"] = r.relativeError;
      json ov = json::array();
      for (const auto& o : r.overlays) ov.push_back({{"s", o.s}, {"eps", o.eps}, {"supDistance", o.supDistance}});
      j["overlay"] = ov;
    }
    runs.push_back(j);
  }
  json out;
  out["runs"] = runs;
  if (cs.size() >= 2) {
    double lo = cs[0], hi = cs[0], mean = 0;
    for (double c : cs) lo = std::min(lo, c), hi = std::max(hi, c), mean += c;
    mean /= cs.size();
    out["CAgreement"] = {{"min", lo}, {"max", hi}, {"relativeSpread", (hi - lo) / mean}};
  }
  return out.dump(indent);
}

}  // namespace blowup
